#include "affect/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "affect/error.hpp"
#include "affect/util.hpp"

namespace affect {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kMinError = 1e-10;

double gini(double w0, double w1) {
  const double total = w0 + w1;
  if (total <= 0.0) return 0.0;
  const double p0 = w0 / total;
  const double p1 = w1 / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& m, std::span<const double> w, const TreeParams& p)
      : m_(m), w_(w), params_(p) {}

  DecisionTree build() {
    DecisionTree tree;
    tree.max_depth = params_.max_depth;
    std::vector<std::size_t> all(m_.n_rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    tree_ = &tree;
    grow(all, 0);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  int grow(const std::vector<std::size_t>& idx, int depth) {
    double w0 = 0.0;
    double w1 = 0.0;
    for (std::size_t i : idx) (m_.rows[i].label == 1 ? w1 : w0) += w_[i];

    const int node_id = static_cast<int>(tree_->nodes.size());
    tree_->nodes.emplace_back();
    {
      TreeNode& node = tree_->nodes.back();
      const double total = w0 + w1;
      if (total > 0.0) node.probabilities = {w0 / total, w1 / total};
      node.label = w1 > w0 ? 1 : 0;
    }
    if (depth >= params_.max_depth || w0 <= 0.0 || w1 <= 0.0 ||
        idx.size() < 2 * params_.min_leaf) {
      return node_id;
    }
    const Split split = best_split(idx, w0 + w1);
    if (split.feature < 0) return node_id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) {
      (m_.rows[i].values[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(i);
    }
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = tree_->nodes[static_cast<std::size_t>(node_id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  Split best_split(const std::vector<std::size_t>& idx, double total) const {
    Split best;
    bool found = false;
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < m_.n_features(); ++f) {
      const auto value = [&](std::size_t i) { return m_.rows[i].values[f]; };
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
      double l0 = 0.0;
      double l1 = 0.0;
      double t0 = 0.0;
      double t1 = 0.0;
      for (std::size_t i : order) (m_.rows[i].label == 1 ? t1 : t0) += w_[i];
      for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const std::size_t i = order[pos];
        (m_.rows[i].label == 1 ? l1 : l0) += w_[i];
        const double a = value(i);
        const double b = value(order[pos + 1]);
        if (!(a < b)) continue;
        const std::size_t n_left = pos + 1;
        if (n_left < params_.min_leaf || order.size() - n_left < params_.min_leaf) continue;
        const double r0 = t0 - l0;
        const double r1 = t1 - l1;
        const double impurity = ((l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1)) / total;
        if (!found || impurity < best.impurity - kTieTolerance) {
          double threshold = 0.5 * (a + b);
          if (!(threshold < b)) threshold = a;
          best = {static_cast<int>(f), threshold, impurity};
          found = true;
        }
      }
    }
    return best;
  }

  const FeatureMatrix& m_;
  std::span<const double> w_;
  TreeParams params_;
  DecisionTree* tree_ = nullptr;
};

void check_finite_matrix(const FeatureMatrix& m) {
  for (const auto& r : m.rows) {
    for (double v : r.values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, "row " + r.event_id + " has a missing value");
      }
    }
  }
}

}  // namespace

int DecisionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                      : n.right);
  }
  return nodes[i].label;
}

void DecisionTree::validate(std::size_t n_features) const {
  if (nodes.empty()) throw Error(ErrorCode::CorruptModel, "tree has no nodes");
  const auto count = static_cast<int>(nodes.size());
  for (int i = 0; i < count; ++i) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    const double sum = n.probabilities[0] + n.probabilities[1];
    if (std::abs(sum - 1.0) > 1e-9 || n.probabilities[0] < 0.0 || n.probabilities[1] < 0.0) {
      throw Error(ErrorCode::CorruptModel, "leaf probabilities do not sum to 1");
    }
    if (n.label != 0 && n.label != 1) throw Error(ErrorCode::CorruptModel, "bad node label");
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= n_features) {
      throw Error(ErrorCode::CorruptModel, "feature index out of range");
    }
    // children are stored after their parent, which rules out cycles
    if (n.left <= i || n.right <= i || n.left >= count || n.right >= count) {
      throw Error(ErrorCode::CorruptModel, "bad child index");
    }
    if (!std::isfinite(n.threshold)) throw Error(ErrorCode::CorruptModel, "non-finite threshold");
  }
}

DecisionTree train_tree(const FeatureMatrix& matrix, std::span<const double> weights,
                        const TreeParams& params) {
  if (matrix.n_rows() == 0 || matrix.n_features() == 0) {
    throw Error(ErrorCode::EmptyMatrix, "cannot fit a tree on an empty matrix");
  }
  matrix.validate();
  check_finite_matrix(matrix);
  if (weights.size() != matrix.n_rows()) {
    throw Error(ErrorCode::LengthMismatch, "one weight per row required");
  }
  if (params.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  if (params.min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_leaf must be >= 1");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidArgument, "weights must be finite and non-negative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must not all be zero");
  return TreeBuilder(matrix, weights, params).build();
}

double capped_alpha() { return 0.5 * std::log((1.0 - kMinError) / kMinError); }

AdaBoostModel train_adaboost(const FeatureMatrix& matrix, const BoostParams& params,
                             std::uint64_t seed, BoostTrace* trace) {
  if (params.rounds < 1) throw Error(ErrorCode::InvalidArgument, "need at least one round");
  if (matrix.n_rows() == 0) throw Error(ErrorCode::EmptyMatrix, "cannot boost on an empty matrix");
  const std::size_t n = matrix.n_rows();
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = matrix.rows[i].label == 1 ? 1 : -1;

  AdaBoostModel model;
  model.feature_names = matrix.feature_names;
  model.meta.seed = seed;
  model.meta.rounds_requested = params.rounds;
  model.meta.max_depth = params.tree.max_depth;
  model.meta.min_leaf = params.tree.min_leaf;

  BoostTrace local;
  BoostTrace& tr = trace != nullptr ? *trace : local;
  tr = BoostTrace{};

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<int> h(n);
  for (int t = 0; t < params.rounds; ++t) {
    DecisionTree tree = train_tree(matrix, w, params.tree);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = tree.predict(matrix.rows[i].values) == 1 ? 1 : -1;
      if (h[i] != y[i]) err += w[i];
    }
    if (err >= 0.5) {
      if (model.trees.empty()) {
        throw Error(ErrorCode::DegenerateRound,
                    "first boosting round has weighted error " + format_double(err));
      }
      model.meta.stop_reason = "degenerate_round";
      break;
    }
    const bool perfect = err <= 0.0;
    const double alpha = perfect ? capped_alpha() : 0.5 * std::log((1.0 - err) / err);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-alpha * y[i] * h[i]);
      total += w[i];
    }
    for (double& wi : w) wi /= total;

    model.trees.push_back(std::move(tree));
    model.alphas.push_back(alpha);
    tr.errors.push_back(err);
    tr.alphas.push_back(alpha);
    tr.weights.push_back(w);
    if (perfect) {
      model.meta.stop_reason = "perfect_round";
      break;
    }
  }

  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (predict_values(model, matrix.rows[i].values).label != matrix.rows[i].label) ++wrong;
  }
  tr.training_error = static_cast<double>(wrong) / static_cast<double>(n);
  tr.error_bound = 1.0;
  for (double e : tr.errors) {
    const double eps = std::max(e, kMinError);
    tr.error_bound *= 2.0 * std::sqrt(eps * (1.0 - eps));
  }
  if (tr.training_error > tr.error_bound + 1e-12) {
    throw Error(ErrorCode::InternalInvariant,
                "training error " + format_double(tr.training_error) +
                    " exceeds boosting bound " + format_double(tr.error_bound));
  }
  return model;
}

Prediction predict_values(const AdaBoostModel& model, std::span<const double> values) {
  if (values.size() != model.feature_names.size()) {
    throw Error(ErrorCode::FeatureMismatch, "expected " +
                                                std::to_string(model.feature_names.size()) +
                                                " feature values");
  }
  std::vector<double> x(values.begin(), values.end());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (std::isnan(x[j])) {
      if (model.impute_values.empty()) {
        throw Error(ErrorCode::NonFiniteValue, "missing value for " + model.feature_names[j]);
      }
      x[j] = model.impute_values[j];
    }
  }
  Prediction p;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    p.score += model.alphas[t] * (model.trees[t].predict(x) == 1 ? 1.0 : -1.0);
  }
  p.label = p.score > 0.0 ? 1 : 0;
  return p;
}

Prediction predict(const AdaBoostModel& model, const FeatureVector& x) {
  std::vector<double> values;
  values.reserve(model.feature_names.size());
  for (const auto& name : model.feature_names) {
    const auto v = x.get(name);
    if (!v) throw Error(ErrorCode::FeatureMismatch, "input lacks feature '" + name + "'");
    values.push_back(*v);
  }
  return predict_values(model, values);
}

std::string serialize_model(const AdaBoostModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

std::uint64_t model_hash(const AdaBoostModel& model) { return fnv1a64(serialize_model(model)); }

void save_model(const AdaBoostModel& model, std::ostream& out) {
  if (model.trees.size() != model.alphas.size()) {
    throw Error(ErrorCode::InternalInvariant, "trees and alphas differ in count");
  }
  const auto no_space = [](const std::string& s) {
    return !s.empty() && s.find_first_of(" \t\r\n") == std::string::npos;
  };
  out << kModelMagic << '\n';
  out << "version " << kModelVersion << '\n';
  out << "config_hash " << (model.meta.config_hash.empty() ? "-" : model.meta.config_hash) << '\n';
  out << "seed " << model.meta.seed << '\n';
  out << "rounds_requested " << model.meta.rounds_requested << '\n';
  out << "stop_reason " << model.meta.stop_reason << '\n';
  out << "max_depth " << model.meta.max_depth << '\n';
  out << "min_leaf " << model.meta.min_leaf << '\n';
  out << "features " << model.feature_names.size() << '\n';
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    if (!no_space(model.feature_names[j])) {
      throw Error(ErrorCode::InvalidArgument, "feature names must not contain whitespace");
    }
    out << "feature " << model.feature_names[j] << ' '
        << (model.impute_values.empty() ? std::string("NA") : format_double(model.impute_values[j]))
        << '\n';
  }
  out << "stages " << model.trees.size() << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const DecisionTree& tree = model.trees[t];
    out << "stage " << format_double(model.alphas[t]) << ' ' << tree.nodes.size() << ' '
        << tree.max_depth << '\n';
    for (const TreeNode& n : tree.nodes) {
      out << "node " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' '
          << n.right << ' ' << n.label << ' ' << format_double(n.probabilities[0]) << ' '
          << format_double(n.probabilities[1]) << '\n';
    }
  }
  out << "end\n";
}

void save_model(const AdaBoostModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  save_model(model, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  // Next line split on spaces; the first token must equal `key`.
  std::vector<std::string> expect(std::string_view key, std::size_t n_values) {
    std::string line;
    if (!std::getline(in_, line)) corrupt("unexpected end of file, wanted '" + std::string(key) + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (tokens.empty() || tokens.front() != key || tokens.size() != n_values + 1) {
      corrupt("malformed '" + std::string(key) + "' line");
    }
    tokens.erase(tokens.begin());
    return tokens;
  }

  static double number(const std::string& text) {
    double v = 0.0;
    if (!parse_double(text, v) || !std::isfinite(v)) corrupt("bad number '" + text + "'");
    return v;
  }

  static long long integer(const std::string& text) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception&) {
      corrupt("bad integer '" + text + "'");
    }
    if (used != text.size()) corrupt("bad integer '" + text + "'");
    return v;
  }

  [[noreturn]] static void corrupt(const std::string& why) {
    throw Error(ErrorCode::CorruptModel, why);
  }

 private:
  std::istream& in_;
};

}  // namespace

AdaBoostModel load_model(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic)) ModelReader::corrupt("empty model file");
  if (!magic.empty() && magic.back() == '\r') magic.pop_back();
  if (magic != kModelMagic) ModelReader::corrupt("wrong magic header");

  ModelReader r(in);
  const long long version = ModelReader::integer(r.expect("version", 1)[0]);
  if (version != kModelVersion) {
    throw Error(ErrorCode::VersionMismatch, "model version " + std::to_string(version) +
                                                ", this build reads " +
                                                std::to_string(kModelVersion));
  }
  AdaBoostModel model;
  model.meta.config_hash = r.expect("config_hash", 1)[0];
  const std::string seed_text = r.expect("seed", 1)[0];
  try {
    std::size_t used = 0;
    model.meta.seed = std::stoull(seed_text, &used);
    if (used != seed_text.size()) ModelReader::corrupt("bad seed");
  } catch (const std::logic_error&) {
    ModelReader::corrupt("bad seed");
  }
  model.meta.rounds_requested = static_cast<int>(ModelReader::integer(r.expect("rounds_requested", 1)[0]));
  model.meta.stop_reason = r.expect("stop_reason", 1)[0];
  model.meta.max_depth = static_cast<int>(ModelReader::integer(r.expect("max_depth", 1)[0]));
  model.meta.min_leaf = static_cast<std::size_t>(ModelReader::integer(r.expect("min_leaf", 1)[0]));

  const long long n_features = ModelReader::integer(r.expect("features", 1)[0]);
  if (n_features < 0 || n_features > 1'000'000) ModelReader::corrupt("bad feature count");
  bool any_missing = false;
  std::vector<double> impute;
  for (long long j = 0; j < n_features; ++j) {
    const auto tok = r.expect("feature", 2);
    model.feature_names.push_back(tok[0]);
    if (tok[1] == "NA") {
      any_missing = true;
    } else {
      impute.push_back(ModelReader::number(tok[1]));
    }
  }
  if (!any_missing) model.impute_values = std::move(impute);
  else if (!impute.empty()) ModelReader::corrupt("imputation values must be all present or all NA");

  const long long stages = ModelReader::integer(r.expect("stages", 1)[0]);
  if (stages < 0 || stages > 1'000'000) ModelReader::corrupt("bad stage count");
  for (long long t = 0; t < stages; ++t) {
    const auto head = r.expect("stage", 3);
    model.alphas.push_back(ModelReader::number(head[0]));
    const long long n_nodes = ModelReader::integer(head[1]);
    if (n_nodes < 1 || n_nodes > 1'000'000) ModelReader::corrupt("bad node count");
    DecisionTree tree;
    tree.max_depth = static_cast<int>(ModelReader::integer(head[2]));
    for (long long k = 0; k < n_nodes; ++k) {
      const auto tok = r.expect("node", 7);
      TreeNode node;
      node.feature = static_cast<int>(ModelReader::integer(tok[0]));
      node.threshold = ModelReader::number(tok[1]);
      node.left = static_cast<int>(ModelReader::integer(tok[2]));
      node.right = static_cast<int>(ModelReader::integer(tok[3]));
      node.label = static_cast<int>(ModelReader::integer(tok[4]));
      node.probabilities = {ModelReader::number(tok[5]), ModelReader::number(tok[6])};
      tree.nodes.push_back(node);
    }
    tree.validate(model.feature_names.size());
    model.trees.push_back(std::move(tree));
  }
  r.expect("end", 0);
  return model;
}

AdaBoostModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return load_model(in);
}

}  // namespace affect
