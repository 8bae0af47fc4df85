#include "affect/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "affect/error.hpp"
#include "affect/features.hpp"
#include "affect/rng.hpp"
#include "affect/sampling.hpp"
#include "affect/util.hpp"

namespace affect {

Confusion& Confusion::operator+=(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

Confusion confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "label vectors differ in length");
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    }
    if (t == 1) {
      (p == 1 ? c.tp : c.fn) += 1;
    } else {
      (p == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

std::optional<double> precision(const Confusion& c) {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> recall(const Confusion& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1_score(const Confusion& c) {
  if (c.tp == 0) {
    if (c.fp == 0 && c.fn == 0) {
      throw Error(ErrorCode::F1Undefined, "no positive labels and no positive predictions");
    }
    return 0.0;
  }
  const double p = *precision(c);
  const double r = *recall(c);
  return 2.0 * p * r / (p + r);
}

std::optional<double> f1_if_defined(const Confusion& c) {
  if (c.tp == 0 && c.fp == 0 && c.fn == 0) return std::nullopt;
  return f1_score(c);
}

Metrics Metrics::from(const Confusion& c) {
  return Metrics{c, affect::precision(c), affect::recall(c), f1_if_defined(c)};
}

FittedClassifier fit_classifier(const FeatureMatrix& train, const ModelingConfig& config,
                                std::uint64_t seed) {
  FeatureMatrix imputed = train;
  const MedianImputer imputer = MedianImputer::fit(train);
  imputer.apply(imputed);
  const FeatureSelection selection = select_features(imputed, config.var_eps, config.corr_max);
  const SmoteResult balanced = smote(selection.reduced, config.smote_k, derive_seed(seed, 11));

  // every synthetic row must come from training rows of the minority class
  for (const auto& o : balanced.origins) {
    if (o.base >= selection.reduced.n_rows() || o.neighbor >= selection.reduced.n_rows() ||
        selection.reduced.rows[o.base].label != balanced.minority_label ||
        selection.reduced.rows[o.neighbor].label != balanced.minority_label) {
      throw Error(ErrorCode::InternalInvariant, "synthetic row with foreign provenance");
    }
  }

  FittedClassifier out;
  out.model = train_adaboost(balanced.balanced, config.boost, seed);
  out.model.impute_values.clear();
  for (const auto& name : out.model.feature_names) {
    out.model.impute_values.push_back(imputer.medians[*train.index_of(name)]);
  }
  out.n_synthetic = balanced.origins.size();
  out.n_train_rows = train.n_rows();
  return out;
}

std::vector<int> predict_matrix(const AdaBoostModel& model, const FeatureMatrix& matrix) {
  const FeatureMatrix cols = matrix.select_columns(model.feature_names);
  std::vector<int> out;
  out.reserve(cols.n_rows());
  for (const auto& r : cols.rows) out.push_back(predict_values(model, r.values).label);
  return out;
}

namespace {

void assert_disjoint(const FeatureMatrix& train, const FeatureMatrix& held_out) {
  std::set<std::string> ids;
  for (const auto& r : train.rows) ids.insert(r.event_id);
  for (const auto& r : held_out.rows) {
    if (ids.count(r.event_id) != 0) {
      throw Error(ErrorCode::InternalInvariant,
                  "row " + r.event_id + " is on both the fitting and the scoring side");
    }
  }
}

}  // namespace

EvalReport cross_validate(const FeatureMatrix& train, std::size_t k, const ModelingConfig& config,
                          std::uint64_t seed, const CvHooks& hooks, unsigned jobs) {
  train.validate();
  const std::vector<int> labels = train.labels();
  const std::vector<Fold> folds = kfold_indices(labels, k, derive_seed(seed, 1));

  EvalReport report;
  report.seed = seed;
  report.folds.resize(folds.size());
  parallel_for(folds.size(), jobs, [&](std::size_t f) {
    const FeatureMatrix fit_rows = train.subset(folds[f].train);
    FeatureMatrix valid_rows = train.subset(folds[f].valid);
    if (hooks.on_validation) hooks.on_validation(valid_rows, f);
    assert_disjoint(fit_rows, valid_rows);

    const FittedClassifier fitted = fit_classifier(fit_rows, config, derive_seed(seed, 100 + f));
    const std::vector<int> predicted = predict_matrix(fitted.model, valid_rows);
    FoldReport& fr = report.folds[f];
    fr.fold = f;
    fr.n_train = fit_rows.n_rows();
    fr.n_valid = valid_rows.n_rows();
    fr.n_synthetic = fitted.n_synthetic;
    fr.n_features = fitted.model.feature_names.size();
    fr.metrics = Metrics::from(confusion(valid_rows.labels(), predicted));
  });

  Confusion pooled;
  for (const auto& fr : report.folds) pooled += fr.metrics.counts;
  report.pooled = Metrics::from(pooled);
  return report;
}

HoldoutReport evaluate_holdout(const FeatureMatrix& train, const FeatureMatrix& test,
                               const ModelingConfig& config, std::uint64_t seed,
                               FittedClassifier* fitted) {
  assert_disjoint(train, test);
  FittedClassifier local = fit_classifier(train, config, derive_seed(seed, 2));
  const std::vector<int> predicted = predict_matrix(local.model, test);
  HoldoutReport out;
  out.n_train = train.n_rows();
  out.n_test = test.n_rows();
  out.n_features = local.model.feature_names.size();
  out.metrics = Metrics::from(confusion(test.labels(), predicted));
  if (fitted != nullptr) *fitted = std::move(local);
  return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json metrics_json(const Metrics& m) {
  Json j;
  j["tp"] = m.counts.tp;
  j["fp"] = m.counts.fp;
  j["tn"] = m.counts.tn;
  j["fn"] = m.counts.fn;
  j["precision"] = optional_number(m.precision);
  j["recall"] = optional_number(m.recall);
  j["f1"] = optional_number(m.f1);
  return j;
}

std::string csv_number(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

}  // namespace

std::string report_json(const EvalReport& report) {
  Json j;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["positive_class"] = "strong";
  j["cv"]["folds"] = report.folds.size();
  j["cv"]["pooled"] = metrics_json(report.pooled);
  Json folds = Json::array();
  for (const auto& f : report.folds) {
    Json fj;
    fj["fold"] = f.fold;
    fj["n_train"] = f.n_train;
    fj["n_valid"] = f.n_valid;
    fj["n_synthetic"] = f.n_synthetic;
    fj["n_features"] = f.n_features;
    fj["metrics"] = metrics_json(f.metrics);
    folds.push_back(std::move(fj));
  }
  j["cv"]["per_fold"] = std::move(folds);
  if (report.holdout) {
    j["holdout"]["n_train"] = report.holdout->n_train;
    j["holdout"]["n_test"] = report.holdout->n_test;
    j["holdout"]["n_features"] = report.holdout->n_features;
    j["holdout"]["metrics"] = metrics_json(report.holdout->metrics);
  } else {
    j["holdout"] = nullptr;
  }
  if (!report.dataset.empty()) {
    Json ds = Json::object();
    for (const auto& [k, v] : report.dataset) ds[k] = v;
    j["dataset"] = std::move(ds);
  }
  Json cfg = Json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = std::move(cfg);
  return j.dump(2) + "\n";
}

std::string folds_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "# config_hash=" << report.config_hash << '\n';
  out << "# seed=" << report.seed << '\n';
  out << "fold,n_train,n_valid,n_synthetic,n_features,tp,fp,tn,fn,precision,recall,f1\n";
  const auto line = [&](const std::string& name, std::size_t n_train, std::size_t n_valid,
                        std::size_t n_syn, std::size_t n_feat, const Metrics& m) {
    out << name << ',' << n_train << ',' << n_valid << ',' << n_syn << ',' << n_feat << ','
        << m.counts.tp << ',' << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn << ','
        << csv_number(m.precision) << ',' << csv_number(m.recall) << ',' << csv_number(m.f1)
        << '\n';
  };
  std::size_t valid_total = 0;
  for (const auto& f : report.folds) {
    line(std::to_string(f.fold), f.n_train, f.n_valid, f.n_synthetic, f.n_features, f.metrics);
    valid_total += f.n_valid;
  }
  out << "pooled,NA," << valid_total << ",NA,NA," << report.pooled.counts.tp << ','
      << report.pooled.counts.fp << ',' << report.pooled.counts.tn << ','
      << report.pooled.counts.fn << ',' << csv_number(report.pooled.precision) << ','
      << csv_number(report.pooled.recall) << ',' << csv_number(report.pooled.f1) << '\n';
  return out.str();
}

}  // namespace affect
