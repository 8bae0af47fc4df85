#include "affect/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "affect/error.hpp"
#include "affect/ingest.hpp"
#include "affect/util.hpp"

namespace affect {

namespace {

double as_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  if (!parse_double(value, v) || !std::isfinite(v)) {
    throw Error(ErrorCode::Config, std::string(key) + ": expected a number, got '" +
                                       std::string(value) + "'");
  }
  return v;
}

std::uint64_t as_uint(std::string_view key, std::string_view value) {
  value = trim(value);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::Config, std::string(key) + ": expected a non-negative integer, got '" +
                                       std::string(value) + "'");
  }
  return v;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "seed") {
    seed = as_uint(key, value);
    synth.seed = seed;
  } else if (key == "jobs") {
    jobs = static_cast<unsigned>(as_uint(key, value));
  } else if (key == "window_seconds") {
    window_seconds = as_double(key, value);
  } else if (key == "winsor_lower") {
    preprocess.winsor_lower = as_double(key, value);
  } else if (key == "winsor_upper") {
    preprocess.winsor_upper = as_double(key, value);
  } else if (key == "filter_cutoff_hz") {
    preprocess.filter_cutoff_hz = as_double(key, value);
  } else if (key == "filter_order") {
    preprocess.filter_order = static_cast<int>(as_uint(key, value));
  } else if (key == "filter_method") {
    preprocess.filter_method = parse_filter_method(value);
  } else if (key == "scr_threshold") {
    features.scr_threshold = as_double(key, value);
  } else if (key == "var_eps") {
    modeling.var_eps = as_double(key, value);
  } else if (key == "corr_max") {
    modeling.corr_max = as_double(key, value);
  } else if (key == "smote_k") {
    modeling.smote_k = as_uint(key, value);
  } else if (key == "boost_rounds") {
    modeling.boost.rounds = static_cast<int>(as_uint(key, value));
  } else if (key == "tree_depth") {
    modeling.boost.tree.max_depth = static_cast<int>(as_uint(key, value));
  } else if (key == "tree_min_leaf") {
    modeling.boost.tree.min_leaf = as_uint(key, value);
  } else if (key == "cv_folds") {
    cv_folds = as_uint(key, value);
  } else if (key == "test_fraction") {
    test_fraction = as_double(key, value);
  } else if (key == "synth_strong") {
    synth.n_strong = as_uint(key, value);
  } else if (key == "synth_neutral") {
    synth.n_neutral = as_uint(key, value);
  } else if (key == "synth_mistake") {
    synth.n_mistake = as_uint(key, value);
  } else if (key == "synth_delay_too_large") {
    synth.n_delay_too_large = as_uint(key, value);
  } else if (key == "synth_sessions") {
    synth.n_sessions = as_uint(key, value);
  } else if (key == "ema_min_idle") {
    ema_min_idle = as_double(key, value);
  } else if (key == "ema_ask_probability") {
    ema_ask_probability = as_double(key, value);
  } else {
    throw Error(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const {
  const auto num = [](double v) { return format_double(v); };
  return {
      {"seed", std::to_string(seed)},
      {"window_seconds", num(window_seconds)},
      {"winsor_lower", num(preprocess.winsor_lower)},
      {"winsor_upper", num(preprocess.winsor_upper)},
      {"filter_cutoff_hz", num(preprocess.filter_cutoff_hz)},
      {"filter_order", std::to_string(preprocess.filter_order)},
      {"filter_method", std::string(to_string(preprocess.filter_method))},
      {"scr_threshold", num(features.scr_threshold)},
      {"var_eps", num(modeling.var_eps)},
      {"corr_max", num(modeling.corr_max)},
      {"smote_k", std::to_string(modeling.smote_k)},
      {"boost_rounds", std::to_string(modeling.boost.rounds)},
      {"tree_depth", std::to_string(modeling.boost.tree.max_depth)},
      {"tree_min_leaf", std::to_string(modeling.boost.tree.min_leaf)},
      {"cv_folds", std::to_string(cv_folds)},
      {"test_fraction", num(test_fraction)},
      {"synth_strong", std::to_string(synth.n_strong)},
      {"synth_neutral", std::to_string(synth.n_neutral)},
      {"synth_mistake", std::to_string(synth.n_mistake)},
      {"synth_delay_too_large", std::to_string(synth.n_delay_too_large)},
      {"synth_sessions", std::to_string(synth.n_sessions)},
      {"ema_min_idle", num(ema_min_idle)},
      {"ema_ask_probability", num(ema_ask_probability)},
  };
}

std::string PipelineConfig::hash() const {
  std::string canonical;
  for (const auto& [k, v] : entries()) canonical += k + "=" + v + "\n";
  return hex64(fnv1a64(canonical));
}

void PipelineConfig::validate() const {
  const auto fail = [](const std::string& why) { throw Error(ErrorCode::Config, why); };
  if (!(window_seconds > 0.0)) fail("window_seconds must be > 0");
  if (!(preprocess.winsor_lower >= 0.0 && preprocess.winsor_lower < preprocess.winsor_upper &&
        preprocess.winsor_upper <= 1.0)) {
    fail("need 0 <= winsor_lower < winsor_upper <= 1");
  }
  if (!(preprocess.filter_cutoff_hz > 0.0)) fail("filter_cutoff_hz must be > 0");
  if (preprocess.filter_order < 1) fail("filter_order must be >= 1");
  if (!(features.scr_threshold > 0.0)) fail("scr_threshold must be > 0");
  if (!(modeling.corr_max > 0.0 && modeling.corr_max <= 1.0)) fail("corr_max must lie in (0, 1]");
  if (modeling.var_eps < 0.0) fail("var_eps must be >= 0");
  if (modeling.smote_k < 1) fail("smote_k must be >= 1");
  if (modeling.boost.rounds < 1) fail("boost_rounds must be >= 1");
  if (modeling.boost.tree.max_depth < 1) fail("tree_depth must be >= 1");
  if (modeling.boost.tree.min_leaf < 1) fail("tree_min_leaf must be >= 1");
  if (cv_folds < 2) fail("cv_folds must be >= 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail("test_fraction must lie in (0, 1)");
  if (!(ema_min_idle > 0.0)) fail("ema_min_idle must be > 0");
  if (!(ema_ask_probability > 0.0 && ema_ask_probability <= 1.0)) {
    fail("ema_ask_probability must lie in (0, 1]");
  }
}

PipelineConfig parse_config(std::string_view text, const std::string& source) {
  PipelineConfig cfg;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Config, source + ": line " + std::to_string(line_no) +
                                         ": expected key = value");
    }
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.string());
}

void apply_overrides(PipelineConfig& config, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Config, "override '" + o + "' lacks '='");
    config.set(std::string_view(o).substr(0, eq), std::string_view(o).substr(eq + 1));
  }
}

std::string render_config(const PipelineConfig& config) {
  std::ostringstream out;
  out << "# config_hash=" << config.hash() << '\n';
  for (const auto& [k, v] : config.entries()) out << k << " = " << v << '\n';
  return out.str();
}

}  // namespace affect
