#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affect/ema_gate.hpp"
#include "affect/eval.hpp"
#include "affect/features.hpp"
#include "affect/preprocess.hpp"
#include "affect/synth.hpp"

namespace affect {

/// Every tunable of the pipeline. Defaults are the documented ones.
///
/// File format: one `key = value` per line, `#` starts a comment. Keys:
///   seed, jobs, window_seconds,
///   winsor_lower, winsor_upper, filter_cutoff_hz, filter_order, filter_method,
///   scr_threshold, var_eps, corr_max, smote_k,
///   boost_rounds, tree_depth, tree_min_leaf, cv_folds, test_fraction,
///   synth_strong, synth_neutral, synth_mistake, synth_delay_too_large,
///   synth_sessions, ema_min_idle, ema_ask_probability
struct PipelineConfig {
  std::uint64_t seed = 7;
  unsigned jobs = 1;  // never changes results, so it is not part of the hash
  double window_seconds = kWindowSeconds;
  PreprocessConfig preprocess;
  FeatureConfig features;
  ModelingConfig modeling;
  std::size_t cv_folds = 5;
  double test_fraction = 0.2;
  SynthConfig synth;
  double ema_min_idle = 1800.0;
  double ema_ask_probability = 0.5;

  /// Sets one key from text; throws Config for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  /// Canonical key/value listing (excluding jobs), in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  /// FNV-1a over the canonical listing, as 16 hex digits.
  std::string hash() const;

  void validate() const;
};

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Applies "key=value" overrides in order.
void apply_overrides(PipelineConfig& config, const std::vector<std::string>& overrides);

std::string render_config(const PipelineConfig& config);

}  // namespace affect
