#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "affect/dataset.hpp"

namespace affect {

/// Internal nodes route x[feature] <= threshold to `left`. Leaves have
/// feature == -1 and carry the weighted class distribution.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
  std::array<double, 2> probabilities{0.5, 0.5};

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // root at index 0
  int max_depth = 1;

  int predict(std::span<const double> x) const;
  /// Throws CorruptModel if the node graph is malformed.
  void validate(std::size_t n_features) const;
};

struct TreeParams {
  int max_depth = 3;
  std::size_t min_leaf = 1;
};

/// Greedy CART with weighted Gini impurity. Candidate thresholds are the
/// midpoints of consecutive distinct sorted values; ties go to the lowest
/// feature index, then the lowest threshold. Leaves predict the weighted
/// majority (ties -> class 0).
DecisionTree train_tree(const FeatureMatrix& matrix, std::span<const double> weights,
                        const TreeParams& params);

struct BoostParams {
  int rounds = 100;
  TreeParams tree;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int rounds_requested = 0;
  std::string config_hash = "-";
  std::string stop_reason = "completed";
  int max_depth = 0;
  std::size_t min_leaf = 1;
};

struct AdaBoostModel {
  std::vector<DecisionTree> trees;
  std::vector<double> alphas;
  std::vector<std::string> feature_names;
  /// Substitutes for missing inputs, aligned with feature_names. Empty means
  /// missing inputs are rejected.
  std::vector<double> impute_values;
  TrainingMeta meta;
};

/// Per-round record of a training run, used for verification.
struct BoostTrace {
  std::vector<double> errors;
  std::vector<double> alphas;
  std::vector<std::vector<double>> weights;  // normalized weights after each update
  double training_error = 0.0;
  double error_bound = 1.0;  // product of 2 sqrt(eps (1 - eps)) over kept rounds
};

/// Stage weight for a round with zero weighted error.
double capped_alpha();

/// Discrete two-class AdaBoost. Stops early on a perfect round (kept with
/// capped_alpha()) or a round with error >= 0.5 (discarded). Throws
/// DegenerateRound when the very first round is discarded, and
/// InternalInvariant if the training error exceeds the boosting bound.
AdaBoostModel train_adaboost(const FeatureMatrix& matrix, const BoostParams& params,
                             std::uint64_t seed, BoostTrace* trace = nullptr);

struct Prediction {
  int label = 0;
  double score = 0.0;
};

/// score = sum alpha_t h_t(x) with h_t in {-1, +1}; label 1 iff score > 0.
Prediction predict(const AdaBoostModel& model, const FeatureVector& x);

/// Values already in model feature order.
Prediction predict_values(const AdaBoostModel& model, std::span<const double> values);

inline constexpr std::string_view kModelMagic = "AFFECT-ADABOOST";
inline constexpr int kModelVersion = 1;

void save_model(const AdaBoostModel& model, std::ostream& out);
void save_model(const AdaBoostModel& model, const std::filesystem::path& path);
AdaBoostModel load_model(std::istream& in);
AdaBoostModel load_model(const std::filesystem::path& path);

std::string serialize_model(const AdaBoostModel& model);
std::uint64_t model_hash(const AdaBoostModel& model);

}  // namespace affect
