#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affect/dataset.hpp"
#include "affect/model.hpp"

namespace affect {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  Confusion& operator+=(const Confusion& other);
  bool operator==(const Confusion&) const = default;
};

/// Positive class is label 1 (strong affect).
Confusion confusion(std::span<const int> truth, std::span<const int> predicted);

std::optional<double> precision(const Confusion& c);
std::optional<double> recall(const Confusion& c);

/// Harmonic mean of precision and recall. 0 when tp = 0 but fp or fn is
/// non-zero; throws F1Undefined when tp = fp = fn = 0.
double f1_score(const Confusion& c);

/// Same as f1_score but empty instead of throwing.
std::optional<double> f1_if_defined(const Confusion& c);

/// Everything fitted on the training side: imputation, selection, SMOTE,
/// boosting.
struct ModelingConfig {
  double var_eps = 1e-10;
  double corr_max = 0.95;
  std::size_t smote_k = 5;
  BoostParams boost;
};

struct FittedClassifier {
  AdaBoostModel model;  // carries the kept feature names and their medians
  std::size_t n_synthetic = 0;
  std::size_t n_train_rows = 0;
};

/// Fits impute -> select -> SMOTE -> AdaBoost on `train` only.
FittedClassifier fit_classifier(const FeatureMatrix& train, const ModelingConfig& config,
                                std::uint64_t seed);

/// Labels for every row of `matrix` (any column superset of the model's).
std::vector<int> predict_matrix(const AdaBoostModel& model, const FeatureMatrix& matrix);

struct Metrics {
  Confusion counts;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  static Metrics from(const Confusion& c);
};

struct FoldReport {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_valid = 0;
  std::size_t n_synthetic = 0;
  std::size_t n_features = 0;
  Metrics metrics;
};

struct HoldoutReport {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_features = 0;
  Metrics metrics;
};

struct EvalReport {
  Metrics pooled;  // from the sum of per-fold confusions
  std::vector<FoldReport> folds;
  std::optional<HoldoutReport> holdout;
  std::vector<std::pair<std::string, std::string>> config;  // snapshot
  std::vector<std::pair<std::string, std::size_t>> dataset;  // row bookkeeping, optional
  std::string config_hash = "-";
  std::uint64_t seed = 0;
};

struct CvHooks {
  /// Called on each fold's validation rows before prediction.
  std::function<void(FeatureMatrix& valid, std::size_t fold)> on_validation;
};

/// Stratified k-fold CV on `train`. Each fold fits its whole pipeline on its
/// own training rows only; validation rows are only ever predicted.
EvalReport cross_validate(const FeatureMatrix& train, std::size_t k, const ModelingConfig& config,
                          std::uint64_t seed, const CvHooks& hooks = {}, unsigned jobs = 1);

/// Refits on all of `train` and scores `test` once.
HoldoutReport evaluate_holdout(const FeatureMatrix& train, const FeatureMatrix& test,
                               const ModelingConfig& config, std::uint64_t seed,
                               FittedClassifier* fitted = nullptr);

/// Deterministic JSON document.
std::string report_json(const EvalReport& report);

/// One line per fold plus a pooled line, with "# key=value" stamp lines.
std::string folds_csv(const EvalReport& report);

}  // namespace affect
