#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affect/util.hpp"

namespace affect {

/// Placeholder for a feature that is undefined for a window (for example
/// HRV when too few beats were found). Replaced by training-set medians
/// before any model sees the data.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Named feature values for one window.
struct FeatureVector {
  std::string event_id;
  int label = 0;
  std::vector<std::string> names;
  std::vector<double> values;

  /// Value of a named feature, if present.
  std::optional<double> get(const std::string& name) const;
};

struct FeatureRow {
  std::string event_id;
  int label = 0;
  std::vector<double> values;  // aligned with FeatureMatrix::feature_names
};

/// Rectangular dataset: one row per window, one column per feature.
struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<FeatureRow> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_features() const { return feature_names.size(); }

  std::vector<int> labels() const;
  std::vector<double> column(std::size_t j) const;
  std::size_t count_label(int label) const;

  /// Column index of a feature name, if present.
  std::optional<std::size_t> index_of(const std::string& name) const;

  FeatureMatrix subset(std::span<const std::size_t> row_indices) const;

  /// Columns re-ordered to `names`; throws FeatureMismatch when one is absent.
  FeatureMatrix select_columns(std::span<const std::string> names) const;

  FeatureVector vector(std::size_t i) const;

  /// Throws if ragged or a label is not 0/1.
  void validate() const;

  static FeatureMatrix from_vectors(std::span<const FeatureVector> vectors);
};

/// CSV: optional "# key=value" stamp lines, then
/// header event_id,label,<feature names...>; missing values written as NA.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix,
                       const std::optional<ArtifactStamp>& stamp = std::nullopt);
FeatureMatrix read_feature_csv(std::istream& in, const std::string& source = "<stream>");

}  // namespace affect
