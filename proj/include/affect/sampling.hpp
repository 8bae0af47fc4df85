#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "affect/dataset.hpp"

namespace affect {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Per class, round(count * test_fraction) rows go to the test side, chosen
/// by a seeded shuffle. Every class needs at least 2 rows.
SplitIndices stratified_split(std::span<const int> labels, double test_fraction,
                              std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> valid;  // ascending
};

/// Stratified k-fold: each class is shuffled, the classes are concatenated
/// and position p lands in fold p mod k. Every class needs at least k rows.
std::vector<Fold> kfold_indices(std::span<const int> labels, std::size_t k, std::uint64_t seed);

/// Where a synthetic row came from: row = base + u * (neighbor - base).
/// Indices refer to rows of the input matrix.
struct SyntheticOrigin {
  std::size_t base = 0;
  std::size_t neighbor = 0;
  double u = 0.0;
};

struct SmoteResult {
  FeatureMatrix balanced;  // original rows first, unchanged, then synthetic rows
  std::vector<SyntheticOrigin> origins;  // one per synthetic row, in order
  int minority_label = 0;
};

/// The k nearest rows to `row` among `pool` (excluding `row`) under Euclidean
/// distance, ties broken by lower row index.
std::vector<std::size_t> nearest_neighbors(const FeatureMatrix& matrix,
                                           std::span<const std::size_t> pool, std::size_t row,
                                           std::size_t k);

/// Synthetic minority oversampling until both classes have equal counts.
/// Base rows are taken in rounds over a seeded permutation of the minority
/// class; each draw picks one of the base's k nearest minority neighbours
/// and u ~ U(0, 1). Throws MinorityTooSmall unless minority count > k.
SmoteResult smote(const FeatureMatrix& train, std::size_t k_neighbors, std::uint64_t seed);

}  // namespace affect
