#include "affect/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "affect/error.hpp"
#include "affect/rng.hpp"

namespace affect {

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

// Row indices per label, in ascending label order.
std::map<int, std::vector<std::size_t>> group_by_label(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

SplitIndices stratified_split(std::span<const int> labels, double test_fraction,
                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
  }
  const auto groups = group_by_label(labels);
  if (groups.size() < 2) throw Error(ErrorCode::ClassTooSmall, "split needs two classes");
  Rng rng(seed);
  SplitIndices out;
  for (const auto& [label, members] : groups) {
    if (members.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class " + std::to_string(label) + " has fewer than 2 rows");
    }
    std::vector<std::size_t> order = members;
    shuffle(order, rng);
    const auto n_test = static_cast<std::size_t>(
        std::lround(static_cast<double>(members.size()) * test_fraction));
    out.test.insert(out.test.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<Fold> kfold_indices(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
  const auto groups = group_by_label(labels);
  if (groups.size() < 2) throw Error(ErrorCode::ClassTooSmall, "folds need two classes");
  Rng rng(seed);
  std::vector<std::size_t> sequence;
  for (const auto& [label, members] : groups) {
    if (members.size() < k) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class " + std::to_string(label) + " has fewer rows than folds");
    }
    std::vector<std::size_t> order = members;
    shuffle(order, rng);
    sequence.insert(sequence.end(), order.begin(), order.end());
  }
  std::vector<std::size_t> fold_of(labels.size());
  for (std::size_t p = 0; p < sequence.size(); ++p) fold_of[sequence[p]] = p % k;

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (fold_of[i] == f ? folds[f].valid : folds[f].train).push_back(i);
    }
  }
  return folds;
}

std::vector<std::size_t> nearest_neighbors(const FeatureMatrix& matrix,
                                           std::span<const std::size_t> pool, std::size_t row,
                                           std::size_t k) {
  const auto& x = matrix.rows.at(row).values;
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(pool.size());
  for (std::size_t other : pool) {
    if (other == row) continue;
    const auto& y = matrix.rows.at(other).values;
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
    dist.emplace_back(d2, other);
  }
  const std::size_t take = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
  std::vector<std::size_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(dist[i].second);
  return out;
}

SmoteResult smote(const FeatureMatrix& train, std::size_t k_neighbors, std::uint64_t seed) {
  train.validate();
  if (k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
  SmoteResult out;
  out.balanced = train;
  const std::size_t ones = train.count_label(1);
  const std::size_t zeros = train.n_rows() - ones;
  out.minority_label = ones < zeros ? 1 : 0;
  const std::size_t n_min = std::min(ones, zeros);
  const std::size_t n_maj = std::max(ones, zeros);
  if (n_min == n_maj) return out;
  if (n_min <= k_neighbors) {
    throw Error(ErrorCode::MinorityTooSmall, "minority class has " + std::to_string(n_min) +
                                                 " rows, need more than k = " +
                                                 std::to_string(k_neighbors));
  }

  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    if (train.rows[i].label == out.minority_label) minority.push_back(i);
  }
  std::map<std::size_t, std::vector<std::size_t>> neighbours;
  for (std::size_t i : minority) neighbours[i] = nearest_neighbors(train, minority, i, k_neighbors);

  Rng rng(seed);
  const std::size_t needed = n_maj - n_min;
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < needed; ++s) {
    if (s % n_min == 0) {
      order = minority;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    }
    const std::size_t base = order[s % n_min];
    const auto& nn = neighbours[base];
    const std::size_t neighbor = nn[rng.index(nn.size())];
    const double u = rng.uniform();

    const auto& x = train.rows[base].values;
    const auto& y = train.rows[neighbor].values;
    FeatureRow row;
    row.event_id = "smote-" + std::to_string(s);
    row.label = out.minority_label;
    row.values.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) row.values[j] = x[j] + u * (y[j] - x[j]);
    out.balanced.rows.push_back(std::move(row));
    out.origins.push_back({base, neighbor, u});
  }
  return out;
}

}  // namespace affect
