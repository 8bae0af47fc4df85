#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace affect {

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so outputs could
/// differ between standard libraries. The engine itself is fully specified;
/// the draws below are built directly on its raw 64-bit output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be > 0.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed (splitmix64 finalizer over seed and stream id).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace affect
