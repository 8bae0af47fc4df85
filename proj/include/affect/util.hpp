#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace affect {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double value, int decimals);

/// Strict full-field parse; returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must be
/// independent. If items throw, the exception of the lowest failing index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace affect

namespace affect {

/// Provenance stamped into every artifact file written by the pipeline.
struct ArtifactStamp {
  std::string config_hash;
  std::uint64_t seed = 0;
};

}  // namespace affect
