#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "affect/rng.hpp"

namespace affect {

/// Prompt-gating policy for detected strong-affect instants: a minimum idle
/// time since the last prompt, then a random ask with fixed probability.
struct GatePolicy {
  double min_idle = 1800.0;        // seconds
  double ask_probability = 0.5;    // in (0, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

enum class GateDecision { Prompt, Suppress };

enum class SuppressCause { None, Idle, Random };

std::string_view to_string(GateDecision d) noexcept;
std::string_view to_string(SuppressCause c) noexcept;

struct GateStep;
/// Running state for one participant.
class GateState {
 public:
  explicit GateState(const GatePolicy& policy) : rng_(policy.seed) {}

  std::optional<double> last_prompt_time() const { return last_prompt_; }
  std::optional<double> last_detection_time() const { return last_detection_; }

 private:
  friend GateStep gate_step(const GatePolicy& policy, GateState state, double t);

  std::optional<double> last_prompt_;
  std::optional<double> last_detection_;
  Rng rng_;
};

struct GateStep {
  GateDecision decision = GateDecision::Suppress;
  SuppressCause cause = SuppressCause::None;
  GateState state;
};

/// Idle check first; only idle-eligible detections consume a random draw.
/// Any prompt resets the idle timer. Throws NonMonotoneTime when t goes
/// backwards.
GateStep gate_step(const GatePolicy& policy, GateState state, double t);

struct GateRecord {
  double time = 0.0;
  GateDecision decision = GateDecision::Suppress;
  SuppressCause cause = SuppressCause::None;
};

struct GateSummary {
  std::size_t detections = 0;
  std::size_t eligible = 0;  // passed the idle check
  std::size_t prompts = 0;
  std::size_t suppressed_idle = 0;
  std::size_t suppressed_random = 0;
};

struct GateRun {
  std::vector<GateRecord> decisions;
  GateSummary summary;
};

GateRun simulate_gate(const GatePolicy& policy, std::span<const double> detections);

/// One timestamp per line; blank lines and '#' comments skipped.
std::vector<double> read_detections(std::istream& in, const std::string& source = "<stream>");

/// time,decision,cause
void write_decisions(std::ostream& out, const GateRun& run);

}  // namespace affect
