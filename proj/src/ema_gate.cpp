#include "affect/ema_gate.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "affect/error.hpp"
#include "affect/util.hpp"

namespace affect {

void GatePolicy::validate() const {
  if (!(min_idle > 0.0)) throw Error(ErrorCode::Config, "min_idle must be > 0");
  if (!(ask_probability > 0.0 && ask_probability <= 1.0)) {
    throw Error(ErrorCode::Config, "ask_probability must lie in (0, 1]");
  }
}

std::string_view to_string(GateDecision d) noexcept {
  return d == GateDecision::Prompt ? "prompt" : "suppress";
}

std::string_view to_string(SuppressCause c) noexcept {
  switch (c) {
    case SuppressCause::None: return "none";
    case SuppressCause::Idle: return "idle";
    case SuppressCause::Random: return "random";
  }
  return "?";
}

GateStep gate_step(const GatePolicy& policy, GateState state, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::NonFiniteValue, "detection time is not finite");
  if (state.last_detection_ && t < *state.last_detection_) {
    throw Error(ErrorCode::NonMonotoneTime, "detection at " + format_double(t) +
                                                " precedes " + format_double(*state.last_detection_));
  }
  state.last_detection_ = t;
  if (state.last_prompt_ && t - *state.last_prompt_ < policy.min_idle) {
    return GateStep{GateDecision::Suppress, SuppressCause::Idle, std::move(state)};
  }
  if (!(state.rng_.uniform() < policy.ask_probability)) {
    return GateStep{GateDecision::Suppress, SuppressCause::Random, std::move(state)};
  }
  state.last_prompt_ = t;
  return GateStep{GateDecision::Prompt, SuppressCause::None, std::move(state)};
}

GateRun simulate_gate(const GatePolicy& policy, std::span<const double> detections) {
  policy.validate();
  GateRun run;
  GateState state(policy);
  run.decisions.reserve(detections.size());
  for (double t : detections) {
    GateStep step = gate_step(policy, std::move(state), t);
    state = std::move(step.state);
    run.decisions.push_back({t, step.decision, step.cause});
    ++run.summary.detections;
    switch (step.cause) {
      case SuppressCause::None:
        ++run.summary.eligible;
        ++run.summary.prompts;
        break;
      case SuppressCause::Random:
        ++run.summary.eligible;
        ++run.summary.suppressed_random;
        break;
      case SuppressCause::Idle:
        ++run.summary.suppressed_idle;
        break;
    }
  }
  return run;
}

std::vector<double> read_detections(std::istream& in, const std::string& source) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    double t = 0.0;
    if (!parse_double(text, t)) {
      // tolerate a single header line such as "time"
      if (out.empty() && line_no == 1) continue;
      throw Error(ErrorCode::MalformedRow, source + ": line " + std::to_string(line_no));
    }
    out.push_back(t);
  }
  return out;
}

void write_decisions(std::ostream& out, const GateRun& run) {
  out << "time,decision,cause\n";
  for (const auto& d : run.decisions) {
    out << format_double(d.time) << ',' << to_string(d.decision) << ',' << to_string(d.cause)
        << '\n';
  }
}

}  // namespace affect
