#include <doctest.h>

#include <limits>
#include <sstream>

#include "affect/ema_gate.hpp"
#include "affect/rng.hpp"
#include "support.hpp"

using namespace affect;

namespace {

std::vector<GateDecision> decisions_of(const GateRun& run) {
  std::vector<GateDecision> d;
  for (const auto& r : run.decisions) d.push_back(r.decision);
  return d;
}

std::vector<double> poisson_times(std::size_t n, double mean_gap, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> t;
  double now = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    now += -mean_gap * std::log(1.0 - rng.uniform());
    t.push_back(now);
  }
  return t;
}

}  // namespace

TEST_CASE("idle rule with certain asking") {
  const GatePolicy p{600.0, 1.0, 1};
  const GateRun run = simulate_gate(p, std::vector<double>{0.0, 300.0, 700.0});
  CHECK(decisions_of(run) ==
        std::vector<GateDecision>{GateDecision::Prompt, GateDecision::Suppress, GateDecision::Prompt});
  CHECK(run.decisions[1].cause == SuppressCause::Idle);
  CHECK(run.summary.prompts == 2);
  CHECK(run.summary.suppressed_idle == 1);
}

TEST_CASE("first detection prompts when asking is certain") {
  const GatePolicy p{1800.0, 1.0, 9};
  GateState s(p);
  const GateStep step = gate_step(p, s, 12.0);
  CHECK(step.decision == GateDecision::Prompt);
  CHECK(step.state.last_prompt_time() == 12.0);
}

TEST_CASE("empty stream and huge idle time") {
  const GatePolicy p{1e9, 1.0, 2};
  CHECK(simulate_gate(p, std::vector<double>{}).decisions.empty());
  const GateRun run = simulate_gate(p, poisson_times(1000, 60.0, 3));
  CHECK(run.summary.prompts <= 1);
}

TEST_CASE("time must not go backwards") {
  const GatePolicy p{10.0, 0.5, 1};
  CHECK(test::throws_code([&] { simulate_gate(p, std::vector<double>{5.0, 4.0}); },
                          ErrorCode::NonMonotoneTime));
  CHECK(simulate_gate(p, std::vector<double>{5.0, 5.0}).decisions.size() == 2);
}

TEST_CASE("policy validation") {
  CHECK(test::throws_code([] { GatePolicy{0.0, 0.5, 1}.validate(); }, ErrorCode::Config));
  CHECK(test::throws_code([] { GatePolicy{10.0, 0.0, 1}.validate(); }, ErrorCode::Config));
  CHECK(test::throws_code([] { GatePolicy{10.0, 1.5, 1}.validate(); }, ErrorCode::Config));
}

TEST_CASE("property: prompts are never closer than min_idle") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const GatePolicy p{rng.uniform(10.0, 3000.0), rng.uniform(0.05, 1.0), rng.next()};
    const GateRun run = simulate_gate(p, poisson_times(500, rng.uniform(1.0, 600.0), rng.next()));
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& d : run.decisions) {
      if (d.decision != GateDecision::Prompt) continue;
      CHECK(d.time - last >= p.min_idle);
      last = d.time;
    }
    const auto& s = run.summary;
    CHECK(s.prompts + s.suppressed_idle + s.suppressed_random == s.detections);
    CHECK(s.prompts + s.suppressed_random == s.eligible);
  }
}

TEST_CASE("property: dropping a randomly suppressed detection keeps the earlier decisions") {
  const GatePolicy p{120.0, 0.5, 17};
  const auto times = poisson_times(400, 90.0, 5);
  const GateRun full = simulate_gate(p, times);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < times.size() && checked < 20; ++i) {
    if (full.decisions[i].cause != SuppressCause::Random) continue;
    std::vector<double> cut = times;
    cut.erase(cut.begin() + static_cast<std::ptrdiff_t>(i));
    const GateRun partial = simulate_gate(p, cut);
    for (std::size_t j = 0; j < i; ++j) CHECK(partial.decisions[j].decision == full.decisions[j].decision);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("replay with the same seed is identical") {
  const GatePolicy p{300.0, 0.5, 77};
  const auto times = poisson_times(2000, 100.0, 8);
  std::ostringstream a, b;
  write_decisions(a, simulate_gate(p, times));
  write_decisions(b, simulate_gate(p, times));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("time,decision,cause\n", 0) == 0);
}

TEST_CASE("prompt fraction among idle-eligible detections is near one half") {
  const GatePolicy p{1.0, 0.5, 7};
  std::vector<double> times;
  for (int i = 0; i < 10000; ++i) times.push_back(10.0 * i);
  const GateRun run = simulate_gate(p, times);
  CHECK(run.summary.eligible == 10000);
  const double frac = static_cast<double>(run.summary.prompts) / static_cast<double>(run.summary.eligible);
  CHECK(frac >= 0.48);
  CHECK(frac <= 0.52);
}

TEST_CASE("detections file parsing") {
  std::istringstream in("time\n1.5\n\n# comment\n3\n");
  CHECK(read_detections(in) == std::vector<double>{1.5, 3.0});
  std::istringstream bad("1\nx\n");
  CHECK(test::throws_code([&] { read_detections(bad); }, ErrorCode::MalformedRow));
}
