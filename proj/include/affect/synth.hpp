#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "affect/ingest.hpp"
#include "affect/signal.hpp"

namespace affect {

struct SynthNoise {
  double bvp = 0.02;    // fraction of pulse amplitude
  double eda = 2e-5;    // microsiemens
  double skt = 0.003;   // degrees C
  double acc = 0.01;    // g
};

struct SynthConfig {
  std::size_t n_strong = 206;
  std::size_t n_neutral = 75;
  std::size_t n_mistake = 13;
  std::size_t n_delay_too_large = 0;  // extra strong/neutral rows with delay > 60 s
  std::uint64_t seed = 7;
  std::size_t n_sessions = 11;

  double bvp_rate = 64.0;
  double eda_rate = 4.0;
  double skt_rate = 4.0;
  double acc_rate = 32.0;

  double event_spacing = 120.0;  // seconds between consecutive events in a session
  double baseline_hr_min = 60.0;
  double baseline_hr_max = 75.0;
  double hr_shift_min = 15.0;
  double hr_shift_max = 25.0;
  double start_epoch = 1590000000.0;
  SynthNoise noise;
};

struct InjectedBurst {
  double apex_time = 0.0;
  double amplitude = 0.0;  // microsiemens
};

/// What the generator put into the signals for one annotation row.
struct GroundTruthEvent {
  std::string event_id;
  std::string session_id;
  AffectLabel label = AffectLabel::Neutral;  // as annotated
  bool aroused = false;  // physiology carries the strong-affect response
  double event_time = 0.0;
  double tag_time = 0.0;
  double delay = 0.0;
  double baseline_hr = 0.0;  // bpm
  double hr_shift = 0.0;     // bpm, 0 for non-aroused events
  std::vector<InjectedBurst> bursts;
};

struct Corpus {
  std::vector<SessionRecording> sessions;
  std::vector<AnnotationRow> annotations;  // file order
  std::vector<GroundTruthEvent> truth;     // aligned with annotations
};

/// Skin-conductance response: raised-cosine rise over 1 s to the apex, then
/// exponential decay with a 4 s time constant.
double scr_shape(double t, double apex_time, double amplitude);

/// Deterministic in the seed. Every session is written even when it holds
/// no events. Strong-affect windows carry 1-3 SCR bursts and
/// a 15-25 bpm heart-rate rise over the 60 s before the event.
Corpus generate_corpus(const SynthConfig& config, unsigned jobs = 1);

/// Writes sessions/<id>/{BVP,EDA,TEMP,ACC,tags}.csv, annotations.csv and
/// ground_truth.csv under `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, unsigned jobs = 1);

}  // namespace affect
