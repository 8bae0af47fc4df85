#include "affect/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "affect/error.hpp"
#include "affect/rng.hpp"
#include "affect/util.hpp"

namespace affect {

namespace fs = std::filesystem;

namespace {

constexpr double kLeadIn = 90.0;    // quiet time before the first event
constexpr double kTail = 300.0;     // room for late tags after the last event
constexpr double kRamp = 3.0;       // heart-rate transition time
constexpr double kPulseAmplitude = 50.0;

struct PlannedEvent {
  AffectLabel label;
  bool aroused;
  bool delayed;
};

double hr_envelope(double t, double event_time) {
  const double start = event_time - kWindowSeconds - kRamp;
  const double end = event_time + kRamp;
  if (t <= start - kRamp || t >= end + kRamp) return 0.0;
  if (t < start) return (t - (start - kRamp)) / kRamp;
  if (t > end) return ((end + kRamp) - t) / kRamp;
  return 1.0;
}

std::string session_name(std::size_t i) {
  std::ostringstream s;
  s << 's' << (i + 1 < 10 ? "0" : "") << (i + 1);
  return s.str();
}

std::string event_name(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  return "e" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

TimeSeriesChannel make_channel(ChannelKind kind, double start, double rate, double duration) {
  TimeSeriesChannel ch;
  ch.kind = kind;
  ch.start_time = start;
  ch.sampling_rate = rate;
  ch.samples.resize(static_cast<std::size_t>(std::llround(duration * rate)));
  return ch;
}

struct SessionPlan {
  std::string id;
  double start = 0.0;
  double duration = 0.0;
  std::vector<std::size_t> events;  // indices into truth
  double baseline_hr = 0.0;
  double eda_level = 0.0;
  double eda_slope = 0.0;
  double eda_wave_period = 0.0;
  double skt_level = 0.0;
  double skt_slope = 0.0;
  double phase = 0.0;
};

SessionRecording render_session(const SessionPlan& plan, const std::vector<GroundTruthEvent>& truth,
                                 const SynthConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  SessionRecording rec;
  rec.session_id = plan.id;

  // heart rate, then the pulse waveform by phase integration
  {
    TimeSeriesChannel bvp = make_channel(ChannelKind::Bvp, plan.start, cfg.bvp_rate, plan.duration);
    double phase = plan.phase;
    for (std::size_t i = 0; i < bvp.samples.size(); ++i) {
      const double t = bvp.time_at(i);
      double hr = plan.baseline_hr + 1.5 * std::sin(2.0 * std::numbers::pi * (t - plan.start) / 23.0);
      for (std::size_t e : plan.events) {
        if (truth[e].aroused) hr += truth[e].hr_shift * hr_envelope(t, truth[e].event_time);
      }
      const double pulse = std::sin(phase) + 0.15 * std::sin(2.0 * phase);
      bvp.samples[i] = kPulseAmplitude * (pulse + rng.normal(0.0, cfg.noise.bvp));
      phase += 2.0 * std::numbers::pi * (hr / 60.0) / cfg.bvp_rate;
    }
    rec.channels.emplace(ChannelKind::Bvp, std::move(bvp));
  }
  {
    TimeSeriesChannel eda = make_channel(ChannelKind::Eda, plan.start, cfg.eda_rate, plan.duration);
    for (std::size_t i = 0; i < eda.samples.size(); ++i) {
      const double t = eda.time_at(i);
      const double rel = t - plan.start;
      double v = plan.eda_level + plan.eda_slope * rel +
                 0.05 * std::sin(2.0 * std::numbers::pi * rel / plan.eda_wave_period);
      for (std::size_t e : plan.events) {
        for (const auto& b : truth[e].bursts) v += scr_shape(t, b.apex_time, b.amplitude);
      }
      eda.samples[i] = v + rng.normal(0.0, cfg.noise.eda);
    }
    rec.channels.emplace(ChannelKind::Eda, std::move(eda));
  }
  {
    TimeSeriesChannel skt = make_channel(ChannelKind::Skt, plan.start, cfg.skt_rate, plan.duration);
    for (std::size_t i = 0; i < skt.samples.size(); ++i) {
      const double rel = skt.time_at(i) - plan.start;
      skt.samples[i] = plan.skt_level + plan.skt_slope * rel + rng.normal(0.0, cfg.noise.skt);
    }
    rec.channels.emplace(ChannelKind::Skt, std::move(skt));
  }
  {
    TimeSeriesChannel x = make_channel(ChannelKind::AccX, plan.start, cfg.acc_rate, plan.duration);
    TimeSeriesChannel y = make_channel(ChannelKind::AccY, plan.start, cfg.acc_rate, plan.duration);
    TimeSeriesChannel z = make_channel(ChannelKind::AccZ, plan.start, cfg.acc_rate, plan.duration);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
      const double rel = x.time_at(i) - plan.start;
      x.samples[i] = 0.1 * std::sin(2.0 * std::numbers::pi * rel / 37.0) + rng.normal(0.0, cfg.noise.acc);
      y.samples[i] = 0.05 + rng.normal(0.0, cfg.noise.acc);
      z.samples[i] = 0.98 + rng.normal(0.0, cfg.noise.acc);
    }
    rec.channels.emplace(ChannelKind::AccX, std::move(x));
    rec.channels.emplace(ChannelKind::AccY, std::move(y));
    rec.channels.emplace(ChannelKind::AccZ, std::move(z));
  }

  for (std::size_t e : plan.events) rec.tags.push_back(truth[e].tag_time);
  std::sort(rec.tags.begin(), rec.tags.end());
  rec.tags.erase(std::unique(rec.tags.begin(), rec.tags.end()), rec.tags.end());
  return rec;
}

void write_signal(const fs::path& file, std::span<const TimeSeriesChannel* const> channels,
                  int decimals) {
  std::string text;
  const auto header = [&](const std::string& value) {
    for (std::size_t c = 0; c < channels.size(); ++c) {
      if (c > 0) text += ',';
      text += value;
    }
    text += '\n';
  };
  header(format_fixed(channels.front()->start_time, 6));
  header(format_double(channels.front()->sampling_rate));
  const std::size_t n = channels.front()->samples.size();
  text.reserve(text.size() + n * channels.size() * 12);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels.size(); ++c) {
      if (c > 0) text += ',';
      text += format_fixed(channels[c]->samples[i], decimals);
    }
    text += '\n';
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + file.string());
  out << text;
}

}  // namespace

double scr_shape(double t, double apex_time, double amplitude) {
  const double onset = apex_time - 1.0;
  if (t <= onset) return 0.0;
  if (t <= apex_time) return amplitude * 0.5 * (1.0 - std::cos(std::numbers::pi * (t - onset)));
  return amplitude * std::exp(-(t - apex_time) / 4.0);
}

Corpus generate_corpus(const SynthConfig& cfg, unsigned jobs) {
  if (cfg.hr_shift_min > cfg.hr_shift_max || cfg.baseline_hr_min > cfg.baseline_hr_max) {
    throw Error(ErrorCode::Config, "synthetic ranges must have min <= max");
  }
  Rng rng(cfg.seed);

  std::vector<PlannedEvent> plan;
  plan.insert(plan.end(), cfg.n_strong, {AffectLabel::Strong, true, false});
  plan.insert(plan.end(), cfg.n_neutral, {AffectLabel::Neutral, false, false});
  plan.insert(plan.end(), cfg.n_mistake, {AffectLabel::Mistake, false, false});
  for (std::size_t i = 0; i < cfg.n_delay_too_large; ++i) {
    const bool strong = i % 2 == 0;
    plan.push_back({strong ? AffectLabel::Strong : AffectLabel::Neutral, strong, true});
  }
  for (std::size_t i = plan.size(); i > 1; --i) std::swap(plan[i - 1], plan[rng.index(i)]);

  const std::size_t n_sessions = cfg.n_sessions;
  if (n_sessions == 0 && !plan.empty()) {
    throw Error(ErrorCode::Config, "events need at least one session");
  }
  std::vector<SessionPlan> sessions(n_sessions);
  for (std::size_t s = 0; s < n_sessions; ++s) {
    SessionPlan& sp = sessions[s];
    sp.id = session_name(s);
    sp.start = cfg.start_epoch + 86400.0 * static_cast<double>(s);
    sp.baseline_hr = rng.uniform(cfg.baseline_hr_min, cfg.baseline_hr_max);
    sp.eda_level = rng.uniform(1.0, 3.0);
    sp.eda_slope = rng.uniform(0.0015, 0.0025);
    sp.eda_wave_period = rng.uniform(280.0, 360.0);
    sp.skt_level = rng.uniform(32.0, 34.0);
    sp.skt_slope = rng.uniform(-2e-4, 2e-4);
    sp.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  Corpus corpus;
  corpus.truth.resize(plan.size());
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const std::size_t s = j % n_sessions;
    const std::size_t slot = j / n_sessions;
    GroundTruthEvent& gt = corpus.truth[j];
    gt.session_id = sessions[s].id;
    gt.label = plan[j].label;
    gt.aroused = plan[j].aroused;
    gt.baseline_hr = sessions[s].baseline_hr;
    const double jitter = std::round(rng.uniform(0.0, 10.0) * 1000.0) / 1000.0;
    gt.event_time = sessions[s].start + kLeadIn + cfg.event_spacing * static_cast<double>(slot) + jitter;
    gt.delay = plan[j].delayed ? static_cast<double>(61 + rng.index(180))
                               : static_cast<double>(rng.index(61));
    gt.tag_time = gt.event_time + gt.delay;
    if (gt.aroused) {
      gt.hr_shift = rng.uniform(cfg.hr_shift_min, cfg.hr_shift_max);
      const std::size_t bursts = 1 + rng.index(3);
      // one burst per equal segment of [event - 52, event - 6]
      const double span = 46.0 / static_cast<double>(bursts);
      for (std::size_t b = 0; b < bursts; ++b) {
        const double lo = gt.event_time - 52.0 + span * static_cast<double>(b);
        gt.bursts.push_back({lo + rng.uniform(2.0, span - 2.0), rng.uniform(0.15, 0.4)});
      }
    }
    sessions[s].events.push_back(j);
  }
  for (auto& sp : sessions) {
    const std::size_t slots = sp.events.size();
    sp.duration = kLeadIn + cfg.event_spacing * static_cast<double>(slots) + kTail;
  }

  // file order: by session, then time; ids follow that order
  std::vector<std::size_t> order;
  for (const auto& sp : sessions) order.insert(order.end(), sp.events.begin(), sp.events.end());
  std::vector<GroundTruthEvent> ordered;
  ordered.reserve(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    ordered.push_back(corpus.truth[order[j]]);
    ordered.back().event_id = event_name(j);
  }
  std::vector<std::size_t> new_index(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) new_index[order[j]] = j;
  for (auto& sp : sessions) {
    for (auto& e : sp.events) e = new_index[e];
  }
  corpus.truth = std::move(ordered);

  for (const auto& gt : corpus.truth) {
    corpus.annotations.push_back({gt.event_id, gt.tag_time, gt.label, gt.delay});
  }

  corpus.sessions.resize(n_sessions);
  parallel_for(n_sessions, jobs, [&](std::size_t s) {
    corpus.sessions[s] =
        render_session(sessions[s], corpus.truth, cfg, derive_seed(cfg.seed, 1000 + s));
  });
  return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& dir, unsigned jobs) {
  std::error_code ec;
  fs::create_directories(dir / "sessions", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + (dir / "sessions").string());

  parallel_for(corpus.sessions.size(), jobs, [&](std::size_t s) {
    const SessionRecording& rec = corpus.sessions[s];
    const fs::path sdir = dir / "sessions" / rec.session_id;
    std::error_code dir_ec;
    fs::create_directories(sdir, dir_ec);
    if (dir_ec) throw Error(ErrorCode::Io, "cannot create " + sdir.string());
    const auto one = [&](ChannelKind k) { return rec.find(k); };
    const TimeSeriesChannel* bvp[] = {one(ChannelKind::Bvp)};
    const TimeSeriesChannel* eda[] = {one(ChannelKind::Eda)};
    const TimeSeriesChannel* skt[] = {one(ChannelKind::Skt)};
    const TimeSeriesChannel* acc[] = {one(ChannelKind::AccX), one(ChannelKind::AccY),
                                      one(ChannelKind::AccZ)};
    write_signal(sdir / "BVP.csv", bvp, 3);
    write_signal(sdir / "EDA.csv", eda, 6);
    write_signal(sdir / "TEMP.csv", skt, 4);
    write_signal(sdir / "ACC.csv", acc, 4);
    std::ofstream tags(sdir / "tags.csv", std::ios::binary);
    for (double t : rec.tags) tags << format_fixed(t, 3) << '\n';
  });

  {
    std::ofstream out(dir / "annotations.csv", std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write annotations.csv");
    write_annotations(out, corpus.annotations);
  }
  std::ofstream out(dir / "ground_truth.csv", std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write ground_truth.csv");
  out << "event_id,session_id,label,aroused,event_time,tag_time,delay,baseline_hr,hr_shift,"
         "burst_apex_times,burst_amplitudes\n";
  for (const auto& gt : corpus.truth) {
    std::string apexes;
    std::string amps;
    for (const auto& b : gt.bursts) {
      if (!apexes.empty()) {
        apexes += ';';
        amps += ';';
      }
      apexes += format_fixed(b.apex_time, 3);
      amps += format_fixed(b.amplitude, 4);
    }
    out << gt.event_id << ',' << gt.session_id << ',' << label_name(gt.label) << ','
        << (gt.aroused ? 1 : 0) << ',' << format_fixed(gt.event_time, 3) << ','
        << format_fixed(gt.tag_time, 3) << ',' << format_double(gt.delay) << ','
        << format_fixed(gt.baseline_hr, 3) << ',' << format_fixed(gt.hr_shift, 3) << ',' << apexes
        << ',' << amps << '\n';
  }
}

}  // namespace affect
