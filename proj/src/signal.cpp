#include "affect/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "affect/error.hpp"

namespace affect {

namespace {

// Epoch timestamps near 1.6e9 carry ~2e-7 s of rounding; grid positions
// closer than this to an integer are treated as on the grid.
constexpr double kGridTolerance = 1e-6;

}  // namespace

std::string_view channel_name(ChannelKind kind) noexcept {
  switch (kind) {
    case ChannelKind::Bvp: return "BVP";
    case ChannelKind::Eda: return "EDA";
    case ChannelKind::Skt: return "SKT";
    case ChannelKind::AccX: return "ACC_X";
    case ChannelKind::AccY: return "ACC_Y";
    case ChannelKind::AccZ: return "ACC_Z";
  }
  return "?";
}

std::string_view label_name(AffectLabel label) noexcept {
  switch (label) {
    case AffectLabel::Strong: return "strong";
    case AffectLabel::Neutral: return "neutral";
    case AffectLabel::Mistake: return "mistake";
  }
  return "?";
}

long long first_index_at_or_after(const TimeSeriesChannel& channel, double t) {
  const double position = (t - channel.start_time) * channel.sampling_rate;
  return static_cast<long long>(std::ceil(position - kGridTolerance));
}

std::span<const double> channel_slice(const TimeSeriesChannel& channel, double t0, double t1) {
  if (!(t1 > t0)) {
    throw Error(ErrorCode::InvalidArgument, "slice end must be after slice start");
  }
  const long long first = first_index_at_or_after(channel, t0);
  const long long last = first_index_at_or_after(channel, t1);  // exclusive
  const auto size = static_cast<long long>(channel.samples.size());
  if (first < 0 || last > size) {
    std::ostringstream msg;
    msg.precision(17);
    msg << channel_name(channel.kind) << " covers [" << channel.start_time << ", "
        << channel.end_time() << "), requested [" << t0 << ", " << t1 << ")";
    throw Error(ErrorCode::RangeNotCovered, msg.str());
  }
  return std::span<const double>(channel.samples).subspan(static_cast<std::size_t>(first),
                                                          static_cast<std::size_t>(last - first));
}

const TimeSeriesChannel* SessionRecording::find(ChannelKind kind) const {
  auto it = channels.find(kind);
  return it == channels.end() ? nullptr : &it->second;
}

std::pair<double, double> SessionRecording::common_span() const {
  if (channels.empty()) return {0.0, 0.0};
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& [kind, ch] : channels) {
    lo = std::max(lo, ch.start_time);
    hi = std::min(hi, ch.end_time());
  }
  return {lo, hi};
}

AnnotatedEvent make_event(std::string event_id, double tag_time, double delay, AffectLabel label) {
  AnnotatedEvent ev;
  ev.event_id = std::move(event_id);
  ev.tag_time = tag_time;
  ev.delay = delay;
  ev.label = label;
  ev.event_time = tag_time - delay;
  return ev;
}

int binary_label(AffectLabel label) {
  switch (label) {
    case AffectLabel::Strong: return 1;
    case AffectLabel::Neutral: return 0;
    case AffectLabel::Mistake: break;
  }
  throw Error(ErrorCode::InvalidArgument, "mistake marks have no learning label");
}

const ChannelSlice& WindowSample::slice(ChannelKind kind) const {
  auto it = slices.find(kind);
  if (it == slices.end()) {
    throw Error(ErrorCode::InsufficientCoverage,
                "window " + event_id + " has no " + std::string(channel_name(kind)) + " slice");
  }
  return it->second;
}

std::vector<double> vector_magnitude(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size()) {
    throw Error(ErrorCode::LengthMismatch, "ACC axes differ in length");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
  }
  return out;
}

}  // namespace affect
