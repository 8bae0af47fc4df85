#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace affect {

inline constexpr double kWindowSeconds = 60.0;
inline constexpr double kMaxDelaySeconds = 60.0;

enum class ChannelKind { Bvp, Eda, Skt, AccX, AccY, AccZ };

inline constexpr std::array<ChannelKind, 6> kAllChannels = {
    ChannelKind::Bvp, ChannelKind::Eda, ChannelKind::Skt,
    ChannelKind::AccX, ChannelKind::AccY, ChannelKind::AccZ};

/// "BVP", "EDA", "SKT", "ACC_X", "ACC_Y", "ACC_Z".
std::string_view channel_name(ChannelKind kind) noexcept;

/// One sensor stream. Sample i is taken at start_time + i / sampling_rate.
struct TimeSeriesChannel {
  ChannelKind kind = ChannelKind::Bvp;
  double start_time = 0.0;  // seconds since Unix epoch
  double sampling_rate = 1.0;  // Hz
  std::vector<double> samples;

  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) / sampling_rate;
  }
  /// Exclusive end of the covered span.
  double end_time() const { return time_at(samples.size()); }
};

/// Samples with timestamps in [t0, t1).
///
/// The first sample is ceil((t0 - start) * rate); the count is the number of
/// grid points in the half-open interval, which equals round((t1 - t0) * rate)
/// whenever that product is integral. Throws RangeNotCovered unless [t0, t1)
/// lies inside the channel span.
std::span<const double> channel_slice(const TimeSeriesChannel& channel, double t0, double t1);

/// Index of the first sample at or after t, with a small tolerance for
/// floating-point epoch arithmetic.
long long first_index_at_or_after(const TimeSeriesChannel& channel, double t);

struct SessionRecording {
  std::string session_id;
  std::map<ChannelKind, TimeSeriesChannel> channels;
  std::vector<double> tags;  // strictly increasing Unix timestamps

  const TimeSeriesChannel* find(ChannelKind kind) const;

  /// Interval covered by every channel; empty (first >= second) if none.
  std::pair<double, double> common_span() const;
};

enum class AffectLabel { Strong, Neutral, Mistake };

std::string_view label_name(AffectLabel label) noexcept;

struct AnnotatedEvent {
  std::string event_id;
  double tag_time = 0.0;
  double delay = 0.0;
  AffectLabel label = AffectLabel::Neutral;
  double event_time = 0.0;  // tag_time - delay
};

AnnotatedEvent make_event(std::string event_id, double tag_time, double delay, AffectLabel label);

/// Binary learning target: Strong -> 1, Neutral -> 0.
int binary_label(AffectLabel label);

struct ChannelSlice {
  double sampling_rate = 1.0;
  std::vector<double> samples;
};

/// The fixed-length multi-channel slice that precedes one event.
struct WindowSample {
  std::string event_id;
  std::string session_id;
  int label = 0;
  double window_end = 0.0;  // delay-corrected event time, exclusive
  double duration = kWindowSeconds;
  std::map<ChannelKind, ChannelSlice> slices;
  // derived from the raw ACC axes during preprocessing
  std::optional<ChannelSlice> acc_magnitude;

  const ChannelSlice& slice(ChannelKind kind) const;
};

/// Euclidean norm of three equal-length axis sequences.
std::vector<double> vector_magnitude(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> z);

}  // namespace affect
