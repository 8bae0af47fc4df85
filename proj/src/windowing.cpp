#include "affect/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "affect/error.hpp"
#include "affect/util.hpp"

namespace affect {

namespace {
constexpr double kTagMatchTolerance = 1e-3;
}

WindowSample extract_window(const SessionRecording& recording, const AnnotatedEvent& event,
                            double duration) {
  if (!(duration > 0.0)) throw Error(ErrorCode::InvalidArgument, "window duration must be > 0");
  WindowSample window;
  window.event_id = event.event_id;
  window.session_id = recording.session_id;
  window.label = binary_label(event.label);
  window.window_end = event.event_time;
  window.duration = duration;
  const double t0 = event.event_time - duration;
  for (ChannelKind kind : kRequiredChannels) {
    const TimeSeriesChannel* ch = recording.find(kind);
    if (ch == nullptr) {
      throw Error(ErrorCode::InsufficientCoverage,
                  "session " + recording.session_id + " has no " +
                      std::string(channel_name(kind)) + " channel");
    }
    std::span<const double> samples;
    try {
      samples = channel_slice(*ch, t0, event.event_time);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RangeNotCovered) throw;
      throw Error(ErrorCode::InsufficientCoverage, "event " + event.event_id + ": " + e.what());
    }
    window.slices[kind] = ChannelSlice{ch->sampling_rate, {samples.begin(), samples.end()}};
  }
  return window;
}

const SessionRecording* session_for(std::span<const SessionRecording> recordings,
                                    const AnnotatedEvent& event) {
  for (const auto& rec : recordings) {
    auto it = std::lower_bound(rec.tags.begin(), rec.tags.end(),
                               event.tag_time - kTagMatchTolerance);
    if (it != rec.tags.end() && std::abs(*it - event.tag_time) <= kTagMatchTolerance) {
      return &rec;
    }
  }
  return nullptr;
}

WindowSet extract_all(std::span<const SessionRecording> recordings,
                      std::span<const AnnotatedEvent> events, double duration, unsigned jobs) {
  std::set<std::string> ids;
  for (const auto& rec : recordings) {
    if (!ids.insert(rec.session_id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate session id " + rec.session_id);
    }
  }
  ids.clear();
  std::vector<const SessionRecording*> owners(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!ids.insert(events[i].event_id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate event id " + events[i].event_id);
    }
    owners[i] = session_for(recordings, events[i]);
    if (owners[i] == nullptr) {
      throw Error(ErrorCode::UnknownSession,
                  "event " + events[i].event_id + " matches no session tag");
    }
  }

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (events[a].event_time != events[b].event_time) {
      return events[a].event_time < events[b].event_time;
    }
    return events[a].event_id < events[b].event_id;
  });

  std::vector<std::optional<WindowSample>> slots(order.size());
  parallel_for(order.size(), jobs, [&](std::size_t i) {
    const std::size_t e = order[i];
    try {
      slots[i] = extract_window(*owners[e], events[e], duration);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::InsufficientCoverage) throw;
    }
  });

  WindowSet out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (slots[i]) {
      out.windows.push_back(std::move(*slots[i]));
    } else {
      out.dropped.push_back({events[order[i]].event_id, ExclusionReason::InsufficientCoverage});
    }
  }
  return out;
}

}  // namespace affect
