#pragma once

#include <span>
#include <vector>

#include "affect/ingest.hpp"
#include "affect/signal.hpp"

namespace affect {

/// Channels every learning window must carry.
inline constexpr std::array<ChannelKind, 6> kRequiredChannels = kAllChannels;

/// Cuts [event_time - duration, event_time) from every required channel.
/// Throws InsufficientCoverage when a channel is missing or too short, and
/// InvalidArgument for mistake marks.
WindowSample extract_window(const SessionRecording& recording, const AnnotatedEvent& event,
                            double duration = kWindowSeconds);

struct DroppedEvent {
  std::string event_id;
  ExclusionReason reason = ExclusionReason::InsufficientCoverage;
};

struct WindowSet {
  std::vector<WindowSample> windows;  // ordered by event_time, then event_id
  std::vector<DroppedEvent> dropped;
};

/// Session an event belongs to: the one holding a tag at the event's tag time
/// (within 1 ms). Returns nullptr if no session has it.
const SessionRecording* session_for(std::span<const SessionRecording> recordings,
                                    const AnnotatedEvent& event);

/// One window per coverable event. Throws DuplicateId for repeated event or
/// session ids and UnknownSession when an event's tag is in no session.
WindowSet extract_all(std::span<const SessionRecording> recordings,
                      std::span<const AnnotatedEvent> events, double duration = kWindowSeconds,
                      unsigned jobs = 1);

}  // namespace affect
