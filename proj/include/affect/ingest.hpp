#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affect/signal.hpp"

namespace affect {

/// One line of the annotation questionnaire export.
struct AnnotationRow {
  std::string event_id;
  double tag_time = 0.0;
  AffectLabel label = AffectLabel::Neutral;
  double delay = 0.0;
};

enum class ExclusionReason { MistakeMark, DelayTooLarge, InsufficientCoverage };

std::string_view to_string(ExclusionReason reason) noexcept;

struct ExcludedEvent {
  AnnotatedEvent event;
  ExclusionReason reason = ExclusionReason::MistakeMark;
};

struct ResolvedEvents {
  std::vector<AnnotatedEvent> kept;
  std::vector<ExcludedEvent> excluded;
};

inline constexpr std::string_view kAnnotationHeader = "event_id,tag_time,label,delay_seconds";

/// Reads one session directory laid out like an Empatica E4 export:
/// BVP.csv, EDA.csv, TEMP.csv (skin temperature), ACC.csv (three columns)
/// and an optional tags.csv. Each signal file starts with a start-epoch row
/// and a sampling-rate row. The session id is the directory name.
SessionRecording parse_session(const std::filesystem::path& dir);

/// Parses one signal file body into one channel per entry of `kinds`
/// (a single column, or three for ACC).
std::vector<TimeSeriesChannel> parse_signal_csv(std::string_view text,
                                                std::span<const ChannelKind> kinds,
                                                const std::string& source);

/// Case-insensitive "strong" / "neutral" / "mistake"; throws UnknownLabel.
AffectLabel parse_label(std::string_view text);

std::vector<AnnotationRow> parse_annotations(const std::filesystem::path& file);
std::vector<AnnotationRow> parse_annotations(std::istream& in, const std::string& source = "<stream>");

void write_annotations(std::ostream& out, std::span<const AnnotationRow> rows);

/// Applies the exclusion rules: mistake marks and delays over 60 s are
/// excluded, everything else becomes an AnnotatedEvent at tag_time - delay.
ResolvedEvents resolve_events(std::span<const AnnotationRow> rows);

/// Every session directory below `sessions_dir`, sorted by session id.
std::vector<SessionRecording> parse_sessions(const std::filesystem::path& sessions_dir,
                                             unsigned jobs = 1);

std::string read_text_file(const std::filesystem::path& file);

}  // namespace affect
