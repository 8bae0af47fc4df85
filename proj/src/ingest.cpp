#include "affect/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "affect/error.hpp"
#include "affect/util.hpp"

namespace affect {

namespace fs = std::filesystem;

std::string_view to_string(ExclusionReason reason) noexcept {
  switch (reason) {
    case ExclusionReason::MistakeMark: return "MistakeMark";
    case ExclusionReason::DelayTooLarge: return "DelayTooLarge";
    case ExclusionReason::InsufficientCoverage: return "InsufficientCoverage";
  }
  return "?";
}

std::string read_text_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

// Splits into lines, dropping a trailing '\r' and blank lines.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back(line);
    begin = end + 1;
  }
  return lines;
}

double header_value(std::string_view line, const std::string& source, const char* what) {
  const auto fields = split(line, ',');
  double value = 0.0;
  if (!parse_double(fields.front(), value)) {
    throw Error(ErrorCode::MalformedHeader, source + ": cannot read " + what + " row");
  }
  for (auto field : fields) {
    double other = 0.0;
    if (!parse_double(field, other) || other != value) {
      throw Error(ErrorCode::MalformedHeader, source + ": inconsistent " + what + " row");
    }
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::MalformedHeader, source + ": non-finite " + what);
  }
  return value;
}

std::vector<double> parse_tags(std::string_view text, const std::string& source) {
  std::vector<double> tags;
  for (auto line : lines_of(text)) {
    double t = 0.0;
    if (!parse_double(line, t)) {
      throw Error(ErrorCode::MalformedRow, source + ": bad tag '" + std::string(line) + "'");
    }
    if (!std::isfinite(t)) throw Error(ErrorCode::NonFiniteValue, source + ": non-finite tag");
    tags.push_back(t);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  return tags;
}

}  // namespace

std::vector<TimeSeriesChannel> parse_signal_csv(std::string_view text,
                                                std::span<const ChannelKind> kinds,
                                                const std::string& source) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) {
    throw Error(ErrorCode::MalformedHeader, source + ": missing start-time/rate rows");
  }
  const double start = header_value(lines[0], source, "start-time");
  const double rate = header_value(lines[1], source, "sampling-rate");
  if (!(rate > 0.0)) {
    throw Error(ErrorCode::MalformedHeader, source + ": sampling rate must be positive");
  }
  if (lines.size() == 2) throw Error(ErrorCode::EmptyChannel, source + ": no samples");

  std::vector<TimeSeriesChannel> channels(kinds.size());
  for (std::size_t c = 0; c < kinds.size(); ++c) {
    channels[c].kind = kinds[c];
    channels[c].start_time = start;
    channels[c].sampling_rate = rate;
    channels[c].samples.reserve(lines.size() - 2);
  }
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != kinds.size()) {
      throw Error(ErrorCode::MalformedRow, source + ": line " + std::to_string(i + 1) +
                                               " has " + std::to_string(fields.size()) +
                                               " columns, expected " +
                                               std::to_string(kinds.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw Error(ErrorCode::MalformedRow, source + ": line " + std::to_string(i + 1) +
                                                 ": cannot parse '" + std::string(fields[c]) +
                                                 "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue,
                    source + ": line " + std::to_string(i + 1) + " is not finite");
      }
      channels[c].samples.push_back(v);
    }
  }
  return channels;
}

SessionRecording parse_session(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");

  struct FileSpec {
    const char* name;
    std::vector<ChannelKind> kinds;
  };
  const FileSpec files[] = {
      {"BVP.csv", {ChannelKind::Bvp}},
      {"EDA.csv", {ChannelKind::Eda}},
      {"TEMP.csv", {ChannelKind::Skt}},
      {"ACC.csv", {ChannelKind::AccX, ChannelKind::AccY, ChannelKind::AccZ}},
  };

  SessionRecording rec;
  rec.session_id = dir.filename().string();
  if (rec.session_id.empty()) rec.session_id = dir.parent_path().filename().string();
  for (const auto& spec : files) {
    const fs::path file = dir / spec.name;
    if (!fs::exists(file)) continue;
    for (auto& ch : parse_signal_csv(read_text_file(file), spec.kinds, file.string())) {
      const ChannelKind kind = ch.kind;
      rec.channels.emplace(kind, std::move(ch));
    }
  }
  const fs::path tags = dir / "tags.csv";
  if (fs::exists(tags)) rec.tags = parse_tags(read_text_file(tags), tags.string());
  return rec;
}

std::vector<SessionRecording> parse_sessions(const fs::path& sessions_dir, unsigned jobs) {
  if (!fs::is_directory(sessions_dir)) {
    throw Error(ErrorCode::Io, sessions_dir.string() + " is not a directory");
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(sessions_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<SessionRecording> out(dirs.size());
  parallel_for(dirs.size(), jobs, [&](std::size_t i) { out[i] = parse_session(dirs[i]); });
  return out;
}

AffectLabel parse_label(std::string_view text) {
  const std::string folded = to_lower(trim(text));
  if (folded == "strong") return AffectLabel::Strong;
  if (folded == "neutral") return AffectLabel::Neutral;
  if (folded == "mistake") return AffectLabel::Mistake;
  throw Error(ErrorCode::UnknownLabel, "unknown label '" + std::string(text) + "'");
}

std::vector<AnnotationRow> parse_annotations(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + file.string());
  return parse_annotations(in, file.string());
}

std::vector<AnnotationRow> parse_annotations(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<AnnotationRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    if (!saw_header) {
      if (trim(line) != kAnnotationHeader) {
        throw Error(ErrorCode::MalformedHeader,
                    source + ": expected header '" + std::string(kAnnotationHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    const std::string where = source + ": line " + std::to_string(line_no);
    if (fields.size() != 4) throw Error(ErrorCode::MalformedRow, where + ": expected 4 columns");
    AnnotationRow row;
    row.event_id = std::string(trim(fields[0]));
    if (row.event_id.empty()) throw Error(ErrorCode::MalformedRow, where + ": empty event_id");
    if (!parse_double(fields[1], row.tag_time) || !parse_double(fields[3], row.delay)) {
      throw Error(ErrorCode::MalformedRow, where + ": bad number");
    }
    if (!std::isfinite(row.tag_time) || !std::isfinite(row.delay)) {
      throw Error(ErrorCode::NonFiniteValue, where);
    }
    row.label = parse_label(fields[2]);
    if (row.delay < 0.0) throw Error(ErrorCode::NegativeDelay, where);
    rows.push_back(std::move(row));
  }
  if (!saw_header) throw Error(ErrorCode::MalformedHeader, source + ": empty annotation file");
  return rows;
}

void write_annotations(std::ostream& out, std::span<const AnnotationRow> rows) {
  out << kAnnotationHeader << '\n';
  for (const auto& row : rows) {
    out << row.event_id << ',' << format_fixed(row.tag_time, 3) << ',' << label_name(row.label)
        << ',' << format_double(row.delay) << '\n';
  }
}

ResolvedEvents resolve_events(std::span<const AnnotationRow> rows) {
  ResolvedEvents out;
  for (const auto& row : rows) {
    AnnotatedEvent ev = make_event(row.event_id, row.tag_time, row.delay, row.label);
    if (row.label == AffectLabel::Mistake) {
      out.excluded.push_back({std::move(ev), ExclusionReason::MistakeMark});
    } else if (row.delay > kMaxDelaySeconds) {
      out.excluded.push_back({std::move(ev), ExclusionReason::DelayTooLarge});
    } else {
      out.kept.push_back(std::move(ev));
    }
  }
  return out;
}

}  // namespace affect
