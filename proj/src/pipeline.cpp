#include "affect/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "affect/error.hpp"
#include "affect/features.hpp"
#include "affect/model.hpp"
#include "affect/preprocess.hpp"
#include "affect/rng.hpp"
#include "affect/synth.hpp"
#include "affect/util.hpp"

namespace affect {

namespace fs = std::filesystem;

LoadedCorpus load_corpus(const fs::path& dir, unsigned jobs) {
  LoadedCorpus out;
  const fs::path sessions = dir / "sessions";
  if (!fs::is_directory(sessions)) {
    throw Error(ErrorCode::Io, "no sessions directory under " + dir.string());
  }
  out.sessions = parse_sessions(sessions, jobs);
  out.annotations = parse_annotations(dir / "annotations.csv");
  out.resolved = resolve_events(out.annotations);
  return out;
}

WindowSet build_windows(const LoadedCorpus& corpus, const PipelineConfig& config) {
  return extract_all(corpus.sessions, corpus.resolved.kept, config.window_seconds, config.jobs);
}

FeatureMatrix build_features(std::span<const WindowSample> windows, const PipelineConfig& config) {
  std::vector<FeatureVector> vectors(windows.size());
  parallel_for(windows.size(), config.jobs, [&](std::size_t i) {
    const WindowSample clean = preprocess_window(windows[i], config.preprocess);
    vectors[i] = extract_features(clean, config.features);
  });
  if (vectors.empty()) {
    FeatureMatrix empty;
    empty.feature_names = feature_catalog();
    return empty;
  }
  return FeatureMatrix::from_vectors(vectors);
}

ExperimentResult run_experiment(const FeatureMatrix& matrix, const PipelineConfig& config) {
  config.validate();
  ExperimentResult out;
  const std::vector<int> labels = matrix.labels();
  out.split = stratified_split(labels, config.test_fraction, derive_seed(config.seed, 3));
  const FeatureMatrix train = matrix.subset(out.split.train);
  const FeatureMatrix test = matrix.subset(out.split.test);
  out.report = cross_validate(train, config.cv_folds, config.modeling, config.seed, {}, config.jobs);
  out.report.holdout = evaluate_holdout(train, test, config.modeling, config.seed, &out.final);
  out.report.config = config.entries();
  out.report.config_hash = config.hash();
  out.report.seed = config.seed;
  out.final.model.meta.config_hash = config.hash();
  out.final.model.meta.seed = config.seed;
  return out;
}

ArtifactStamp stamp_of(const PipelineConfig& config) { return {config.hash(), config.seed}; }

void write_stamp(std::ostream& out, const ArtifactStamp& stamp) {
  out << "# config_hash=" << stamp.config_hash << '\n';
  out << "# seed=" << stamp.seed << '\n';
}

void write_text_file(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + file.string());
}

void write_events_csv(std::ostream& out, const LoadedCorpus& corpus, const ArtifactStamp& stamp) {
  write_stamp(out, stamp);
  out << "event_id,label,tag_time,delay_seconds,event_time,status,reason\n";
  const auto row = [&](const AnnotatedEvent& e, std::string_view status, std::string_view reason) {
    out << e.event_id << ',' << label_name(e.label) << ',' << format_fixed(e.tag_time, 3) << ','
        << format_double(e.delay) << ',' << format_fixed(e.event_time, 3) << ',' << status << ','
        << reason << '\n';
  };
  for (const auto& e : corpus.resolved.kept) row(e, "kept", "");
  for (const auto& x : corpus.resolved.excluded) row(x.event, "excluded", to_string(x.reason));
}

void write_windows_csv(std::ostream& out, const WindowSet& windows, const ArtifactStamp& stamp) {
  write_stamp(out, stamp);
  out << "event_id,session_id,label,window_end,status";
  for (ChannelKind k : kRequiredChannels) out << ",n_" << channel_name(k);
  out << '\n';
  for (const auto& w : windows.windows) {
    out << w.event_id << ',' << w.session_id << ',' << w.label << ','
        << format_fixed(w.window_end, 3) << ",kept";
    for (ChannelKind k : kRequiredChannels) out << ',' << w.slice(k).samples.size();
    out << '\n';
  }
  for (const auto& d : windows.dropped) {
    out << d.event_id << ",,,," << to_string(d.reason);
    for (std::size_t i = 0; i < kRequiredChannels.size(); ++i) out << ',';
    out << '\n';
  }
}

void write_predictions_csv(std::ostream& out, const FeatureMatrix& matrix,
                           const AdaBoostModel& model, const ArtifactStamp& stamp) {
  const FeatureMatrix aligned = matrix.select_columns(model.feature_names);
  write_stamp(out, stamp);
  out << "# model_hash=" << hex64(model_hash(model)) << '\n';
  out << "event_id,label";
  for (const auto& name : matrix.feature_names) out << ',' << name;
  out << ",predicted_label,score\n";
  for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
    const auto& r = matrix.rows[i];
    const Prediction p = predict_values(model, aligned.rows[i].values);
    out << r.event_id << ',' << r.label;
    for (double v : r.values) out << ',' << (std::isnan(v) ? std::string("NA") : format_double(v));
    out << ',' << p.label << ',' << format_double(p.score) << '\n';
  }
}

PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::optional<fs::path>& corpus_dir, const fs::path& out_dir) {
  config.validate();
  const ArtifactStamp stamp = stamp_of(config);
  fs::create_directories(out_dir);
  write_text_file(out_dir / kEffectiveConfigFile, render_config(config));

  fs::path source;
  if (corpus_dir) {
    source = *corpus_dir;
  } else {
    source = out_dir / "corpus";
    SynthConfig synth = config.synth;
    synth.seed = config.seed;
    write_corpus(generate_corpus(synth, config.jobs), source, config.jobs);
  }

  PipelineResult result;
  const LoadedCorpus corpus = load_corpus(source, config.jobs);
  result.n_annotations = corpus.annotations.size();
  result.n_kept = corpus.resolved.kept.size();
  for (const auto& x : corpus.resolved.excluded) {
    if (x.reason == ExclusionReason::MistakeMark) ++result.n_excluded_mistake;
    if (x.reason == ExclusionReason::DelayTooLarge) ++result.n_excluded_delay;
  }
  {
    std::ostringstream events;
    write_events_csv(events, corpus, stamp);
    write_text_file(out_dir / kEventsFile, events.str());
  }

  const WindowSet windows = build_windows(corpus, config);
  result.n_dropped_coverage = windows.dropped.size();
  {
    std::ostringstream text;
    write_windows_csv(text, windows, stamp);
    write_text_file(out_dir / kWindowsFile, text.str());
  }

  result.features = build_features(windows.windows, config);
  {
    std::ostringstream text;
    write_feature_csv(text, result.features, stamp);
    write_text_file(out_dir / kFeaturesFile, text.str());
  }

  result.experiment = run_experiment(result.features, config);
  auto& report = result.experiment.report;
  report.dataset = {
      {"annotations", result.n_annotations},
      {"learning_samples", result.n_kept},
      {"excluded_mistake", result.n_excluded_mistake},
      {"excluded_delay_too_large", result.n_excluded_delay},
      {"dropped_insufficient_coverage", result.n_dropped_coverage},
      {"windows", windows.windows.size()},
      {"train_rows", result.experiment.split.train.size()},
      {"test_rows", result.experiment.split.test.size()},
  };
  write_text_file(out_dir / kModelFile, serialize_model(result.experiment.final.model));
  write_text_file(out_dir / kReportFile, report_json(report));
  write_text_file(out_dir / kFoldsFile, folds_csv(report));
  return result;
}

}  // namespace affect
