#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affect/config.hpp"
#include "affect/dataset.hpp"
#include "affect/eval.hpp"
#include "affect/ingest.hpp"
#include "affect/sampling.hpp"
#include "affect/windowing.hpp"

namespace affect {

inline constexpr const char* kEffectiveConfigFile = "effective_config.txt";
inline constexpr const char* kEventsFile = "events.csv";
inline constexpr const char* kWindowsFile = "windows.csv";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kModelFile = "model.txt";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kFoldsFile = "folds.csv";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kDecisionsFile = "decisions.csv";

/// A corpus directory: sessions/<id>/... plus annotations.csv.
struct LoadedCorpus {
  std::vector<SessionRecording> sessions;
  std::vector<AnnotationRow> annotations;
  ResolvedEvents resolved;
};

LoadedCorpus load_corpus(const std::filesystem::path& dir, unsigned jobs = 1);

WindowSet build_windows(const LoadedCorpus& corpus, const PipelineConfig& config);

/// Preprocesses and featurizes every window, keeping window order.
FeatureMatrix build_features(std::span<const WindowSample> windows, const PipelineConfig& config);

struct ExperimentResult {
  SplitIndices split;
  EvalReport report;        // CV on the training split, holdout on the test split
  FittedClassifier final;   // refit on the whole training split
};

/// Stratified split, k-fold CV on the training side, one holdout score.
ExperimentResult run_experiment(const FeatureMatrix& matrix, const PipelineConfig& config);

struct PipelineResult {
  std::size_t n_annotations = 0;
  std::size_t n_kept = 0;
  std::size_t n_excluded_mistake = 0;
  std::size_t n_excluded_delay = 0;
  std::size_t n_dropped_coverage = 0;
  FeatureMatrix features;
  ExperimentResult experiment;
};

/// synth-or-ingest -> windows -> features -> train -> evaluate, writing every
/// artifact under `out_dir`. Without `corpus_dir` a synthetic corpus is
/// generated into out_dir/corpus first and read back through the parsers.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::optional<std::filesystem::path>& corpus_dir,
                            const std::filesystem::path& out_dir);

ArtifactStamp stamp_of(const PipelineConfig& config);
void write_stamp(std::ostream& out, const ArtifactStamp& stamp);

/// event_id,label,tag_time,delay_seconds,event_time,status,reason
void write_events_csv(std::ostream& out, const LoadedCorpus& corpus, const ArtifactStamp& stamp);
/// event_id,session_id,label,window_end,status,<samples per channel>
void write_windows_csv(std::ostream& out, const WindowSet& windows, const ArtifactStamp& stamp);
/// The input rows plus predicted_label and score columns.
void write_predictions_csv(std::ostream& out, const FeatureMatrix& matrix,
                           const AdaBoostModel& model, const ArtifactStamp& stamp);

/// Creates parent directories; the text is written in binary mode.
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace affect
