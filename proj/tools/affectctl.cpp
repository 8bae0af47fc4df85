// affectctl: command-line front end for the affect pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "affect/config.hpp"
#include "affect/ema_gate.hpp"
#include "affect/error.hpp"
#include "affect/model.hpp"
#include "affect/pipeline.hpp"
#include "affect/rng.hpp"
#include "affect/synth.hpp"
#include "affect/util.hpp"

namespace fs = std::filesystem;
using namespace affect;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::string corpus;
  std::string features;
  std::string model;
  std::string detections;
};

PipelineConfig effective_config(const Options& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  apply_overrides(cfg, o.overrides);
  if (o.seed) cfg.set("seed", std::to_string(*o.seed));
  if (o.jobs) cfg.jobs = *o.jobs;
  cfg.validate();
  return cfg;
}

void log_config(const PipelineConfig& cfg, const fs::path& out_dir) {
  std::cerr << "effective config (jobs=" << cfg.jobs << "):\n" << render_config(cfg);
  write_text_file(out_dir / kEffectiveConfigFile, render_config(cfg));
}

FeatureMatrix read_features(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "--features is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_feature_csv(in, path);
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
  return value;
}

template <typename Writer>
void write_with(const fs::path& file, Writer&& writer) {
  std::ostringstream text;
  writer(text);
  write_text_file(file, text.str());
}

int run(const std::string& command, const Options& o) {
  const PipelineConfig cfg = effective_config(o);
  const fs::path out = o.out_dir;
  fs::create_directories(out);
  log_config(cfg, out);
  const ArtifactStamp stamp = stamp_of(cfg);

  if (command == "synth") {
    SynthConfig synth = cfg.synth;
    synth.seed = cfg.seed;
    write_corpus(generate_corpus(synth, cfg.jobs), out, cfg.jobs);
    std::cout << "corpus written to " << out.string() << '\n';
  } else if (command == "ingest") {
    const LoadedCorpus corpus = load_corpus(require(o.corpus, "--corpus"), cfg.jobs);
    write_with(out / kEventsFile, [&](std::ostream& s) { write_events_csv(s, corpus, stamp); });
    std::cout << "sessions=" << corpus.sessions.size() << " annotations=" << corpus.annotations.size()
              << " kept=" << corpus.resolved.kept.size()
              << " excluded=" << corpus.resolved.excluded.size() << '\n';
  } else if (command == "windows") {
    const LoadedCorpus corpus = load_corpus(require(o.corpus, "--corpus"), cfg.jobs);
    const WindowSet windows = build_windows(corpus, cfg);
    write_with(out / kWindowsFile, [&](std::ostream& s) { write_windows_csv(s, windows, stamp); });
    std::cout << "windows=" << windows.windows.size() << " dropped=" << windows.dropped.size()
              << '\n';
  } else if (command == "features") {
    const LoadedCorpus corpus = load_corpus(require(o.corpus, "--corpus"), cfg.jobs);
    const WindowSet windows = build_windows(corpus, cfg);
    const FeatureMatrix m = build_features(windows.windows, cfg);
    write_with(out / kFeaturesFile, [&](std::ostream& s) { write_feature_csv(s, m, stamp); });
    std::cout << "rows=" << m.n_rows() << " features=" << m.n_features() << '\n';
  } else if (command == "train") {
    const FeatureMatrix m = read_features(o.features);
    FittedClassifier fitted = fit_classifier(m, cfg.modeling, derive_seed(cfg.seed, 2));
    fitted.model.meta.config_hash = stamp.config_hash;
    fitted.model.meta.seed = cfg.seed;
    write_text_file(out / kModelFile, serialize_model(fitted.model));
    std::cout << "stages=" << fitted.model.trees.size()
              << " features=" << fitted.model.feature_names.size()
              << " stop_reason=" << fitted.model.meta.stop_reason << '\n';
  } else if (command == "evaluate") {
    const FeatureMatrix m = read_features(o.features);
    const ExperimentResult r = run_experiment(m, cfg);
    write_text_file(out / kReportFile, report_json(r.report));
    write_text_file(out / kFoldsFile, folds_csv(r.report));
    std::cout << "cv_f1=" << format_fixed(r.report.pooled.f1.value_or(0.0), 4)
              << " holdout_f1=" << format_fixed(r.report.holdout->metrics.f1.value_or(0.0), 4)
              << '\n';
  } else if (command == "predict") {
    const AdaBoostModel model = load_model(fs::path(require(o.model, "--model")));
    const FeatureMatrix m = read_features(o.features);
    write_with(out / kPredictionsFile,
               [&](std::ostream& s) { write_predictions_csv(s, m, model, stamp); });
    std::cout << "rows=" << m.n_rows() << '\n';
  } else if (command == "simulate-ema") {
    const std::string path = require(o.detections, "--detections");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    const std::vector<double> detections = read_detections(in, path);
    GatePolicy policy{cfg.ema_min_idle, cfg.ema_ask_probability, cfg.seed};
    const GateRun run = simulate_gate(policy, detections);
    write_with(out / kDecisionsFile, [&](std::ostream& s) {
      write_stamp(s, stamp);
      write_decisions(s, run);
    });
    std::cout << "detections=" << run.summary.detections << " prompts=" << run.summary.prompts
              << " suppressed_idle=" << run.summary.suppressed_idle
              << " suppressed_random=" << run.summary.suppressed_random << '\n';
  } else if (command == "pipeline") {
    std::optional<fs::path> corpus;
    if (!o.corpus.empty()) corpus = o.corpus;
    const PipelineResult r = run_pipeline(cfg, corpus, out);
    const auto& rep = r.experiment.report;
    std::cout << "learning_samples=" << r.n_kept << " excluded_mistake=" << r.n_excluded_mistake
              << " excluded_delay=" << r.n_excluded_delay << '\n';
    std::cout << "pooled_cv_f1=" << format_fixed(rep.pooled.f1.value_or(0.0), 4)
              << " holdout_f1=" << format_fixed(rep.holdout->metrics.f1.value_or(0.0), 4) << '\n';
  }
  return 0;
}

void report_error(ErrorCategory category, std::string_view code, std::string_view message) {
  std::cerr << "error: category=" << to_string(category) << " code=" << code
            << " message=" << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wearable affect pipeline: ingest, featurize, train, evaluate, simulate prompts"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "overrides the config seed");
  app.add_option("--jobs", o.jobs, "worker threads (results do not depend on it)");
  app.add_option("--out-dir", o.out_dir, "directory for output artifacts");
  app.add_option("--set", o.overrides, "config override key=value (repeatable)");

  const auto add = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };
  add("synth", "write a synthetic corpus to --out-dir");
  add("ingest", "parse a corpus and list kept and excluded events")
      ->add_option("--corpus", o.corpus, "corpus directory");
  add("windows", "cut the pre-event windows")->add_option("--corpus", o.corpus, "corpus directory");
  add("features", "write the feature CSV")->add_option("--corpus", o.corpus, "corpus directory");
  add("train", "fit a model on a feature CSV")
      ->add_option("--features", o.features, "feature CSV");
  add("evaluate", "cross-validate and score the held-out split")
      ->add_option("--features", o.features, "feature CSV");
  auto* predict = add("predict", "append predicted labels to a feature CSV");
  predict->add_option("--model", o.model, "model file");
  predict->add_option("--features", o.features, "feature CSV");
  add("simulate-ema", "replay detections through the prompt gate")
      ->add_option("--detections", o.detections, "one timestamp per line");
  add("pipeline", "run everything end to end (synthetic corpus unless --corpus)")
      ->add_option("--corpus", o.corpus, "corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(ErrorCategory::Input, "InvalidArgument", e.what());
    return exit_status(ErrorCategory::Input);
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const Error& e) {
    report_error(e.category(), to_string(e.code()), e.what());
    return exit_status(e.category());
  } catch (const fs::filesystem_error& e) {
    report_error(ErrorCategory::Input, "Io", e.what());
    return exit_status(ErrorCategory::Input);
  } catch (const std::exception& e) {
    report_error(ErrorCategory::Internal, "InternalInvariant", e.what());
    return exit_status(ErrorCategory::Internal);
  }
}
