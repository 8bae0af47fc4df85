#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "affect/config.hpp"
#include "affect/ingest.hpp"
#include "affect/pipeline.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Result run(const test::TempDir& dir, const std::string& args) {
  const fs::path out = dir.path() / "stdout.txt", err = dir.path() / "stderr.txt";
  const std::string cmd = std::string(AFFECTCTL_PATH) + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const std::string kSmall =
    " --set synth_strong=40 --set synth_neutral=20 --set synth_mistake=2 --set synth_sessions=3"
    " --set boost_rounds=20";

}  // namespace

TEST_CASE("pipeline, evaluate, train and predict on a small synthetic corpus") {
  test::TempDir dir("cli");
  const fs::path corpus = dir.path() / "corpus";
  const fs::path out = dir.path() / "out";
  REQUIRE(run(dir, "synth --seed 3 --out-dir " + corpus.string() + kSmall).status == 0);
  CHECK(fs::exists(corpus / "annotations.csv"));
  CHECK(fs::exists(corpus / "sessions" / "s01" / "BVP.csv"));

  const Result p = run(dir, "pipeline --seed 3 --jobs 2 --corpus " + corpus.string() +
                                " --out-dir " + out.string() + kSmall);
  REQUIRE(p.status == 0);
  CHECK(p.out.find("pooled_cv_f1=") != std::string::npos);
  CHECK(p.out.find("learning_samples=60") != std::string::npos);
  CHECK(p.err.find("seed = 3") != std::string::npos);

  affect::PipelineConfig cfg;
  affect::apply_overrides(cfg, {"seed=3", "synth_strong=40", "synth_neutral=20", "synth_mistake=2",
                                "synth_sessions=3", "boost_rounds=20"});
  const std::string hash = cfg.hash();
  for (const char* f : {"events.csv", "windows.csv", "features.csv", "folds.csv",
                        "effective_config.txt", "model.txt", "report.json"}) {
    const std::string text = slurp(out / f);
    CAPTURE(f);
    CHECK(text.find(hash) != std::string::npos);
  }
  CHECK(slurp(out / "model.txt").find("\nseed 3\n") != std::string::npos);
  CHECK(slurp(out / "features.csv").find("# seed=3\n") != std::string::npos);

  const fs::path e1 = dir.path() / "e1", e2 = dir.path() / "e2";
  const std::string features = (out / "features.csv").string();
  REQUIRE(run(dir, "evaluate --seed 3 --features " + features + " --out-dir " + e1.string() + kSmall).status == 0);
  REQUIRE(run(dir, "evaluate --seed 3 --features " + features + " --out-dir " + e2.string() + kSmall).status == 0);
  CHECK(slurp(e1 / "report.json") == slurp(e2 / "report.json"));
  CHECK(slurp(e1 / "folds.csv") == slurp(e2 / "folds.csv"));
  CHECK(slurp(e1 / "report.json").find("\"holdout\"") != std::string::npos);

  const fs::path t = dir.path() / "train";
  REQUIRE(run(dir, "train --seed 3 --features " + features + " --out-dir " + t.string() + kSmall).status == 0);
  CHECK(slurp(t / "model.txt").rfind("AFFECT-ADABOOST\n", 0) == 0);

  const fs::path pr = dir.path() / "pred";
  REQUIRE(run(dir, "predict --model " + (out / "model.txt").string() + " --features " + features +
                       " --out-dir " + pr.string())
              .status == 0);
  std::istringstream lines(slurp(pr / "predictions.csv"));
  std::string line, header;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (line.starts_with("#")) continue;
    if (header.empty()) {
      header = line;
      continue;
    }
    ++rows;
  }
  CHECK(header.find(",predicted_label,score") != std::string::npos);
  CHECK(rows == 60);
}

TEST_CASE("windows, ingest and features commands") {
  test::TempDir dir("cli-steps");
  const fs::path corpus = dir.path() / "corpus";
  REQUIRE(run(dir, "synth --out-dir " + corpus.string() + kSmall + " --set synth_delay_too_large=2").status == 0);
  const Result ing = run(dir, "ingest --corpus " + corpus.string() + " --out-dir " + (dir.path() / "i").string());
  REQUIRE(ing.status == 0);
  CHECK(ing.out.find("kept=60 excluded=4") != std::string::npos);
  const std::string events = slurp(dir.path() / "i" / "events.csv");
  CHECK(events.find(",excluded,DelayTooLarge") != std::string::npos);
  CHECK(events.find(",excluded,MistakeMark") != std::string::npos);
  const Result win = run(dir, "windows --corpus " + corpus.string() + " --out-dir " + (dir.path() / "w").string());
  REQUIRE(win.status == 0);
  CHECK(win.out.find("windows=60 dropped=0") != std::string::npos);
  const Result feat = run(dir, "features --corpus " + corpus.string() + " --out-dir " + (dir.path() / "f").string());
  REQUIRE(feat.status == 0);
  CHECK(feat.out.find("rows=60 features=") != std::string::npos);
}

TEST_CASE("simulate-ema writes stamped decisions") {
  test::TempDir dir("cli-ema");
  {
    std::ofstream d(dir.path() / "det.csv");
    d << "time\n0\n100\n5000\n9000\n";
  }
  const Result r = run(dir, "simulate-ema --set ema_ask_probability=1 --detections " +
                                (dir.path() / "det.csv").string() + " --out-dir " + dir.path().string());
  REQUIRE(r.status == 0);
  CHECK(r.out.find("prompts=3") != std::string::npos);
  const std::string text = slurp(dir.path() / "decisions.csv");
  CHECK(text.find("# config_hash=") == 0);
  CHECK(text.find("100,suppress,idle") != std::string::npos);
}

TEST_CASE("errors exit with a category status") {
  test::TempDir dir("cli-err");
  const std::string out = " --out-dir " + dir.path().string();

  Result r = run(dir, "pipeline --set no_such_key=1" + out);
  CHECK(r.status == 2);
  CHECK(r.err.find("error: category=input code=Config") != std::string::npos);

  r = run(dir, "pipeline --config /nonexistent.conf" + out);
  CHECK(r.status == 2);

  r = run(dir, "frobnicate" + out);
  CHECK(r.status == 2);

  r = run(dir, "train --features /nonexistent.csv" + out);
  CHECK(r.status == 2);
  CHECK(r.err.find("code=Io") != std::string::npos);

  affect::write_text_file(dir.path() / "bad_model.txt", "NOPE\n");
  affect::write_text_file(dir.path() / "f.csv", "event_id,label,a\nx,1,0.5\n");
  r = run(dir, "predict --model " + (dir.path() / "bad_model.txt").string() + " --features " +
                   (dir.path() / "f.csv").string() + out);
  CHECK(r.status == 2);
  CHECK(r.err.find("code=CorruptModel") != std::string::npos);

  const fs::path corpus = dir.path() / "corpus";
  fs::create_directories(corpus / "sessions");
  affect::write_text_file(corpus / "annotations.csv",
                          std::string(affect::kAnnotationHeader) + "\ne1,100,angry,0\n");
  r = run(dir, "ingest --corpus " + corpus.string() + out);
  CHECK(r.status == 3);
  CHECK(r.err.find("category=data_validation code=UnknownLabel") != std::string::npos);

  affect::write_text_file(dir.path() / "det.csv", "5\n4\n");
  r = run(dir, "simulate-ema --detections " + (dir.path() / "det.csv").string() + out);
  CHECK(r.status == 3);
  CHECK(r.err.find("code=NonMonotoneTime") != std::string::npos);
}
