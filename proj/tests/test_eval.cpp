#include <doctest.h>

#include "affect/eval.hpp"
#include "affect/rng.hpp"
#include "support.hpp"

using namespace affect;

namespace {

// Two overlapping Gaussian classes, 3:1 imbalance, a few missing values.
FeatureMatrix overlapping(std::size_t n, std::uint64_t seed, double shift = 1.0) {
  Rng rng(seed);
  FeatureMatrix m;
  m.feature_names = {"a", "b", "c", "d"};
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 4 == 0 ? 0 : 1;
    FeatureRow r{"r" + std::to_string(i), y, {}};
    r.values = {rng.normal(y * shift, 1.0), rng.normal(y * shift * 0.5, 1.0), rng.normal(), rng.normal()};
    if (rng.uniform() < 0.05) r.values[1] = kMissing;
    m.rows.push_back(r);
  }
  return m;
}

ModelingConfig small_config() {
  ModelingConfig c;
  c.boost.rounds = 20;
  c.boost.tree.max_depth = 2;
  return c;
}

}  // namespace

TEST_CASE("confusion counts") {
  const std::vector<int> t = {1, 1, 0, 0}, p = {1, 0, 0, 1};
  const Confusion c = confusion(t, p);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 1);
  CHECK(c.fp == 1);
  CHECK(c.total() == 4);
  const Confusion same = confusion(t, t);
  CHECK(same.fp == 0);
  CHECK(same.fn == 0);
  CHECK(test::throws_code([] { confusion(std::vector<int>{1}, std::vector<int>{1, 0}); },
                          ErrorCode::LengthMismatch));
}

TEST_CASE("F1 examples and conventions") {
  CHECK(f1_score({1, 1, 0, 1}) == doctest::Approx(0.5));
  CHECK(std::abs(f1_score({9, 1, 0, 1}) - 0.9) < 1e-12);
  CHECK(f1_score({0, 0, 5, 3}) == 0.0);
  CHECK(f1_score({0, 2, 5, 0}) == 0.0);
  CHECK(f1_score({4, 0, 5, 0}) == 1.0);
  CHECK(test::throws_code([] { f1_score({0, 0, 7, 0}); }, ErrorCode::F1Undefined));
  CHECK_FALSE(f1_if_defined({0, 0, 7, 0}).has_value());
  CHECK_FALSE(precision({0, 0, 3, 2}).has_value());
  CHECK(*recall({0, 0, 3, 2}) == 0.0);
}

TEST_CASE("property: metrics lie in [0, 1] and match their definitions") {
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const Confusion c{rng.index(20), rng.index(20), rng.index(20), rng.index(20)};
    const auto f = f1_if_defined(c);
    if (!f) continue;
    CHECK(*f >= 0.0);
    CHECK(*f <= 1.0);
    if (c.tp > 0) {
      const double p = double(c.tp) / double(c.tp + c.fp), r = double(c.tp) / double(c.tp + c.fn);
      CHECK(*f == doctest::Approx(2 * p * r / (p + r)));
    }
  }
}

TEST_CASE("cross validation structure and pooling") {
  const FeatureMatrix m = overlapping(200, 1);
  const EvalReport r = cross_validate(m, 5, small_config(), 7);
  REQUIRE(r.folds.size() == 5);
  Confusion sum;
  std::size_t valid = 0;
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(r.folds[f].fold == f);
    CHECK(r.folds[f].metrics.f1.has_value());
    CHECK(r.folds[f].n_synthetic == r.folds[f].n_train - 2 * (r.folds[f].n_train / 4));
    sum += r.folds[f].metrics.counts;
    valid += r.folds[f].n_valid;
  }
  CHECK(sum == r.pooled.counts);
  CHECK(valid == m.n_rows());
  CHECK(*r.pooled.f1 > 0.6);
  CHECK(*r.pooled.f1 < 1.0);
}

TEST_CASE("cross validation is deterministic and independent of jobs") {
  const FeatureMatrix m = overlapping(160, 2);
  const auto a = report_json(cross_validate(m, 5, small_config(), 3, {}, 1));
  const auto b = report_json(cross_validate(m, 5, small_config(), 3, {}, 4));
  CHECK(a == b);
  CHECK(a != report_json(cross_validate(m, 5, small_config(), 4)));
}

TEST_CASE("a label copy placed only in validation rows does not raise F1") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    FeatureMatrix m = overlapping(200, 10 + seed, 0.6);
    m.feature_names.push_back("sentinel");
    for (auto& r : m.rows) r.values.push_back(0.0);
    const EvalReport clean = cross_validate(m, 5, small_config(), seed);
    CvHooks hooks;
    hooks.on_validation = [](FeatureMatrix& valid, std::size_t) {
      for (auto& r : valid.rows) r.values.back() = r.label;
    };
    const EvalReport probed = cross_validate(m, 5, small_config(), seed, hooks);
    CHECK(*probed.pooled.f1 <= *clean.pooled.f1 + 0.02);
    CHECK(*clean.pooled.f1 < 0.95);
  }
}

TEST_CASE("the same label copy present in training rows is exploited (control)") {
  FeatureMatrix m = overlapping(200, 10, 0.6);
  m.feature_names.push_back("sentinel");
  for (auto& r : m.rows) r.values.push_back(r.label);
  CHECK(*cross_validate(m, 5, small_config(), 0).pooled.f1 == 1.0);
}

TEST_CASE("holdout refits on the training rows only") {
  const FeatureMatrix m = overlapping(200, 4);
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < m.n_rows(); ++i) (i % 5 == 0 ? te : tr).push_back(i);
  FittedClassifier fitted;
  const HoldoutReport h = evaluate_holdout(m.subset(tr), m.subset(te), small_config(), 1, &fitted);
  CHECK(h.n_train == tr.size());
  CHECK(h.n_test == te.size());
  CHECK(h.metrics.counts.total() == te.size());
  CHECK(fitted.model.impute_values.size() == fitted.model.feature_names.size());
  CHECK(test::throws_code([&] { evaluate_holdout(m, m.subset(te), small_config(), 1); },
                          ErrorCode::InternalInvariant));
}

TEST_CASE("report documents carry hash and seed") {
  EvalReport r = cross_validate(overlapping(120, 5), 3, small_config(), 11);
  r.config_hash = "feedbeef";
  r.config = {{"seed", "11"}};
  const std::string json = report_json(r);
  CHECK(json.find("\"config_hash\": \"feedbeef\"") != std::string::npos);
  CHECK(json.find("\"seed\": 11") != std::string::npos);
  const std::string csv = folds_csv(r);
  CHECK(csv.rfind("# config_hash=feedbeef\n# seed=11\n", 0) == 0);
  CHECK(csv.find("\npooled,") != std::string::npos);
}
