#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "affect/model.hpp"
#include "affect/rng.hpp"
#include "support.hpp"

using namespace affect;

namespace {

FeatureMatrix from_points(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
  FeatureMatrix m;
  for (std::size_t j = 0; j < x.front().size(); ++j) m.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < x.size(); ++i) m.rows.push_back({"p" + std::to_string(i), y[i], x[i]});
  return m;
}

FeatureMatrix eight_points() {
  return from_points({{1, 4}, {2, 1}, {3, 3}, {4, 6}, {5, 2}, {6, 5}, {7, 7}, {8, 0}},
                     {1, 1, 0, 1, 0, 0, 1, 0});
}

FeatureMatrix xor_points() { return from_points({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0}); }

FeatureMatrix two_moons(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double a = std::numbers::pi * rng.uniform();
    if (label == 0) {
      x.push_back({std::cos(a) + rng.normal(0.0, 0.05), std::sin(a) + rng.normal(0.0, 0.05)});
    } else {
      x.push_back({1.0 - std::cos(a) + rng.normal(0.0, 0.05), 0.5 - std::sin(a) + rng.normal(0.0, 0.05)});
    }
    y.push_back(label);
  }
  return from_points(x, y);
}

double accuracy(const AdaBoostModel& model, const FeatureMatrix& m) {
  std::size_t ok = 0;
  for (const auto& r : m.rows) ok += predict_values(model, r.values).label == r.label ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(m.n_rows());
}

AdaBoostModel random_model(Rng& rng, std::size_t d) {
  FeatureMatrix m;
  for (std::size_t j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
  for (int i = 0; i < 80; ++i) {
    FeatureRow r{"r" + std::to_string(i), static_cast<int>(rng.index(2)), {}};
    for (std::size_t j = 0; j < d; ++j) r.values.push_back(rng.normal());
    r.values[0] += r.label;
    m.rows.push_back(r);
  }
  BoostParams p;
  p.rounds = 15;
  p.tree.max_depth = 3;
  AdaBoostModel model = train_adaboost(m, p, 1);
  model.impute_values.assign(d, 0.25);
  model.meta.config_hash = "abc123";
  return model;
}

}  // namespace

TEST_CASE("stump on x = [1,2,8,9] splits at 5") {
  const FeatureMatrix m = from_points({{1}, {2}, {8}, {9}}, {0, 0, 1, 1});
  const std::vector<double> w(4, 0.25);
  const DecisionTree t = train_tree(m, w, TreeParams{1, 1});
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].feature == 0);
  CHECK(t.nodes[0].threshold == 5.0);
  CHECK(t.nodes[t.nodes[0].left].label == 0);
  CHECK(t.nodes[t.nodes[0].right].label == 1);
}

TEST_CASE("pure input gives a single leaf") {
  const FeatureMatrix m = from_points({{1}, {2}, {3}}, {1, 1, 1});
  const DecisionTree t = train_tree(m, std::vector<double>(3, 1.0 / 3), TreeParams{3, 1});
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].is_leaf());
  CHECK(t.nodes[0].label == 1);
  CHECK(test::throws_code([] { train_tree(FeatureMatrix{}, {}, TreeParams{}); }, ErrorCode::EmptyMatrix));
}

TEST_CASE("depth-2 tree shatters XOR") {
  const FeatureMatrix m = xor_points();
  const DecisionTree t = train_tree(m, std::vector<double>(4, 0.25), TreeParams{2, 1});
  for (const auto& r : m.rows) CHECK(t.predict(r.values) == r.label);
}

TEST_CASE("split ties go to the lowest feature, then the lowest threshold") {
  // both features separate the classes equally well
  const FeatureMatrix m = from_points({{1, 1}, {2, 2}, {3, 3}, {4, 4}}, {0, 0, 1, 1});
  const DecisionTree t = train_tree(m, std::vector<double>(4, 0.25), TreeParams{1, 1});
  CHECK(t.nodes[0].feature == 0);
  const FeatureMatrix sym = from_points({{1}, {2}, {3}, {4}}, {1, 0, 0, 1});
  const DecisionTree s = train_tree(sym, std::vector<double>(4, 0.25), TreeParams{1, 1});
  CHECK(s.nodes[0].threshold == 1.5);
}

TEST_CASE("min_leaf blocks small children") {
  const FeatureMatrix m = from_points({{1}, {2}, {3}, {4}, {5}}, {1, 0, 0, 0, 0});
  const DecisionTree t = train_tree(m, std::vector<double>(5, 0.2), TreeParams{1, 2});
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].threshold == 2.5);
}

TEST_CASE("AdaBoost matches the hand-stepped 8-point trace") {
  // tests/oracles/adaboost_trace.py
  const std::vector<double> errors = {0.25, 0.16666666666666666, 0.19999999999999998};
  const std::vector<double> alphas = {0.5493061443340549, 0.8047189562170503, 0.6931471805599454};
  const std::vector<std::vector<double>> weights = {
      {0.08333333333333333, 0.08333333333333333, 0.08333333333333333, 0.25000000000000006,
       0.08333333333333333, 0.08333333333333333, 0.25000000000000006, 0.08333333333333333},
      {0.25, 0.25, 0.049999999999999996, 0.15000000000000002, 0.049999999999999996,
       0.049999999999999996, 0.15000000000000002, 0.049999999999999996},
      {0.15625, 0.15625, 0.125, 0.09375, 0.125, 0.125, 0.09375, 0.125}};
  BoostParams p;
  p.rounds = 3;
  p.tree.max_depth = 1;
  BoostTrace trace;
  const AdaBoostModel model = train_adaboost(eight_points(), p, 0, &trace);
  REQUIRE(trace.errors.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(std::abs(trace.errors[t] - errors[t]) <= 1e-12);
    CHECK(std::abs(trace.alphas[t] - alphas[t]) <= 1e-12);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(trace.weights[t][i] - weights[t][i]) <= 1e-12);
  }
  CHECK(model.trees[0].nodes[0].feature == 0);
  CHECK(model.trees[0].nodes[0].threshold == 2.5);
  CHECK(model.trees[1].nodes[0].feature == 1);
  CHECK(model.trees[1].nodes[0].threshold == 5.5);
  CHECK(std::abs(trace.alphas[0] - 0.5 * std::log(3.0)) < 1e-15);
}

TEST_CASE("AdaBoost weights stay normalised and the error bound holds") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
      x.push_back({rng.normal(), rng.normal(), rng.normal()});
      y.push_back(rng.uniform() < 0.5 ? 1 : (x.back()[0] > 0 ? 1 : 0));
    }
    if (std::count(y.begin(), y.end(), 1) == 0) continue;
    BoostParams p;
    p.rounds = 20;
    p.tree.max_depth = 1 + static_cast<int>(rng.index(3));
    BoostTrace trace;
    try {
      train_adaboost(from_points(x, y), p, 0, &trace);
    } catch (const Error& e) {
      CHECK(e.code() != ErrorCode::InternalInvariant);
      continue;
    }
    for (const auto& w : trace.weights) {
      double s = 0.0;
      for (double v : w) s += v;
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    CHECK(trace.training_error <= trace.error_bound + 1e-12);
  }
}

TEST_CASE("XOR reaches full training accuracy with depth-2 trees") {
  BoostParams p;
  p.rounds = 50;
  p.tree.max_depth = 2;
  const FeatureMatrix m = xor_points();
  const AdaBoostModel model = train_adaboost(m, p, 0);
  CHECK(accuracy(model, m) == 1.0);
  CHECK(model.meta.stop_reason == "perfect_round");
  CHECK(model.alphas.back() == capped_alpha());
}

TEST_CASE("two moons: 40 points, depth 2, 50 rounds reach zero training error") {
  BoostParams p;
  p.rounds = 50;
  p.tree.max_depth = 2;
  const FeatureMatrix m = two_moons(40, 3);
  BoostTrace trace;
  const AdaBoostModel model = train_adaboost(m, p, 0, &trace);
  CHECK(accuracy(model, m) == 1.0);
  CHECK(trace.training_error == 0.0);
}

TEST_CASE("first round at chance is DegenerateRound") {
  const FeatureMatrix m = from_points({{1}, {1}, {1}, {1}}, {0, 1, 0, 1});
  BoostParams p;
  p.tree.max_depth = 1;
  CHECK(test::throws_code([&] { train_adaboost(m, p, 0); }, ErrorCode::DegenerateRound));
}

TEST_CASE("prediction scores and the tie rule") {
  DecisionTree plus;
  plus.nodes = {TreeNode{}};
  plus.nodes[0].label = 1;
  DecisionTree minus = plus;
  minus.nodes[0].label = 0;
  AdaBoostModel m;
  m.feature_names = {"a"};
  m.trees = {plus};
  m.alphas = {1.0};
  const Prediction one = predict_values(m, std::vector<double>{0.0});
  CHECK(one.label == 1);
  CHECK(one.score == 1.0);
  m.trees = {plus, minus};
  m.alphas = {0.6, 0.6};
  const Prediction tie = predict_values(m, std::vector<double>{0.0});
  CHECK(tie.score == 0.0);
  CHECK(tie.label == 0);
  CHECK(test::throws_code([&] { predict_values(m, std::vector<double>{0.0, 1.0}); },
                          ErrorCode::FeatureMismatch));
  FeatureVector fv{"x", 0, {"b"}, {1.0}};
  CHECK(test::throws_code([&] { predict(m, fv); }, ErrorCode::FeatureMismatch));
}

TEST_CASE("trees are invariant under a monotone feature transform") {
  Rng rng(13);
  std::vector<std::vector<double>> x, xt;
  std::vector<int> y;
  for (int i = 0; i < 50; ++i) {
    const double a = rng.normal(), b = rng.normal();
    x.push_back({a, b});
    xt.push_back({std::exp(a), b});
    y.push_back(a + 0.5 * b > 0.2 ? 1 : 0);
  }
  const std::vector<double> w(50, 0.02);
  const DecisionTree t1 = train_tree(from_points(x, y), w, TreeParams{3, 1});
  const DecisionTree t2 = train_tree(from_points(xt, y), w, TreeParams{3, 1});
  REQUIRE(t1.nodes.size() == t2.nodes.size());
  for (std::size_t i = 0; i < t1.nodes.size(); ++i) {
    CHECK(t1.nodes[i].feature == t2.nodes[i].feature);
    CHECK(t1.nodes[i].left == t2.nodes[i].left);
    CHECK(t1.nodes[i].label == t2.nodes[i].label);
  }
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(t1.predict(x[i]) == t2.predict(xt[i]));
}

TEST_CASE("model round trip preserves predictions exactly") {
  Rng rng(99);
  const AdaBoostModel model = random_model(rng, 6);
  std::stringstream buf;
  save_model(model, buf);
  const AdaBoostModel back = load_model(buf);
  CHECK(serialize_model(back) == serialize_model(model));
  CHECK(model_hash(back) == model_hash(model));
  CHECK(back.meta.config_hash == "abc123");
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(6);
    for (double& x : v) x = rng.normal(0.0, 2.0);
    if (i % 10 == 0) v[2] = std::numeric_limits<double>::quiet_NaN();
    const Prediction a = predict_values(model, v), b = predict_values(back, v);
    CHECK(a.label == b.label);
    CHECK(a.score == b.score);
  }
}

TEST_CASE("model files with a wrong magic or version are rejected") {
  Rng rng(4);
  const std::string text = serialize_model(random_model(rng, 3));
  std::istringstream bad_magic("NOT-A-MODEL\n" + text.substr(text.find('\n') + 1));
  CHECK(test::throws_code([&] { load_model(bad_magic); }, ErrorCode::CorruptModel));
  std::string v999 = text;
  v999.replace(v999.find("version 1"), 9, "version 999");
  std::istringstream future(v999);
  CHECK(test::throws_code([&] { load_model(future); }, ErrorCode::VersionMismatch));
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK(test::throws_code([&] { load_model(truncated); }, ErrorCode::CorruptModel));
  CHECK(test::throws_code([] { load_model(std::filesystem::path("/nonexistent/model.txt")); },
                          ErrorCode::Io));
}

TEST_CASE("training is deterministic") {
  Rng a(21), b(21);
  CHECK(model_hash(random_model(a, 5)) == model_hash(random_model(b, 5)));
}
