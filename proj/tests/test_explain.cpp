#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "decepshap/error.hpp"
#include "decepshap/explain.hpp"
#include "support.hpp"

using namespace decepshap;
using testing::leaf_node;
using testing::split_node;

namespace {

TreeEnsemble named(std::size_t n) {
  TreeEnsemble m;
  for (std::size_t j = 0; j < n; ++j) m.feature_names.push_back("f" + std::to_string(j));
  return m;
}

FeatureMatrix rows(std::initializer_list<std::vector<double>> values) {
  FeatureMatrix m(values.begin()->size());
  for (const auto& r : values) m.append_row(r);
  return m;
}

double efficiency_gap(const Explanation& e) {
  return std::accumulate(e.phi.begin(), e.phi.end(), 0.0) + e.base_value - e.fx;
}

// Two levels over f0 then f1 with leaves 1, 2 (f0 low) and 4, 8 (f0 high).
TreeEnsemble two_feature_tree() {
  auto m = named(2);
  Tree t;
  t.nodes = {split_node(0, 0.5, 1, 2), split_node(1, 0.5, 3, 4), split_node(1, 0.5, 5, 6),
             leaf_node(1.0),           leaf_node(2.0),           leaf_node(4.0),
             leaf_node(8.0)};
  m.trees.push_back(t);
  return m;
}

Explanation make(std::vector<std::string> names, std::vector<double> phi, double base,
                 std::vector<double> values) {
  Explanation e;
  e.feature_names = std::move(names);
  e.phi = std::move(phi);
  e.base_value = base;
  e.fx = base + std::accumulate(e.phi.begin(), e.phi.end(), 0.0);
  e.feature_values = std::move(values);
  return e;
}

struct Xor {
  TreeEnsemble model;
  FeatureMatrix X;
};

const Xor& xor_model() {
  static const Xor fixture = [] {
    const auto table = parse_numeric_csv(read_file(testing::fixture("xor.csv")));
    Xor out{{}, FeatureMatrix(2)};
    std::vector<int> y;
    for (const auto& row : table.rows) {
      out.X.append_row(std::span<const double>(row).first(2));
      y.push_back(static_cast<int>(row[2]));
    }
    TrainConfig cfg;
    cfg.num_rounds = 50;
    cfg.max_depth = 2;
    out.model = train(out.X, y, cfg, {"x0", "x1"}).model;
    return out;
  }();
  return fixture;
}

}  // namespace

TEST_CASE("hand-enumerated two-feature game") {
  // Background margins 1 and 2; x = (1, 1) has margin 8.
  // v() = 1.5, v({0}) = 6, v({1}) = 2, v({0,1}) = 8.
  const auto m = two_feature_tree();
  const auto bg = rows({{0, 0}, {0, 1}});
  const std::vector<double> x{1, 1};
  for (auto method : {ShapMethod::kExact, ShapMethod::kTree}) {
    const auto e = explain(m, x, bg, method);
    CHECK(e.base_value == 1.5);
    CHECK(e.fx == 8.0);
    CHECK(e.phi[0] == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(e.phi[1] == doctest::Approx(1.25).epsilon(1e-15));
  }
}

TEST_CASE("constant model explains to zeros") {
  auto m = named(4);
  m.base_score = 0.37;
  std::mt19937_64 rng(1);
  const auto bg = testing::random_matrix(rng, 9, 4);
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  for (auto method : {ShapMethod::kExact, ShapMethod::kTree}) {
    const auto e = explain(m, x, bg, method);
    CHECK(e.base_value == 0.37);
    CHECK(e.fx == 0.37);
    for (double p : e.phi) CHECK(p == 0.0);
  }
}

TEST_CASE("stump with x opposite every background row") {
  auto m = named(3);
  m.base_score = 0.25;
  Tree t;
  t.nodes = {split_node(1, 0.0, 1, 2), leaf_node(-1.0), leaf_node(1.0)};
  m.trees.push_back(t);
  const auto bg = rows({{0.3, -0.5, 0.9}, {-0.2, -0.1, 0.0}, {0.0, -2.0, 5.0}});
  const std::vector<double> x{7.0, 0.5, -3.0};
  for (auto method : {ShapMethod::kExact, ShapMethod::kTree}) {
    const auto e = explain(m, x, bg, method);
    CHECK(e.phi[1] == doctest::Approx(e.fx - e.base_value).epsilon(1e-15));
    CHECK(e.phi[0] == 0.0);
    CHECK(e.phi[2] == 0.0);
  }
}

TEST_CASE("features outside every tree get exactly zero") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = testing::random_model(rng, 4, 6, 3, trial % 2 ? 4 : 0);
    // Widen the model with two unused columns.
    m.feature_names.push_back("u0");
    m.feature_names.push_back("u1");
    const auto bg = testing::random_matrix(rng, 15, 6, trial % 2 ? 4 : 0);
    const auto x = testing::random_matrix(rng, 1, 6, trial % 2 ? 4 : 0);
    for (auto method : {ShapMethod::kExact, ShapMethod::kTree}) {
      const auto e = explain(m, x.row(0), bg, method);
      CHECK(e.phi[4] == 0.0);
      CHECK(e.phi[5] == 0.0);
    }
  }
}

TEST_CASE("duplicated feature columns get equal attributions") {
  auto m = named(3);
  Tree a, b, c;
  a.nodes = {split_node(0, 0.5, 1, 2), leaf_node(-1.0), leaf_node(2.0)};
  b.nodes = {split_node(1, 0.5, 1, 2), leaf_node(-1.0), leaf_node(2.0)};
  c.nodes = {split_node(2, 0.0, 1, 2), leaf_node(0.5), leaf_node(-0.25)};
  m.trees = {a, b, c};
  const auto bg = rows({{0, 0, -1}, {1, 1, 1}, {0, 0, 2}, {0.2, 0.2, -0.3}});
  const std::vector<double> x{1, 1, 0.7};
  for (auto method : {ShapMethod::kExact, ShapMethod::kTree}) {
    const auto e = explain(m, x, bg, method);
    CHECK(std::abs(e.phi[0] - e.phi[1]) < 1e-9);
    CHECK(e.phi[0] != 0.0);
  }
}

TEST_CASE("explanations are linear in the ensemble") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = testing::random_model(rng, 5, 4, 3);
    const auto b = testing::random_model(rng, 5, 3, 3);
    auto sum = a;
    sum.base_score = a.base_score + b.base_score;
    sum.trees.insert(sum.trees.end(), b.trees.begin(), b.trees.end());
    const auto bg = testing::random_matrix(rng, 12, 5);
    const auto x = testing::random_matrix(rng, 1, 5);
    for (auto method : {ShapMethod::kExact, ShapMethod::kTree}) {
      const auto ea = explain(a, x.row(0), bg, method);
      const auto eb = explain(b, x.row(0), bg, method);
      const auto es = explain(sum, x.row(0), bg, method);
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(es.phi[j] - ea.phi[j] - eb.phi[j]) < 1e-9);
    }
  }
}

TEST_CASE("tree recursion agrees with exact enumeration") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int levels = trial % 3 == 0 ? 3 : 0;
    const auto m = testing::random_model(rng, 5, 8, 4, levels);
    const auto bg = testing::random_matrix(rng, 20, 5, levels);
    const auto x = testing::random_matrix(rng, 1, 5, levels);
    const auto exact = shapley_exact(m, x.row(0), bg);
    const auto tree = shapley_tree(m, x.row(0), bg);
    CHECK(exact.fx == tree.fx);
    CHECK(exact.base_value == tree.base_value);
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(exact.phi[j] - tree.phi[j]) < 1e-9);
    CHECK(std::abs(efficiency_gap(exact)) < 1e-9);
    CHECK(std::abs(efficiency_gap(tree)) < 1e-9);
  }
}

TEST_CASE("explanations report fx as the model margin and base as the background mean") {
  std::mt19937_64 rng(5);
  const auto m = testing::random_model(rng, 3, 5, 3);
  const auto bg = testing::random_matrix(rng, 10, 3);
  const auto x = testing::random_matrix(rng, 1, 3);
  const auto e = shapley_tree(m, x.row(0), bg);
  CHECK(e.fx == predict_margin(m, x.row(0)));
  double mean = 0.0;
  for (std::size_t r = 0; r < bg.rows(); ++r) mean += predict_margin(m, bg.row(r));
  CHECK(e.base_value == doctest::Approx(mean / 10.0).epsilon(1e-14));
  CHECK(e.feature_names == m.feature_names);
  CHECK(e.feature_values == std::vector<double>(x.row(0).begin(), x.row(0).end()));
}

TEST_CASE("invalid explanation inputs are data errors") {
  const auto m = two_feature_tree();
  const std::vector<double> x{1, 1};
  CHECK_THROWS_AS(shapley_exact(m, x, FeatureMatrix(2)), DataError);
  CHECK_THROWS_AS(shapley_tree(m, x, FeatureMatrix(2)), DataError);
  CHECK_THROWS_AS(shapley_tree(m, std::vector<double>{1}, rows({{0, 0}})), DataError);
  CHECK_THROWS_AS(shapley_tree(m, x, rows({{0, 0, 0}})), DataError);
  CHECK_THROWS_AS(shapley_exact(m, std::vector<double>{1, std::nan("")}, rows({{0, 0}})),
                  DataError);
  CHECK_THROWS_AS(shapley_tree(m, x, rows({{0, INFINITY}})), DataError);
  CHECK_THROWS_AS(shapley_exact(named(25), std::vector<double>(25, 0.0), FeatureMatrix(25, 25)),
                  DataError);
}

TEST_CASE("global summary ranks by mean absolute phi with ties in column order") {
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const std::vector<Explanation> es{make(names, {0.5, -2.0, 0.0, 0.5}, 0.0, {0, 0, 0, 0}),
                                    make(names, {-0.5, 1.0, 0.0, -0.5}, 0.0, {0, 0, 0, 0})};
  const auto s = global_summary(es);
  REQUIRE(s.ranking.size() == 4);
  CHECK(s.ranking[0].feature == "b");
  CHECK(s.ranking[0].mean_abs_phi == 1.5);
  CHECK(s.ranking[1].feature == "a");
  CHECK(s.ranking[2].feature == "d");
  CHECK(s.ranking[3].feature == "c");
  CHECK(s.ranking[3].mean_abs_phi == 0.0);
  CHECK_THROWS_AS(global_summary(std::vector<Explanation>{}), DataError);
}

TEST_CASE("single-feature model ranks that feature first") {
  auto m = named(4);
  Tree t;
  t.nodes = {split_node(2, 0.0, 1, 2), leaf_node(-1.0), leaf_node(1.0)};
  m.trees.push_back(t);
  std::mt19937_64 rng(6);
  const auto X = testing::random_matrix(rng, 10, 4);
  const auto s = global_summary(m, X, X);
  CHECK(s.ranking[0].feature == "f2");
  CHECK(s.ranking[0].mean_abs_phi > 0.0);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(s.ranking[k].mean_abs_phi == 0.0);
    CHECK(s.ranking[k].index == (k <= 2 ? k - 1 : k));
  }
  CHECK_THROWS_AS(global_summary(m, FeatureMatrix(4), X), DataError);
}

TEST_CASE("XOR summary matches the reference explainer") {
  const auto& fx = xor_model();
  const auto ref = testing::load_json("reference_run.json")["xor"];
  const auto s = global_summary(fx.model, fx.X, fx.X);
  const auto order = ref["ranking"].get<std::vector<std::size_t>>();
  for (std::size_t k = 0; k < order.size(); ++k) {
    CHECK(s.ranking[k].index == order[k]);
    CHECK(s.ranking[k].mean_abs_phi ==
          doctest::Approx(ref["mean_abs_phi"][order[k]].get<double>()).epsilon(1e-9));
  }
}

TEST_CASE("waterfall orders by |phi| and accumulates from base to fx") {
  const auto e = make({"A", "B"}, {2.0, -1.0}, 0.5, {10, 20});
  const auto w = waterfall(e);
  REQUIRE(w.steps.size() == 2);
  CHECK(w.steps[0].feature == "A");
  CHECK(w.steps[0].running_total == 2.5);
  CHECK(w.steps[1].feature == "B");
  CHECK(w.steps[1].running_total == 1.5);
  CHECK(w.steps[1].value == 20);
  CHECK(w.fx == 1.5);
  CHECK(direction(w.steps[0].phi) == "positive");
  CHECK(direction(w.steps[1].phi) == "negative");
  CHECK(direction(0.0) == "zero");
}

TEST_CASE("waterfall with zero attributions stays at the base value") {
  const auto e = make({"A", "B", "C"}, {0.0, 0.0, 0.0}, -0.185, {1, 2, 3});
  const auto w = waterfall(e);
  for (const auto& s : w.steps) CHECK(s.running_total == -0.185);
  CHECK(w.fx == -0.185);
  // Ties keep column order.
  CHECK(w.steps[0].feature == "A");
  CHECK(w.steps[2].feature == "C");
}

TEST_CASE("waterfall schema example from base 0.032 to 3.459") {
  auto e = make({"Analytic", "av_word_len", "av_sent_len"}, {1.9, 1.1, 0.427}, 0.032, {3, 5.1, 17});
  e.fx = 3.459;
  CHECK(std::abs(std::accumulate(e.phi.begin(), e.phi.end(), 0.0) - 3.427) < 1e-12);
  const auto w = waterfall(e);
  CHECK(std::abs(w.steps.back().running_total - w.fx) < 1e-9);
  CHECK(w.steps.front().feature == "Analytic");
  const auto json = nlohmann::json::parse(waterfall_to_json(w));
  CHECK(json["base_value"].get<double>() == 0.032);
  CHECK(json["fx"].get<double>() == 3.459);
  CHECK(json["steps"][0]["direction"] == "positive");
  CHECK(json["steps"][2]["running_total"].get<double>() == w.steps[2].running_total);
}

TEST_CASE("waterfall running totals end at fx on trained models") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = testing::random_model(rng, 6, 10, 3);
    const auto bg = testing::random_matrix(rng, 25, 6);
    const auto x = testing::random_matrix(rng, 1, 6);
    const auto w = waterfall(shapley_tree(m, x.row(0), bg));
    CHECK(std::abs(w.steps.back().running_total - w.fx) < 1e-9);
    for (std::size_t k = 1; k < w.steps.size(); ++k) {
      CHECK(std::abs(w.steps[k - 1].phi) >= std::abs(w.steps[k].phi));
    }
  }
}

TEST_CASE("interaction reports carry one record per explanation") {
  const std::vector<std::string> names{"a", "b", "c"};
  const std::vector<Explanation> es{make(names, {1, 2, 3}, 0, {10, 20, 30}),
                                    make(names, {4, 5, 6}, 0, {40, 50, 60}),
                                    make(names, {7, 8, 9}, 0, {70, 80, 90})};
  const auto r = interaction_report(es, "b", "c");
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[1].primary_value == 50);
  CHECK(r.records[1].phi_primary == 5);
  CHECK(r.records[1].coloring_value == 60);
  CHECK(interaction_to_csv(r) == "primary_value,phi_primary,coloring_value\n20,2,30\n50,5,60\n80,8,90\n");
  CHECK(interaction_report(std::vector<Explanation>{}, "a", "b").records.empty());
  CHECK_THROWS_AS(interaction_report(es, "a", "zzz"), UsageError);
}

TEST_CASE("XOR interaction records add up to fx minus base") {
  const auto& fx = xor_model();
  const auto es = explain_all(fx.model, fx.X.head(40), fx.X, ShapMethod::kTree);
  const auto r0 = interaction_report(es, "x0", "x1");
  const auto r1 = interaction_report(es, "x1", "x0");
  REQUIRE(r0.records.size() == 40);
  for (std::size_t i = 0; i < es.size(); ++i) {
    CHECK(std::abs(r0.records[i].phi_primary + r1.records[i].phi_primary -
                   (es[i].fx - es[i].base_value)) < 1e-9);
    CHECK(r0.records[i].coloring_value == r1.records[i].primary_value);
  }
}

TEST_CASE("explanation and summary JSON layouts") {
  const auto e = make({"a", "b"}, {0.25, -0.5}, 0.1, {1, 2});
  const auto j = nlohmann::json::parse(explanation_to_json(e));
  CHECK(j["feature_names"] == nlohmann::json({"a", "b"}));
  CHECK(j["phi"][1].get<double>() == -0.5);
  CHECK(j["base_value"].get<double>() == 0.1);
  CHECK(j.contains("fx"));
  CHECK(j["feature_values"][0].get<double>() == 1.0);

  const auto s = nlohmann::json::parse(summary_to_json(global_summary(std::vector<Explanation>{e})));
  CHECK(s["ranking"][0]["feature"] == "b");
  CHECK(s["ranking"][0]["mean_abs_phi"].get<double>() == 0.5);
}
