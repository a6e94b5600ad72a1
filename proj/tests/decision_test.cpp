#include <gtest/gtest.h>

#include <cmath>

#include "dtcausal/decision.hpp"
#include "dtcausal/error.hpp"
#include "dtcausal/model_io.hpp"
#include "support.hpp"

using namespace dtc;
using dtc::testing::corpus;

namespace {

DecisionProblem load_problem(const std::string& file) {
  return problem_from_json(Json::parse(dtc::read_file(corpus(file))));
}

DecisionProblem umbrella(double p) {
  DecisionProblem d;
  d.actions = {"0", "1"};
  d.hypothetical["0"] = FiniteDist{{0, 1}, {1 - p, p}};
  d.hypothetical["1"] = FiniteDist{{0, 1}, {1 - p, p}};
  d.loss = TableLoss{{{"0", {{0, 0}, {1, 1}}}, {"1", {{0, 0}, {1, 0}}}}};
  return d;
}

}  // namespace

TEST(Solve, UmbrellaFromFile) {
  const Solution s = solve(load_problem("umbrella.json"));
  ASSERT_EQ(s.expected_loss.size(), 2u);
  EXPECT_NEAR(s.expected_loss[0].second, 0.3, 1e-15);
  EXPECT_EQ(s.expected_loss[1].second, 0.0);
  EXPECT_EQ(s.optimal, "1");
}

TEST(Solve, UmbrellaAcrossRainProbabilities) {
  for (double p : {0.0, 0.01, 0.5, 1.0}) {
    const Solution s = solve(umbrella(p));
    EXPECT_NEAR(s.expected_loss[0].second, p, 1e-15);
    EXPECT_EQ(s.expected_loss[1].second, 0.0);
    if (p > 0) {
      EXPECT_EQ(s.optimal_set, std::vector<std::string>{"1"});
    } else {
      EXPECT_EQ(s.optimal_set.size(), 2u);
    }
  }
}

TEST(Solve, TieBreakIsLexicographic) {
  DecisionProblem d;
  d.actions = {"b", "a"};
  d.hypothetical["a"] = FiniteDist{{1, 2}, {0.5, 0.5}};
  d.hypothetical["b"] = FiniteDist{{1, 2}, {0.5, 0.5}};
  d.loss = LinearLoss{{{"a", {0, 1}}, {"b", {0, 1}}}};
  const Solution s = solve(d);
  EXPECT_EQ(s.expected_loss[0].second, s.expected_loss[1].second);
  EXPECT_EQ(s.optimal, "a");
  EXPECT_EQ(s.optimal_set, (std::vector<std::string>{"a", "b"}));
}

TEST(Solve, AspirinLinearLossGivesLogMeans) {
  const Solution s = solve(load_problem("aspirin.json"));
  EXPECT_DOUBLE_EQ(s.expected_loss[0].second, 1.2);
  EXPECT_DOUBLE_EQ(s.expected_loss[1].second, 0.9);
  EXPECT_EQ(s.optimal, "1");
}

TEST(Solve, ValidationErrors) {
  DecisionProblem d = umbrella(0.2);
  d.actions.push_back("2");
  EXPECT_THROW(solve(d), ModelError);
  d = umbrella(0.2);
  d.hypothetical["0"] = FiniteDist{{0, 1}, {0.5, 0.6}};
  EXPECT_THROW(solve(d), ModelError);
  d = umbrella(0.2);
  d.hypothetical["0"] = NormalDist{0, 1};
  EXPECT_THROW(solve(d), ModelError);
  EXPECT_THROW(problem_from_json(Json::parse(R"({"actions": ["a"]})")), ModelError);
}

TEST(Ace, Examples) {
  EXPECT_EQ(ace(NormalDist{0.7, 1}, NormalDist{0.7, 2}), 0.0);
  EXPECT_NEAR(ace(FiniteDist{{1, 0}, {0.7, 0.3}}, FiniteDist{{1, 0}, {0.2, 0.8}}), 0.5, 1e-15);
  const auto d = load_problem("aspirin.json");
  EXPECT_NEAR(ace(d.hypothetical.at("1"), d.hypothetical.at("0")), -0.3, 1e-15);
}

TEST(Lognormal, ZeroMeans) {
  const auto e = lognormal_effects({0, 0, 1.5});
  EXPECT_EQ(e.ace_y, 0);
  EXPECT_EQ(e.ace_z, 0);
  EXPECT_EQ(e.ratio, 1);
  EXPECT_EQ(e.var_z_1, e.var_z_0);
}

TEST(Lognormal, ClosedForm) {
  const auto e = lognormal_effects({1, 0, 2});
  EXPECT_NEAR(e.ace_z, std::exp(1.0) * (std::exp(1.0) - 1), 1e-12);
  EXPECT_NEAR(e.ratio, std::exp(1.0), 1e-12);
  EXPECT_NEAR(e.var_z_0, std::exp(4.0) - std::exp(2.0), 1e-9);
  EXPECT_THROW(lognormal_effects({1, 0, 0}), ModelError);
}

TEST(PriorPredictive, Mixtures) {
  const FiniteDist a{{0, 1}, {0.8, 0.2}}, b{{0, 1}, {0.4, 0.6}};
  const auto m = prior_predictive({a, b}, {0.5, 0.5});
  EXPECT_NEAR(m.probs[1], 0.4, 1e-15);
  const auto point = prior_predictive({a, b}, {1.0, 0.0});
  EXPECT_EQ(point.values, a.values);
  EXPECT_EQ(point.probs, a.probs);
  const auto w = prior_predictive({a, b}, {0.3, 0.7});
  EXPECT_NEAR(w.mean(), 0.3 * a.mean() + 0.7 * b.mean(), 1e-15);
  EXPECT_THROW(prior_predictive({a, b}, {0.5, 0.6}), ModelError);
}

TEST(Plugin, Estimates) {
  const auto e = plugin_estimate({1, 1, 0, 0});
  EXPECT_EQ(e.values, (std::vector<double>{0, 1}));
  EXPECT_EQ(e.probs, (std::vector<double>{0.5, 0.5}));
  const auto one = plugin_estimate({3});
  EXPECT_EQ(one.values, std::vector<double>{3});
  EXPECT_EQ(one.probs, std::vector<double>{1});
  EXPECT_EQ(plugin_mean({1, 2, 6}), 3);
  EXPECT_THROW(plugin_estimate({}), ModelError);
  EXPECT_THROW(plugin_mean({}), ModelError);
}
