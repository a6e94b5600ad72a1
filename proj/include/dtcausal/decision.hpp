#pragma once

// Decision problems over hypothetical outcome distributions, average
// causal effects and the lognormal effect measures.

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace dtc {

/// Finite distribution over numeric outcomes.
struct FiniteDist {
  std::vector<double> values;
  std::vector<double> probs;

  double mean() const;
  /// Throws ModelError on size mismatch, negative mass or a sum away from 1.
  void validate() const;
};

/// Outcome Y ~ N(mu, sigma2), e.g. a log response time.
struct NormalDist {
  double mu = 0;
  double sigma2 = 1;
};

using OutcomeDist = std::variant<FiniteDist, NormalDist>;

double mean(const OutcomeDist& d);

/// L(y, a) looked up per action and outcome value.
struct TableLoss {
  std::map<std::string, std::map<double, double>> rows;
};

/// L(y, a) = intercept[a] + slope[a] * y.
struct LinearLoss {
  std::map<std::string, std::pair<double, double>> coef;
};

using Loss = std::variant<TableLoss, LinearLoss>;

struct DecisionProblem {
  std::vector<std::string> actions;
  std::map<std::string, OutcomeDist> hypothetical;
  Loss loss;

  void validate() const;
};

struct Solution {
  /// Expected loss per action, in action order.
  std::vector<std::pair<std::string, double>> expected_loss;
  /// Every action within 1e-12 (relative) of the minimum.
  std::vector<std::string> optimal_set;
  /// Lexicographically first member of optimal_set.
  std::string optimal;
};

Solution solve(const DecisionProblem& problem);

/// E_{P1}(Y) - E_{P0}(Y).
double ace(const OutcomeDist& p1, const OutcomeDist& p0);

struct NormalPair {
  double mu1 = 0;
  double mu0 = 0;
  double sigma2 = 1;
};

/// Effects on Y = log Z and on Z itself when Y ~ N(mu_x, sigma2).
struct LognormalEffects {
  double ace_y;
  double ace_z;
  double ratio;
  double var_z_1;
  double var_z_0;
};

/// Throws ModelError unless sigma2 > 0.
LognormalEffects lognormal_effects(const NormalPair& np);

/// sum_k prior[k] * likelihood[k]. Throws ModelError when the prior does
/// not sum to 1 within 1e-9.
FiniteDist prior_predictive(const std::vector<FiniteDist>& likelihood, const std::vector<double>& prior);

/// Empirical distribution; throws ModelError on an empty sample.
FiniteDist plugin_estimate(const std::vector<double>& samples);
/// Sample mean, the plug-in estimate of a normal mean.
double plugin_mean(const std::vector<double>& samples);

/// {"actions": [...],
///  "distributions": {"a": {"values": [...], "probs": [...]} | {"lognormal": {"mu": m, "sigma2": s}}},
///  "loss": [{"action": "a", "y": 1, "loss": 0.5}, ...] | {"linear": {"a": {"intercept": 0, "slope": 1}}}}
DecisionProblem problem_from_json(const nlohmann::ordered_json& doc);

}  // namespace dtc
