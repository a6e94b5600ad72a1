#include "dtcausal/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dtcausal/error.hpp"

namespace dtc {

double FiniteDist::mean() const {
  double m = 0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
  return m;
}

void FiniteDist::validate() const {
  if (values.empty() || values.size() != probs.size())
    throw ModelError("distribution needs matching nonempty values and probs");
  double s = 0;
  for (double p : probs) {
    if (!(p >= 0)) throw ModelError("distribution has a negative probability");
    s += p;
  }
  if (std::abs(s - 1) > 1e-9) throw ModelError("distribution probabilities do not sum to 1");
}

double mean(const OutcomeDist& d) {
  if (const auto* f = std::get_if<FiniteDist>(&d)) return f->mean();
  return std::get<NormalDist>(d).mu;
}

void DecisionProblem::validate() const {
  if (actions.empty()) throw ModelError("decision problem has no actions");
  for (const auto& a : actions) {
    auto it = hypothetical.find(a);
    if (it == hypothetical.end()) throw ModelError("no distribution for action '" + a + "'");
    if (const auto* f = std::get_if<FiniteDist>(&it->second)) {
      f->validate();
      if (const auto* t = std::get_if<TableLoss>(&loss)) {
        auto row = t->rows.find(a);
        for (std::size_t i = 0; i < f->values.size(); ++i) {
          if (f->probs[i] == 0) continue;
          if (row == t->rows.end() || !row->second.count(f->values[i]))
            throw ModelError("loss table has no entry for action '" + a + "'");
        }
      }
    } else {
      if (!(std::get<NormalDist>(it->second).sigma2 > 0)) throw ModelError("variance must be positive");
      if (std::holds_alternative<TableLoss>(loss))
        throw ModelError("a loss table needs a finite distribution for action '" + a + "'");
    }
    if (const auto* l = std::get_if<LinearLoss>(&loss); l && !l->coef.count(a))
      throw ModelError("linear loss has no coefficients for action '" + a + "'");
  }
}

Solution solve(const DecisionProblem& problem) {
  problem.validate();
  Solution s;
  for (const auto& a : problem.actions) {
    const OutcomeDist& d = problem.hypothetical.at(a);
    double loss = 0;
    if (const auto* t = std::get_if<TableLoss>(&problem.loss)) {
      const auto& f = std::get<FiniteDist>(d);
      for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.probs[i] != 0) loss += f.probs[i] * t->rows.at(a).at(f.values[i]);
    } else {
      const auto [c, b] = std::get<LinearLoss>(problem.loss).coef.at(a);
      loss = c + b * mean(d);
    }
    s.expected_loss.emplace_back(a, loss);
  }
  double best = s.expected_loss.front().second;
  for (const auto& [a, l] : s.expected_loss) best = std::min(best, l);
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  for (const auto& [a, l] : s.expected_loss)
    if (l <= best + slack) s.optimal_set.push_back(a);
  std::sort(s.optimal_set.begin(), s.optimal_set.end());
  s.optimal = s.optimal_set.front();
  return s;
}

double ace(const OutcomeDist& p1, const OutcomeDist& p0) { return mean(p1) - mean(p0); }

LognormalEffects lognormal_effects(const NormalPair& np) {
  if (!(np.sigma2 > 0)) throw ModelError("sigma2 must be positive");
  const double s2 = np.sigma2;
  auto var_z = [&](double mu) { return std::exp(2 * mu) * (std::exp(2 * s2) - std::exp(s2)); };
  return LognormalEffects{
      np.mu1 - np.mu0,
      std::exp(s2 / 2) * (std::exp(np.mu1) - std::exp(np.mu0)),
      std::exp(np.mu1 - np.mu0),
      var_z(np.mu1),
      var_z(np.mu0),
  };
}

FiniteDist prior_predictive(const std::vector<FiniteDist>& likelihood, const std::vector<double>& prior) {
  if (likelihood.empty() || likelihood.size() != prior.size())
    throw ModelError("prior needs one weight per likelihood component");
  double total = 0;
  for (double w : prior) {
    if (!(w >= 0)) throw ModelError("prior weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1) > 1e-9) throw ModelError("prior weights do not sum to 1");
  std::map<double, double> mix;
  for (std::size_t k = 0; k < likelihood.size(); ++k) {
    likelihood[k].validate();
    for (std::size_t i = 0; i < likelihood[k].values.size(); ++i)
      mix[likelihood[k].values[i]] += prior[k] * likelihood[k].probs[i];
  }
  FiniteDist out;
  for (const auto& [v, p] : mix) {
    out.values.push_back(v);
    out.probs.push_back(p);
  }
  return out;
}

FiniteDist plugin_estimate(const std::vector<double>& samples) {
  if (samples.empty()) throw ModelError("empty sample");
  std::map<double, std::size_t> counts;
  for (double x : samples) ++counts[x];
  FiniteDist out;
  for (const auto& [v, c] : counts) {
    out.values.push_back(v);
    out.probs.push_back(static_cast<double>(c) / static_cast<double>(samples.size()));
  }
  return out;
}

double plugin_mean(const std::vector<double>& samples) {
  if (samples.empty()) throw ModelError("empty sample");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

DecisionProblem problem_from_json(const nlohmann::ordered_json& doc) {
  DecisionProblem p;
  try {
    p.actions = doc.at("actions").get<std::vector<std::string>>();
    for (const auto& [a, d] : doc.at("distributions").items()) {
      if (d.contains("lognormal")) {
        const auto& ln = d.at("lognormal");
        p.hypothetical[a] = NormalDist{ln.at("mu").get<double>(), ln.at("sigma2").get<double>()};
      } else {
        p.hypothetical[a] = FiniteDist{d.at("values").get<std::vector<double>>(),
                                       d.at("probs").get<std::vector<double>>()};
      }
    }
    const auto& loss = doc.at("loss");
    if (loss.is_object() && loss.contains("linear")) {
      LinearLoss l;
      for (const auto& [a, c] : loss.at("linear").items())
        l.coef[a] = {c.value("intercept", 0.0), c.value("slope", 1.0)};
      p.loss = std::move(l);
    } else {
      TableLoss t;
      for (const auto& row : loss)
        t.rows[row.at("action").get<std::string>()][row.at("y").get<double>()] = row.at("loss").get<double>();
      p.loss = std::move(t);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed decision problem: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace dtc
