#include "dtcausal/study.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dtcausal/error.hpp"

namespace dtc {

namespace {

void check_probs(const std::vector<double>& p, std::size_t n, const std::string& what) {
  if (p.size() != n) throw ModelError(what + ": wrong number of entries");
  double s = 0;
  for (double x : p) {
    if (!(x >= 0)) throw ModelError(what + ": negative entry");
    s += x;
  }
  if (std::abs(s - 1) > 1e-9) throw ModelError(what + ": probabilities do not sum to 1");
}

double mean_of(const StudySpec& s, std::size_t x, std::size_t t) {
  double m = 0;
  for (std::size_t k = 0; k < s.response_values.size(); ++k) m += s.response[x][t][k] * s.response_values[k];
  return m;
}

}  // namespace

void StudySpec::validate() const {
  const std::size_t nx = covariate_states.size();
  if (nx == 0) throw ModelError("study needs at least one covariate state");
  check_probs(covariate_probs, nx, "covariate law");
  if (p_treat.size() != nx) throw ModelError("p_treat needs one entry per covariate state");
  for (double p : p_treat)
    if (!(p >= 0 && p <= 1)) throw ModelError("p_treat entries must lie in [0, 1]");
  if (response_values.empty()) throw ModelError("response needs at least one value");
  if (response.size() != nx) throw ModelError("response needs one row pair per covariate state");
  for (const auto& rows : response) {
    if (rows.size() != 2) throw ModelError("response rows must cover t = 0 and t = 1");
    for (const auto& r : rows) check_probs(r, response_values.size(), "response row");
  }
}

StudySpec study_from_json(const nlohmann::ordered_json& doc) {
  StudySpec s;
  try {
    const auto& cov = doc.at("covariate");
    s.covariate_states = cov.at("states").get<std::vector<std::string>>();
    s.covariate_probs = cov.at("probs").get<std::vector<double>>();
    s.p_treat = doc.at("p_treat").get<std::vector<double>>();
    const auto& resp = doc.at("response");
    s.response_values = resp.at("values").get<std::vector<double>>();
    s.response = resp.at("rows").get<std::vector<std::vector<std::vector<double>>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed study document: ") + e.what());
  }
  s.validate();
  return s;
}

StudyResult exact_study_means(const StudySpec& spec) {
  spec.validate();
  StudyResult r;
  double w1 = 0, w0 = 0;
  for (std::size_t x = 0; x < spec.covariate_states.size(); ++x) {
    const double px = spec.covariate_probs[x];
    r.interventional_mean_1 += px * mean_of(spec, x, 1);
    r.interventional_mean_0 += px * mean_of(spec, x, 0);
    w1 += px * spec.p_treat[x];
    w0 += px * (1 - spec.p_treat[x]);
    r.observational_mean_1 += px * spec.p_treat[x] * mean_of(spec, x, 1);
    r.observational_mean_0 += px * (1 - spec.p_treat[x]) * mean_of(spec, x, 0);
  }
  r.observational_mean_1 = w1 > 0 ? r.observational_mean_1 / w1 : std::nan("");
  r.observational_mean_0 = w0 > 0 ? r.observational_mean_0 / w0 : std::nan("");
  return r;
}

StudyResult simulate_study(const StudySpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ModelError("study size must be at least 1");
  StudyResult r = exact_study_means(spec);
  r.n = n;
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> cov(spec.covariate_probs.begin(), spec.covariate_probs.end());
  std::vector<std::vector<std::discrete_distribution<std::size_t>>> resp;
  for (const auto& rows : spec.response) {
    resp.emplace_back();
    for (const auto& row : rows) resp.back().emplace_back(row.begin(), row.end());
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double sum[2] = {0, 0}, sumsq[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = cov(rng);
    const std::size_t t = unif(rng) < spec.p_treat[x] ? 1 : 0;
    const double y = spec.response_values[resp[x][t](rng)];
    sum[t] += y;
    sumsq[t] += y * y;
    ++count[t];
  }
  auto summarise = [&](std::size_t t) {
    ArmSummary a;
    a.count = count[t];
    if (count[t] == 0) return a;
    const double m = sum[t] / static_cast<double>(count[t]);
    a.mean = m;
    if (count[t] > 1) {
      const double var = (sumsq[t] - static_cast<double>(count[t]) * m * m) / static_cast<double>(count[t] - 1);
      a.standard_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(count[t]));
    }
    return a;
  };
  r.treated = summarise(1);
  r.control = summarise(0);
  return r;
}

}  // namespace dtc
