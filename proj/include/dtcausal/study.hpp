#pragma once

// Observational study simulation under SUTDA: units are drawn i.i.d.
// from a covariate law, an assignment kernel and a response kernel, so a
// unit's response depends only on its own applied treatment.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dtc {

struct StudySpec {
  std::vector<std::string> covariate_states;
  std::vector<double> covariate_probs;
  /// P(T*=1 | x) for each covariate state.
  std::vector<double> p_treat;
  /// Numeric response values.
  std::vector<double> response_values;
  /// response[x][t]: distribution over response_values, t in {0, 1}.
  std::vector<std::vector<std::vector<double>>> response;

  /// Throws ModelError on inconsistent sizes or invalid probabilities.
  void validate() const;
};

/// {"covariate": {"states": [...], "probs": [...]}, "p_treat": [...],
///  "response": {"values": [...], "rows": [[[..t=0..], [..t=1..]], ...]}}
StudySpec study_from_json(const nlohmann::ordered_json& doc);

struct ArmSummary {
  std::size_t count = 0;
  /// Absent for an empty arm.
  std::optional<double> mean;
  std::optional<double> standard_error;
};

struct StudyResult {
  std::size_t n = 0;
  ArmSummary treated;
  ArmSummary control;
  /// Exact E(Y | F=t), computed from the kernels.
  double interventional_mean_1 = 0;
  double interventional_mean_0 = 0;
  /// Exact E(Y | T=t) in the observational regime.
  double observational_mean_1 = 0;
  double observational_mean_0 = 0;
};

/// Exact interventional and observational means without sampling.
StudyResult exact_study_means(const StudySpec& spec);

/// Draws n units with a generator seeded by `seed`. Throws ModelError for
/// n == 0.
StudyResult simulate_study(const StudySpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace dtc
