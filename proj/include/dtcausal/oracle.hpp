#pragma once

// Brute-force semantics for finite multi-regime models. Every quantity is
// computed by exhaustive enumeration of the joint state space.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "dtcausal/graph.hpp"
#include "dtcausal/statement.hpp"

namespace dtc {

struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  /// One distribution over the child's states per parent configuration,
  /// row-major with the first parent varying slowest.
  std::vector<std::vector<double>> rows;

  bool operator==(const Cpt&) const = default;
};

enum class ModelMode { Itt, Raw };

struct Tolerance {
  /// Largest total-variation distance treated as equal.
  double tv = 1e-9;
  /// Conditioning events at or below this probability are ignored.
  double zero = 1e-12;
};

/// Distribution over the states of one variable, in state order.
using Distribution = std::vector<double>;

class MultiRegimeModel {
 public:
  static constexpr double kMaxJointStates = 1e7;

  /// Model from a DAG and one CPT per non-deterministic stochastic node.
  /// A regime's target is either deterministic, with parents exactly the
  /// regime and one ITT node (value: the regime's value when set, else the
  /// ITT value), or carries a CPT over its other parents that is replaced
  /// by a point mass when the regime is set. Throws ModelError.
  static MultiRegimeModel itt(Dag dag, std::vector<Cpt> cpts);

  /// Model from explicit joint tables, one per total regime assignment,
  /// row-major over the stochastic nodes of `dag` in node order. Edges of
  /// `dag` only record regime targets and ITT links. Throws ModelError.
  static MultiRegimeModel raw(Dag dag, std::map<RegimeAssignment, std::vector<double>> tables);

  ModelMode mode() const { return mode_; }
  const Dag& dag() const { return dag_; }
  /// Stochastic variables in table order.
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<std::string>& regimes() const { return regimes_; }
  const std::vector<std::string>& states(const std::string& var) const;
  std::size_t state_index(const std::string& var, const std::string& state) const;
  /// Every total regime assignment, in map order.
  const std::vector<RegimeAssignment>& assignments() const { return assignments_; }
  /// Fills unassigned regimes with idle; throws on unknown names or values.
  RegimeAssignment complete(const RegimeAssignment& partial) const;

  const std::vector<Cpt>& cpts() const { return cpts_; }
  const Cpt* cpt(const std::string& child) const;
  const std::map<RegimeAssignment, std::vector<double>>& raw_tables() const { return raw_; }

  /// Regime acting on `target`; throws ModelError if none.
  const std::string& regime_of(const std::string& target) const;
  /// ITT variable linked to the regime's target; empty if none.
  std::string itt_of(const std::string& regime) const;

 private:
  void init_common();

  ModelMode mode_ = ModelMode::Itt;
  Dag dag_;
  std::vector<std::string> variables_;
  std::vector<std::string> regimes_;
  std::vector<RegimeAssignment> assignments_;
  std::vector<Cpt> cpts_;
  std::map<RegimeAssignment, std::vector<double>> raw_;
};

class JointTable {
 public:
  JointTable(std::vector<std::string> vars, std::vector<std::size_t> card,
             std::vector<double> probs);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<std::size_t>& cardinalities() const { return card_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t position(const std::string& var) const;
  double sum() const;

  /// Marginal over `vars` (repeats allowed), row-major, first slowest.
  std::vector<double> marginal(const std::vector<std::string>& vars) const;

 private:
  std::vector<std::string> vars_;
  std::vector<std::size_t> card_;
  std::vector<double> probs_;
};

/// Joint over the stochastic variables in one regime. Unassigned regimes
/// are idle.
JointTable joint(const MultiRegimeModel& model, const RegimeAssignment& regime);

/// Joints for every total regime assignment, computed once.
class RegimeJoints {
 public:
  explicit RegimeJoints(MultiRegimeModel model);

  const MultiRegimeModel& model() const { return model_; }
  const JointTable& joint(const RegimeAssignment& regime) const;

  /// Numeric ECI check. Regimes not mentioned are held fixed at each of
  /// their values; regimes on the right may vary. For every fixed value of
  /// the other regimes and of the stochastic conditioning variables, the
  /// conditional law of the left side must agree (in total variation)
  /// across all right-hand values and regime values with positive
  /// conditioning probability. Throws StatementError on unknown names.
  bool eci_holds(const EciStatement& stmt, const Tolerance& tol = {}) const;

 private:
  MultiRegimeModel model_;
  std::map<RegimeAssignment, JointTable> joints_;
};

bool eci_holds(const MultiRegimeModel& model, const EciStatement& stmt, const Tolerance& tol = {});

/// dist(v | T=t, F=idle) equals dist(v | T*=t, F=t) for every t and every
/// value of the other regimes.
bool check_distributional_consistency(const MultiRegimeModel& model, const NodeSet& v,
                                      const std::string& action, const Tolerance& tol = {});

/// Y _||_ T* | (T, F).
bool check_ignorability(const MultiRegimeModel& model, const std::string& y,
                        const std::string& action, const Tolerance& tol = {});

/// Y _||_ T* | (X, F=t) for each set value t, and (X, T*) with the same law
/// under every set value of F.
bool check_sufficient_covariate(const MultiRegimeModel& model, const std::string& x,
                                const std::string& y, const std::string& action,
                                const Tolerance& tol = {});

/// Marginal of y in the given regime (unassigned regimes idle).
Distribution interventional_query(const MultiRegimeModel& model, const std::string& y,
                                  const RegimeAssignment& regime);

/// E(y) in the given regime; y's states must be numeric.
double expectation(const MultiRegimeModel& model, const std::string& y,
                   const RegimeAssignment& regime);

struct GFormulaQuery {
  std::string y, y_value;
  std::string x0, x0_value;
  std::string x1, x1_value;
  std::string z;
};

/// sum_z p(y | x1, z) p(z | x0), all from the all-idle joint. Throws
/// PositivityError when a needed conditioning event has probability zero.
double gformula_eval(const MultiRegimeModel& model, const GFormulaQuery& q,
                     const Tolerance& tol = {});

/// sum_x p(x) p(y | x, T=t) from the all-idle joint. Throws PositivityError.
Distribution backdoor_adjustment(const MultiRegimeModel& model, const std::string& y,
                                 const std::string& x, const std::string& action,
                                 const std::string& t, const Tolerance& tol = {});

/// E(Y | T*=1, F=1) - E(Y | T*=1, F=0). Throws PositivityError when
/// P(T*=1) is zero.
double ett(const MultiRegimeModel& model, const std::string& y, const std::string& action,
           const Tolerance& tol = {});

/// E(Y | F=1) - E(Y | F=0).
double model_ace(const MultiRegimeModel& model, const std::string& y, const std::string& action);

/// Uniform draw from the probability simplex of dimension n.
std::vector<double> flat_simplex(std::size_t n, std::mt19937_64& rng);

/// Itt model on `dag` with every CPT row drawn from the flat simplex.
MultiRegimeModel random_itt_model(const Dag& dag, std::mt19937_64& rng);

}  // namespace dtc
