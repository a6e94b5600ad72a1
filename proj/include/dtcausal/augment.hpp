#pragma once

// Graph constructions: ITT node splitting, latent projection, augmented
// DAGs and the d-separation checks behind two do-calculus rules.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dtcausal/graph.hpp"
#include "dtcausal/statement.hpp"

namespace dtc {

struct InterventionPlan {
  /// Intervention targets in an order consistent with the DAG.
  std::vector<std::string> targets;
  /// Optional explicit regime names; unnamed targets get `F_<target>`.
  std::map<std::string, std::string> regime_names;

  std::string regime_name(const std::string& target) const;
};

std::string itt_name(const std::string& target);

/// Splits each target X into regime F, latent ITT node X* (taking X's
/// incoming arrows) and deterministic X with parents {F, X*}, the X* -> X
/// edge dashed. Throws GraphError on an invalid plan or name collision.
Dag build_itt_dag(const Dag& obs, const InterventionPlan& plan);

/// Observational DAG plus a founder regime F -> X for each target.
Dag build_augmented_dag(const Dag& obs, const InterventionPlan& plan);

/// Latent projection of `dag` onto the nodes outside `drop`.
struct Projection {
  NodeSet nodes;
  std::set<std::pair<std::string, std::string>> directed;
  /// Each pair stored once, smaller name first.
  std::set<std::pair<std::string, std::string>> bidirected;
};

Projection latent_projection(const Dag& dag, const NodeSet& drop);

/// Removes `drop`, keeping exactly the separation statements among the
/// remaining nodes. When the latent projection has no bidirected edges its
/// directed part is returned. Otherwise a DAG over the retained nodes is
/// built from separating sets along a topological order (regimes first)
/// and accepted only if it implies the same statements; failing that,
/// throws GraphError "not DAG-projectable".
Dag eliminate_nodes(const Dag& dag, const NodeSet& drop);

enum class Rule { Rule2, Rule3 };

/// Rule2: y _||_ x | z+w after deleting arrows into w and out of x.
/// Rule3: y _||_ x | z+w after deleting arrows into x and w.
/// Throws GraphError on unknown nodes and StatementError on overlapping
/// sets.
bool rule_applicability(const Dag& g, Rule rule, const NodeSet& y, const NodeSet& x,
                        const NodeSet& z, const NodeSet& w = {});

struct RuleCheck {
  std::string label;
  Rule rule;
  NodeSet remove_incoming;
  NodeSet remove_outgoing;
  EciStatement statement;
  bool holds = false;
};

struct IdentificationResult {
  bool identified = false;
  std::string estimand;
  std::vector<RuleCheck> checks;
  /// Index into checks of the first failure.
  std::optional<std::size_t> first_failure;

  std::string report() const;
};

/// Identification of p(y | do(x0), do(x1)) by g-computation over z, for
/// the two-stage pattern x0 -> z -> x1 -> y.
IdentificationResult identify_two_stage(const Dag& obs, const std::string& x0,
                                        const std::string& x1, const std::string& z,
                                        const std::string& y);

}  // namespace dtc
