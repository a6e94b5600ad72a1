#pragma once

// Directed acyclic graphs mixing stochastic domain variables with
// non-stochastic regime indicators.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dtc {

using NodeSet = std::set<std::string>;

/// Spelling of the idle (observational) regime value in all text formats.
inline constexpr std::string_view kIdleToken = "~";

enum class NodeKind { Stochastic, Regime };

/// Value of a regime indicator: either idle or "set to state s".
class RegimeValue {
 public:
  static RegimeValue idle() { return RegimeValue{}; }
  static RegimeValue set(std::string state) {
    RegimeValue v;
    v.state_ = std::move(state);
    return v;
  }
  /// Parses "~" as idle and anything else as a set value.
  static RegimeValue parse(std::string_view text);

  bool is_idle() const { return !state_.has_value(); }
  /// Target state; only meaningful when !is_idle().
  const std::string& state() const { return *state_; }
  std::string to_string() const;

  auto operator<=>(const RegimeValue&) const = default;

 private:
  std::optional<std::string> state_;
};

/// Partial or total map from regime node name to its value.
using RegimeAssignment = std::map<std::string, RegimeValue>;

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Stochastic;
  bool latent = false;
  bool deterministic = false;
  /// Regime nodes only: the stochastic node this regime acts on.
  std::string target;
  /// Stochastic nodes: finite value domain.
  std::vector<std::string> states{"0", "1"};

  bool is_regime() const { return kind == NodeKind::Regime; }
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string from;
  std::string to;
  bool dashed = false;

  auto operator<=>(const Edge&) const = default;
};

/// Labelled DAG. Node names are unique; everything else (acyclicity,
/// dangling edges, regime constraints) is checked by validate() so that
/// invalid graphs can still be represented and diagnosed.
class Dag {
 public:
  Dag() = default;

  /// Throws GraphError on an empty or duplicate name.
  const Node& add_node(Node node);
  const Node& add_stochastic(const std::string& name, bool latent = false,
                             bool deterministic = false);
  const Node& add_regime(const std::string& name, const std::string& target);
  /// Stores the edge as given; duplicates and dangling endpoints are
  /// reported by validate().
  void add_edge(const std::string& from, const std::string& to, bool dashed = false);
  /// Removes every edge from -> to. Returns the number removed.
  std::size_t remove_edge(const std::string& from, const std::string& to);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

  bool has_node(const std::string& name) const;
  /// Throws GraphError for unknown names.
  const Node& node(const std::string& name) const;
  Node& node(const std::string& name);
  const Node* find(const std::string& name) const;

  bool has_edge(const std::string& from, const std::string& to) const;
  const Edge* find_edge(const std::string& from, const std::string& to) const;
  NodeSet parents(const std::string& name) const;
  NodeSet children(const std::string& name) const;
  NodeSet names() const;
  /// Regime node acting on `target`, if any.
  const Node* regime_for(const std::string& target) const;

  /// Value domain of a regime node: idle followed by the target's states.
  std::vector<RegimeValue> regime_domain(const std::string& regime) const;

  /// Set equality of nodes (with all flags) and edges (with dashing).
  friend bool operator==(const Dag& a, const Dag& b);

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t> index_;
};

/// Equality ignoring the dashed flag on edges.
bool structurally_equal(const Dag& a, const Dag& b);

enum class ViolationKind {
  DanglingEdge,
  SelfLoop,
  DuplicateEdge,
  Cycle,
  RegimeHasParent,
  LatentRegime,
  DeterministicRegime,
  BadRegimeTarget,
  BadDashedEdge,
  EmptyDomain,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Every invariant violation in `dag`; empty means valid.
std::vector<Violation> validate(const Dag& dag);
/// Throws GraphError carrying the first violation.
void require_valid(const Dag& dag);

/// Kahn order with lexicographic tie-break. Throws GraphError on a cycle.
std::vector<std::string> topological_order(const Dag& dag);

/// Nodes in `seed` plus all their ancestors.
NodeSet ancestral_set(const Dag& dag, const NodeSet& seed);

struct UndirectedGraph {
  NodeSet nodes;
  /// Each edge stored once as (smaller name, larger name).
  std::set<std::pair<std::string, std::string>> edges;

  bool has_edge(const std::string& a, const std::string& b) const;
};

/// Moral graph of the ancestral closure of `restrict_to`.
UndirectedGraph moral_graph(const Dag& dag, const NodeSet& restrict_to);

/// Copy of `dag` without edges into `remove_incoming` or out of
/// `remove_outgoing`.
Dag surgery(const Dag& dag, const NodeSet& remove_incoming, const NodeSet& remove_outgoing);

/// Drops the dashed edges into the target of every regime assigned a
/// non-idle value. Idle assignments leave the graph unchanged.
Dag restrict_to_regime(const Dag& dag, const RegimeAssignment& assignment);

/// Graphviz rendering: regimes as boxes, latent nodes dotted, deterministic
/// nodes bold, dashed edges dashed.
std::string to_dot(const Dag& dag, const std::string& name = "G");

}  // namespace dtc
