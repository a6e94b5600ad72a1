#pragma once

// d-separation on augmented DAGs. Two independent algorithms are kept:
// the moralisation criterion (used for answers) and Bayes-ball path
// blocking (used for cross-checking).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dtcausal/graph.hpp"
#include "dtcausal/statement.hpp"

namespace dtc {

/// Bitmask view of a DAG for repeated separation queries. Limited to 64
/// nodes.
class SeparationIndex {
 public:
  using Mask = std::uint64_t;
  static constexpr std::size_t kMaxNodes = 64;

  explicit SeparationIndex(const Dag& dag);

  Mask mask(const NodeSet& names) const;
  Mask bit(const std::string& name) const { return Mask{1} << index(name); }
  std::size_t index(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  /// x _||_ y | z by moralising the ancestral set of x, y, z.
  bool moral(Mask x, Mask y, Mask z) const;
  /// x _||_ y | z by Bayes-ball reachability over active trails.
  bool bayes_ball(Mask x, Mask y, Mask z) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<Mask> parents_;
  std::vector<Mask> children_;
};

// Both algorithms share one convention for degenerate inputs: members of z
// are dropped from x and y; an empty side is separated; an overlap of the
// remaining x and y is not.

bool separated_moral(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z);
bool separated_paths(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z);

/// Validates `stmt`, restricts the graph by its pinned regimes, then
/// decides separation by moralisation.
bool d_separated(const Dag& dag, const EciStatement& stmt);
/// Same query answered by path blocking.
bool d_separated_paths(const Dag& dag, const EciStatement& stmt);

inline constexpr std::size_t kMaxEnumeratedNodes = 14;

/// Every elementary statement a _||_ b | S (a stochastic, S a subset of
/// `over` minus {a, b}) certified by d-separation, sorted.
std::vector<EciStatement> implied_statements(const Dag& dag, const NodeSet& over);

}  // namespace dtc
