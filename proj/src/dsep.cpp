#include "dtcausal/dsep.hpp"

#include <algorithm>
#include <bit>

#include "dtcausal/error.hpp"

namespace dtc {

using Mask = SeparationIndex::Mask;

SeparationIndex::SeparationIndex(const Dag& dag) {
  if (dag.size() > kMaxNodes)
    throw GraphError("separation queries support at most 64 nodes");
  for (const auto& n : dag.nodes()) {
    index_.emplace(n.name, names_.size());
    names_.push_back(n.name);
  }
  parents_.assign(names_.size(), 0);
  children_.assign(names_.size(), 0);
  for (const auto& e : dag.edges()) {
    const auto f = index(e.from);
    const auto t = index(e.to);
    parents_[t] |= Mask{1} << f;
    children_[f] |= Mask{1} << t;
  }
}

std::size_t SeparationIndex::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw GraphError("unknown node '" + name + "'");
  return it->second;
}

Mask SeparationIndex::mask(const NodeSet& names) const {
  Mask m = 0;
  for (const auto& n : names) m |= bit(n);
  return m;
}

namespace {

// Shared handling of degenerate arguments. Returns true with `decided` set
// when the answer is fixed without a graph search.
bool trivial_case(Mask& x, Mask& y, Mask z, bool& decided) {
  x &= ~z;
  y &= ~z;
  decided = true;
  if (x == 0 || y == 0) return true;
  if (x & y) return false;
  decided = false;
  return false;
}

template <typename F>
void for_each_bit(Mask m, F&& f) {
  while (m) {
    const int i = std::countr_zero(m);
    f(static_cast<std::size_t>(i));
    m &= m - 1;
  }
}

}  // namespace

bool SeparationIndex::moral(Mask x, Mask y, Mask z) const {
  bool decided = false;
  const bool answer = trivial_case(x, y, z, decided);
  if (decided) return answer;

  Mask anc = x | y | z;
  for (Mask frontier = anc; frontier;) {
    Mask next = 0;
    for_each_bit(frontier, [&](std::size_t v) { next |= parents_[v]; });
    frontier = next & ~anc;
    anc |= next;
  }

  auto moral_neighbours = [&](std::size_t v) {
    Mask nb = parents_[v] | children_[v];
    for_each_bit(children_[v] & anc, [&](std::size_t c) { nb |= parents_[c]; });
    return nb & anc & ~(Mask{1} << v);
  };

  Mask seen = x;
  for (Mask frontier = x; frontier;) {
    Mask next = 0;
    for_each_bit(frontier, [&](std::size_t v) { next |= moral_neighbours(v); });
    next &= ~z & ~seen;
    if (next & y) return false;
    seen |= next;
    frontier = next;
  }
  return true;
}

bool SeparationIndex::bayes_ball(Mask x, Mask y, Mask z) const {
  bool decided = false;
  const bool answer = trivial_case(x, y, z, decided);
  if (decided) return answer;

  // Ancestors of the evidence, including the evidence itself: a collider
  // is open iff it lies in this set.
  Mask evidence_anc = z;
  for (Mask frontier = z; frontier;) {
    Mask next = 0;
    for_each_bit(frontier, [&](std::size_t v) { next |= parents_[v]; });
    frontier = next & ~evidence_anc;
    evidence_anc |= next;
  }

  // up: ball arrived from a child; down: arrived from a parent.
  Mask visited_up = 0, visited_down = 0, reachable = 0;
  std::vector<std::pair<std::size_t, bool>> stack;
  for_each_bit(x, [&](std::size_t v) { stack.emplace_back(v, true); });
  while (!stack.empty()) {
    auto [v, up] = stack.back();
    stack.pop_back();
    const Mask b = Mask{1} << v;
    Mask& visited = up ? visited_up : visited_down;
    if (visited & b) continue;
    visited |= b;
    const bool observed = (z & b) != 0;
    if (!observed) reachable |= b;
    if (up && !observed) {
      for_each_bit(parents_[v], [&](std::size_t p) { stack.emplace_back(p, true); });
      for_each_bit(children_[v], [&](std::size_t c) { stack.emplace_back(c, false); });
    } else if (!up) {
      if (!observed)
        for_each_bit(children_[v], [&](std::size_t c) { stack.emplace_back(c, false); });
      if (evidence_anc & b)
        for_each_bit(parents_[v], [&](std::size_t p) { stack.emplace_back(p, true); });
    }
  }
  return (reachable & y) == 0;
}

bool separated_moral(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  SeparationIndex idx(dag);
  return idx.moral(idx.mask(x), idx.mask(y), idx.mask(z));
}

bool separated_paths(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  SeparationIndex idx(dag);
  return idx.bayes_ball(idx.mask(x), idx.mask(y), idx.mask(z));
}

namespace {

template <typename Query>
bool run_statement(const Dag& dag, const EciStatement& stmt, Query&& query) {
  check_statement(dag, stmt);
  if (stmt.right.empty()) return true;
  RegimeAssignment assignment(stmt.pinned.begin(), stmt.pinned.end());
  const Dag g = restrict_to_regime(dag, assignment);
  NodeSet cond = stmt.given;
  for (const auto& [n, v] : stmt.pinned) cond.insert(n);
  SeparationIndex idx(g);
  return query(idx, idx.mask(stmt.left), idx.mask(stmt.right), idx.mask(cond));
}

}  // namespace

bool d_separated(const Dag& dag, const EciStatement& stmt) {
  return run_statement(dag, stmt, [](const SeparationIndex& i, Mask x, Mask y, Mask z) {
    return i.moral(x, y, z);
  });
}

bool d_separated_paths(const Dag& dag, const EciStatement& stmt) {
  return run_statement(dag, stmt, [](const SeparationIndex& i, Mask x, Mask y, Mask z) {
    return i.bayes_ball(x, y, z);
  });
}

std::vector<EciStatement> implied_statements(const Dag& dag, const NodeSet& over) {
  if (over.size() > kMaxEnumeratedNodes) throw GraphError("enumeration bound exceeded");
  for (const auto& n : over) dag.node(n);
  SeparationIndex idx(dag);
  const std::vector<std::string> vars(over.begin(), over.end());

  std::vector<EciStatement> out;
  for (std::size_t a = 0; a < vars.size(); ++a) {
    if (dag.node(vars[a]).is_regime()) continue;
    for (std::size_t b = 0; b < vars.size(); ++b) {
      if (a == b) continue;
      std::vector<std::size_t> rest;
      for (std::size_t k = 0; k < vars.size(); ++k)
        if (k != a && k != b) rest.push_back(k);
      const Mask ma = idx.bit(vars[a]);
      const Mask mb = idx.bit(vars[b]);
      for (std::uint32_t s = 0; s < (1u << rest.size()); ++s) {
        Mask mz = 0;
        NodeSet given;
        for (std::size_t k = 0; k < rest.size(); ++k)
          if (s & (1u << k)) {
            mz |= idx.bit(vars[rest[k]]);
            given.insert(vars[rest[k]]);
          }
        if (idx.moral(ma, mb, mz)) out.push_back(EciStatement{{vars[a]}, {vars[b]}, given, {}});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dtc
