#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace dtc::testing {

std::string corpus(const std::string& name) { return std::string(CORPUS_DIR) + "/" + name; }

Dag random_dag(std::mt19937_64& rng, std::size_t n, double p) {
  Dag g;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.push_back("V" + std::to_string(i));
    g.add_stochastic(order.back());
  }
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) g.add_edge(order[i], order[j]);
  return g;
}

namespace {

NodeSet descendants_or_self(const Dag& dag, const std::string& v) {
  NodeSet out{v};
  std::vector<std::string> stack{v};
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (const auto& c : dag.children(u))
      if (out.insert(c).second) stack.push_back(c);
  }
  return out;
}

}  // namespace

bool path_separated(const Dag& dag, const NodeSet& x0, const NodeSet& y0, const NodeSet& z) {
  NodeSet x, y;
  for (const auto& v : x0)
    if (!z.count(v)) x.insert(v);
  for (const auto& v : y0)
    if (!z.count(v)) y.insert(v);
  if (x.empty() || y.empty()) return true;
  for (const auto& v : x)
    if (y.count(v)) return false;

  std::map<std::string, bool> opens_collider;
  for (const auto& v : dag.names()) {
    const NodeSet d = descendants_or_self(dag, v);
    opens_collider[v] = std::any_of(d.begin(), d.end(), [&](const std::string& u) { return z.count(u) > 0; });
  }
  auto neighbours = [&](const std::string& v) {
    NodeSet n = dag.parents(v);
    for (const auto& c : dag.children(v)) n.insert(c);
    return n;
  };

  std::vector<std::string> path;
  NodeSet on_path;
  // Extends the path; a middle node's status is settled once its
  // successor is known.
  std::function<bool()> active_from = [&]() -> bool {
    const std::string last = path.back();
    if (path.size() > 1 && y.count(last)) return true;
    for (const auto& next : neighbours(last)) {
      if (on_path.count(next)) continue;
      if (path.size() >= 2) {
        const std::string prev = path[path.size() - 2];
        const bool collider = dag.has_edge(prev, last) && dag.has_edge(next, last);
        if (collider ? !opens_collider[last] : z.count(last) > 0) continue;
      }
      path.push_back(next);
      on_path.insert(next);
      const bool found = active_from();
      on_path.erase(next);
      path.pop_back();
      if (found) return true;
    }
    return false;
  };
  for (const auto& s : x) {
    path = {s};
    on_path = {s};
    if (active_from()) return false;
  }
  return true;
}

std::uint32_t BinaryJoint::mask(const NodeSet& vars) const {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (vars.count(names[i])) m |= 1u << i;
  return m;
}

BinaryJoint random_binary_joint(const Dag& dag, std::mt19937_64& rng) {
  BinaryJoint j;
  j.names = topological_order(dag);
  const std::size_t n = j.names.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<std::size_t>> parent_idx(n);
  std::vector<std::vector<double>> p_one(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : dag.parents(j.names[i]))
      parent_idx[i].push_back(std::find(j.names.begin(), j.names.end(), p) - j.names.begin());
    p_one[i].resize(std::size_t{1} << parent_idx[i].size());
    for (auto& q : p_one[i]) q = u(rng);
  }
  j.p.assign(std::size_t{1} << n, 0.0);
  for (std::size_t s = 0; s < j.p.size(); ++s) {
    double prob = 1;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t row = 0;
      for (std::size_t k = 0; k < parent_idx[i].size(); ++k)
        if (s >> parent_idx[i][k] & 1) row |= std::size_t{1} << k;
      prob *= (s >> i & 1) ? p_one[i][row] : 1 - p_one[i][row];
    }
    j.p[s] = prob;
  }
  return j;
}

bool ci_holds(const BinaryJoint& joint, const NodeSet& a, const NodeSet& b, const NodeSet& c, double tol) {
  const std::uint32_t ma = joint.mask(a), mb = joint.mask(b), mc = joint.mask(c);
  std::map<std::uint32_t, double> pabc, pac, pbc, pc;
  for (std::uint32_t s = 0; s < joint.p.size(); ++s) {
    pabc[s & (ma | mb | mc)] += joint.p[s];
    pac[s & (ma | mc)] += joint.p[s];
    pbc[s & (mb | mc)] += joint.p[s];
    pc[s & mc] += joint.p[s];
  }
  for (std::uint32_t s = 0; s < joint.p.size(); ++s) {
    const double lhs = pabc[s & (ma | mb | mc)] * pc[s & mc];
    const double rhs = pac[s & (ma | mc)] * pbc[s & (mb | mc)];
    if (std::abs(lhs - rhs) > tol) return false;
  }
  return true;
}

MeanSe mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

}  // namespace dtc::testing
