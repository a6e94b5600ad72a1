#include "dtcausal/augment.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "dtcausal/dsep.hpp"
#include "dtcausal/error.hpp"

namespace dtc {

std::string InterventionPlan::regime_name(const std::string& target) const {
  auto it = regime_names.find(target);
  return it == regime_names.end() ? "F_" + target : it->second;
}

std::string itt_name(const std::string& target) { return target + "*"; }

namespace {

void check_plan(const Dag& obs, const InterventionPlan& plan) {
  require_valid(obs);
  for (const auto& n : obs.nodes())
    if (n.is_regime()) throw GraphError("observational DAG already has regime node '" + n.name + "'");
  NodeSet seen;
  for (const auto& t : plan.targets) {
    const Node& n = obs.node(t);
    if (n.latent) throw GraphError("intervention target '" + t + "' is latent");
    if (!seen.insert(t).second) throw GraphError("duplicate intervention target '" + t + "'");
  }
  for (const auto& [t, f] : plan.regime_names)
    if (!seen.count(t)) throw GraphError("regime name given for non-target '" + t + "'");
  for (std::size_t i = 0; i < plan.targets.size(); ++i) {
    const NodeSet anc = ancestral_set(obs, {plan.targets[i]});
    for (std::size_t j = i + 1; j < plan.targets.size(); ++j)
      if (anc.count(plan.targets[j]))
        throw GraphError("plan order violates topology: '" + plan.targets[j] + "' precedes '" +
                         plan.targets[i] + "'");
  }
}

void add_fresh(Dag& g, Node n) {
  if (g.has_node(n.name)) throw GraphError("generated name '" + n.name + "' collides with an existing node");
  g.add_node(std::move(n));
}

}  // namespace

Dag build_itt_dag(const Dag& obs, const InterventionPlan& plan) {
  check_plan(obs, plan);
  const NodeSet targets(plan.targets.begin(), plan.targets.end());
  Dag g;
  for (Node n : obs.nodes()) {
    if (targets.count(n.name)) n.deterministic = true;
    g.add_node(std::move(n));
  }
  for (const auto& t : plan.targets) {
    Node star = obs.node(t);
    star.name = itt_name(t);
    star.latent = true;
    star.deterministic = false;
    add_fresh(g, std::move(star));
    Node f;
    f.name = plan.regime_name(t);
    f.kind = NodeKind::Regime;
    f.target = t;
    f.states.clear();
    add_fresh(g, std::move(f));
  }
  for (const auto& e : obs.edges())
    g.add_edge(e.from, targets.count(e.to) ? itt_name(e.to) : e.to, e.dashed);
  for (const auto& t : plan.targets) {
    g.add_edge(plan.regime_name(t), t);
    g.add_edge(itt_name(t), t, true);
  }
  return g;
}

Dag build_augmented_dag(const Dag& obs, const InterventionPlan& plan) {
  check_plan(obs, plan);
  Dag g = obs;
  for (const auto& t : plan.targets) {
    Node f;
    f.name = plan.regime_name(t);
    f.kind = NodeKind::Regime;
    f.target = t;
    f.states.clear();
    add_fresh(g, f);
    g.add_edge(f.name, t);
  }
  return g;
}

Projection latent_projection(const Dag& dag, const NodeSet& drop) {
  require_valid(dag);
  for (const auto& d : drop) dag.node(d);
  Projection p;
  for (const auto& n : dag.nodes())
    if (!drop.count(n.name)) p.nodes.insert(n.name);

  // Retained nodes reachable from v by directed paths whose intermediate
  // nodes are all dropped.
  auto reach = [&](const std::string& v) {
    NodeSet out, seen{v};
    std::vector<std::string> stack{v};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (const auto& c : dag.children(u)) {
        if (!seen.insert(c).second) continue;
        if (drop.count(c))
          stack.push_back(c);
        else
          out.insert(c);
      }
    }
    return out;
  };

  for (const auto& v : p.nodes)
    for (const auto& c : reach(v)) p.directed.insert({v, c});
  for (const auto& d : drop) {
    const NodeSet r = reach(d);
    for (auto a = r.begin(); a != r.end(); ++a)
      for (auto b = std::next(a); b != r.end(); ++b) p.bidirected.insert({*a, *b});
  }
  return p;
}

namespace {

// Carries flags over from the original graph. Deterministic status and
// dashing survive only on nodes whose parent set is untouched.
Dag finish_projection(const Dag& dag, const NodeSet& keep,
                      const std::set<std::pair<std::string, std::string>>& edges) {
  Dag g;
  for (Node n : dag.nodes()) {
    if (!keep.count(n.name)) continue;
    if (n.deterministic) {
      NodeSet now;
      for (const auto& [a, b] : edges)
        if (b == n.name) now.insert(a);
      if (now != dag.parents(n.name)) n.deterministic = false;
    }
    g.add_node(std::move(n));
  }
  for (const auto& [a, b] : edges) {
    const Edge* orig = dag.find_edge(a, b);
    g.add_edge(a, b, orig && orig->dashed && g.node(b).deterministic);
  }
  return g;
}

}  // namespace

Dag eliminate_nodes(const Dag& dag, const NodeSet& drop) {
  if (drop.empty()) {
    require_valid(dag);
    return dag;
  }
  const Projection p = latent_projection(dag, drop);
  if (p.bidirected.empty()) return finish_projection(dag, p.nodes, p.directed);

  if (p.nodes.size() > kMaxEnumeratedNodes) throw GraphError("not DAG-projectable");

  std::vector<std::string> order;
  for (const auto& v : topological_order(dag))
    if (p.nodes.count(v) && dag.node(v).is_regime()) order.push_back(v);
  for (const auto& v : topological_order(dag))
    if (p.nodes.count(v) && !dag.node(v).is_regime()) order.push_back(v);

  // Parents of each node: the smallest (then lexicographically first)
  // subset of its predecessors that separates it from the rest.
  SeparationIndex idx(dag);
  std::set<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::vector<std::string> pred(order.begin(), order.begin() + static_cast<long>(i));
    const auto v = idx.bit(order[i]);
    std::optional<std::uint32_t> best;
    for (std::size_t size = 0; size <= pred.size() && !best; ++size) {
      for (std::uint32_t s = 0; s < (1u << pred.size()); ++s) {
        if (static_cast<std::size_t>(std::popcount(s)) != size) continue;
        SeparationIndex::Mask in = 0, out = 0;
        for (std::size_t k = 0; k < pred.size(); ++k)
          ((s >> k) & 1u ? in : out) |= idx.bit(pred[k]);
        if (idx.moral(v, out, in)) {
          best = s;
          break;
        }
      }
    }
    for (std::size_t k = 0; k < pred.size(); ++k)
      if ((*best >> k) & 1u) edges.insert({pred[k], order[i]});
  }
  Dag g = finish_projection(dag, p.nodes, edges);
  if (implied_statements(g, p.nodes) != implied_statements(dag, p.nodes))
    throw GraphError("not DAG-projectable");
  return g;
}

namespace {

void require_disjoint(const std::vector<const NodeSet*>& sets) {
  NodeSet all;
  for (const auto* s : sets)
    for (const auto& n : *s)
      if (!all.insert(n).second) throw StatementError("sets overlap at '" + n + "'");
}

}  // namespace

bool rule_applicability(const Dag& g, Rule rule, const NodeSet& y, const NodeSet& x,
                        const NodeSet& z, const NodeSet& w) {
  require_disjoint({&y, &x, &z, &w});
  for (const auto* s : {&y, &x, &z, &w})
    for (const auto& n : *s) g.node(n);
  NodeSet cond = z;
  cond.insert(w.begin(), w.end());
  if (rule == Rule::Rule2) return separated_moral(surgery(g, w, x), y, x, cond);
  NodeSet in = x;
  in.insert(w.begin(), w.end());
  return separated_moral(surgery(g, in, {}), y, x, cond);
}

IdentificationResult identify_two_stage(const Dag& obs, const std::string& x0,
                                        const std::string& x1, const std::string& z,
                                        const std::string& y) {
  for (const auto& n : {x0, x1, z, y}) obs.node(n);
  if (NodeSet{x0, x1, z, y}.size() != 4) throw StatementError("x0, x1, z and y must be distinct");

  IdentificationResult r;
  r.estimand = "p(" + y + " | do(" + x0 + "), do(" + x1 + ")) = sum_" + z + " p(" + y + " | " +
               x1 + ", " + z + ") p(" + z + " | " + x0 + ")";
  auto add = [&](std::string label, Rule rule, NodeSet in, NodeSet out, NodeSet left,
                 NodeSet right, NodeSet given) {
    RuleCheck c{std::move(label), rule, in, out, EciStatement{left, right, given, {}}, false};
    c.holds = separated_moral(surgery(obs, in, out), left, right, given);
    r.checks.push_back(std::move(c));
  };
  add("exchange do(" + x0 + "), do(" + x1 + ") for observation given " + z, Rule::Rule2, {},
      {x0, x1}, {y}, {x0, x1}, {z});
  add("exchange do(" + x0 + ") for observation given " + x1, Rule::Rule2, {x1}, {x0}, {z}, {x0},
      {x1});
  add("delete do(" + x1 + ") given " + x0, Rule::Rule3, {x1}, {}, {z}, {x1}, {x0});
  for (std::size_t i = 0; i < r.checks.size(); ++i)
    if (!r.checks[i].holds && !r.first_failure) r.first_failure = i;
  r.identified = !r.first_failure;
  return r;
}

std::string IdentificationResult::report() const {
  auto join = [](const NodeSet& s) {
    std::string out;
    for (const auto& n : s) out += (out.empty() ? "" : ", ") + n;
    return "{" + out + "}";
  };
  std::ostringstream os;
  os << (identified ? "identified" : "not identified") << '\n';
  os << "estimand: " << estimand << '\n';
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    os << "check " << (i + 1) << " (" << (c.rule == Rule::Rule2 ? "rule 2" : "rule 3")
       << "): " << c.label << '\n';
    os << "  surgery: remove arrows into " << join(c.remove_incoming) << ", out of "
       << join(c.remove_outgoing) << '\n';
    os << "  " << format_statement(c.statement) << ": " << (c.holds ? "holds" : "fails") << '\n';
  }
  os << "note: the graph licenses this only if each intervention target's ITT variable obeys\n"
        "  the ignorability conditions of the node-splitting construction; these are model\n"
        "  assumptions and are not checked here.\n";
  return os.str();
}

}  // namespace dtc
