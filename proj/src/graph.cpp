#include "dtcausal/graph.hpp"

#include <algorithm>
#include <sstream>

#include "dtcausal/error.hpp"

namespace dtc {

RegimeValue RegimeValue::parse(std::string_view text) {
  if (text == kIdleToken) return idle();
  return set(std::string(text));
}

std::string RegimeValue::to_string() const {
  return is_idle() ? std::string(kIdleToken) : *state_;
}

const Node& Dag::add_node(Node node) {
  if (node.name.empty()) throw GraphError("node name must be nonempty");
  if (index_.count(node.name)) throw GraphError("duplicate node '" + node.name + "'");
  index_.emplace(node.name, nodes_.size());
  nodes_.push_back(std::move(node));
  return nodes_.back();
}

const Node& Dag::add_stochastic(const std::string& name, bool latent, bool deterministic) {
  Node n;
  n.name = name;
  n.latent = latent;
  n.deterministic = deterministic;
  return add_node(std::move(n));
}

const Node& Dag::add_regime(const std::string& name, const std::string& target) {
  Node n;
  n.name = name;
  n.kind = NodeKind::Regime;
  n.target = target;
  n.states.clear();
  return add_node(std::move(n));
}

void Dag::add_edge(const std::string& from, const std::string& to, bool dashed) {
  edges_.push_back(Edge{from, to, dashed});
}

std::size_t Dag::remove_edge(const std::string& from, const std::string& to) {
  return std::erase_if(edges_, [&](const Edge& e) { return e.from == from && e.to == to; });
}

bool Dag::has_node(const std::string& name) const { return index_.count(name) != 0; }

const Node& Dag::node(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw GraphError("unknown node '" + name + "'");
  return nodes_[it->second];
}

Node& Dag::node(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw GraphError("unknown node '" + name + "'");
  return nodes_[it->second];
}

const Node* Dag::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

bool Dag::has_edge(const std::string& from, const std::string& to) const {
  return find_edge(from, to) != nullptr;
}

const Edge* Dag::find_edge(const std::string& from, const std::string& to) const {
  for (const auto& e : edges_)
    if (e.from == from && e.to == to) return &e;
  return nullptr;
}

NodeSet Dag::parents(const std::string& name) const {
  NodeSet out;
  for (const auto& e : edges_)
    if (e.to == name) out.insert(e.from);
  return out;
}

NodeSet Dag::children(const std::string& name) const {
  NodeSet out;
  for (const auto& e : edges_)
    if (e.from == name) out.insert(e.to);
  return out;
}

NodeSet Dag::names() const {
  NodeSet out;
  for (const auto& n : nodes_) out.insert(n.name);
  return out;
}

const Node* Dag::regime_for(const std::string& target) const {
  for (const auto& n : nodes_)
    if (n.is_regime() && n.target == target) return &n;
  return nullptr;
}

std::vector<RegimeValue> Dag::regime_domain(const std::string& regime) const {
  const Node& r = node(regime);
  if (!r.is_regime()) throw GraphError("'" + regime + "' is not a regime node");
  std::vector<RegimeValue> out{RegimeValue::idle()};
  const Node* target = find(r.target);
  if (target == nullptr) throw GraphError("regime '" + regime + "' has unknown target");
  for (const auto& s : target->states) out.push_back(RegimeValue::set(s));
  return out;
}

namespace {

std::vector<Node> sorted_nodes(const Dag& d) {
  auto v = d.nodes();
  std::sort(v.begin(), v.end(), [](const Node& a, const Node& b) { return a.name < b.name; });
  return v;
}

std::vector<Edge> sorted_edges(const Dag& d, bool keep_dashed) {
  auto v = d.edges();
  if (!keep_dashed)
    for (auto& e : v) e.dashed = false;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

bool operator==(const Dag& a, const Dag& b) {
  return sorted_nodes(a) == sorted_nodes(b) && sorted_edges(a, true) == sorted_edges(b, true);
}

bool structurally_equal(const Dag& a, const Dag& b) {
  return sorted_nodes(a) == sorted_nodes(b) && sorted_edges(a, false) == sorted_edges(b, false);
}

namespace {

// Returns the nodes left over after repeatedly peeling sources; nonempty
// iff the graph (restricted to known endpoints) has a cycle.
NodeSet cyclic_core(const Dag& dag) {
  std::map<std::string, int> indeg;
  for (const auto& n : dag.nodes()) indeg[n.name] = 0;
  for (const auto& e : dag.edges())
    if (dag.has_node(e.from) && dag.has_node(e.to)) ++indeg[e.to];
  std::vector<std::string> ready;
  for (const auto& [name, d] : indeg)
    if (d == 0) ready.push_back(name);
  while (!ready.empty()) {
    std::string v = ready.back();
    ready.pop_back();
    indeg.erase(v);
    for (const auto& e : dag.edges())
      if (e.from == v && indeg.count(e.to) && --indeg[e.to] == 0) ready.push_back(e.to);
  }
  NodeSet rest;
  for (const auto& [name, d] : indeg) rest.insert(name);
  return rest;
}

}  // namespace

std::vector<Violation> validate(const Dag& dag) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string msg) { out.push_back({k, std::move(msg)}); };

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : dag.edges()) {
    const std::string label = e.from + " -> " + e.to;
    if (!dag.has_node(e.from) || !dag.has_node(e.to)) {
      add(ViolationKind::DanglingEdge, "dangling edge " + label);
      continue;
    }
    if (e.from == e.to) add(ViolationKind::SelfLoop, "self-loop " + label);
    if (!seen.insert({e.from, e.to}).second)
      add(ViolationKind::DuplicateEdge, "duplicate edge " + label);
    const Node& to = dag.node(e.to);
    if (to.is_regime()) add(ViolationKind::RegimeHasParent, "regime node has parent: " + label);
    if (e.dashed && !to.deterministic)
      add(ViolationKind::BadDashedEdge, "dashed edge into non-deterministic node: " + label);
  }

  if (auto core = cyclic_core(dag); !core.empty()) {
    std::string names;
    for (const auto& n : core) names += (names.empty() ? "" : ", ") + n;
    add(ViolationKind::Cycle, "cycle through {" + names + "}");
  }

  for (const auto& n : dag.nodes()) {
    if (n.is_regime()) {
      if (n.latent) add(ViolationKind::LatentRegime, "regime node '" + n.name + "' marked latent");
      if (n.deterministic)
        add(ViolationKind::DeterministicRegime,
            "regime node '" + n.name + "' marked deterministic");
      const Node* t = dag.find(n.target);
      if (t == nullptr || t->is_regime())
        add(ViolationKind::BadRegimeTarget,
            "regime '" + n.name + "' must target a stochastic node (got '" + n.target + "')");
    } else if (n.states.empty()) {
      add(ViolationKind::EmptyDomain, "node '" + n.name + "' has no states");
    }
  }
  return out;
}

void require_valid(const Dag& dag) {
  auto v = validate(dag);
  if (!v.empty()) throw GraphError(v.front().message);
}

std::vector<std::string> topological_order(const Dag& dag) {
  std::map<std::string, int> indeg;
  for (const auto& n : dag.nodes()) indeg[n.name] = 0;
  for (const auto& e : dag.edges()) {
    if (!dag.has_node(e.from) || !dag.has_node(e.to))
      throw GraphError("dangling edge " + e.from + " -> " + e.to);
    ++indeg[e.to];
  }
  std::set<std::string> ready;
  for (const auto& [name, d] : indeg)
    if (d == 0) ready.insert(name);
  std::vector<std::string> order;
  order.reserve(dag.size());
  while (!ready.empty()) {
    std::string v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& e : dag.edges())
      if (e.from == v && --indeg[e.to] == 0) ready.insert(e.to);
  }
  if (order.size() != dag.size()) throw GraphError("cycle detected");
  return order;
}

NodeSet ancestral_set(const Dag& dag, const NodeSet& seed) {
  NodeSet out;
  std::vector<std::string> stack;
  for (const auto& s : seed) {
    dag.node(s);
    if (out.insert(s).second) stack.push_back(s);
  }
  while (!stack.empty()) {
    std::string v = stack.back();
    stack.pop_back();
    for (const auto& e : dag.edges())
      if (e.to == v && out.insert(e.from).second) stack.push_back(e.from);
  }
  return out;
}

bool UndirectedGraph::has_edge(const std::string& a, const std::string& b) const {
  return edges.count(a < b ? std::pair{a, b} : std::pair{b, a}) != 0;
}

UndirectedGraph moral_graph(const Dag& dag, const NodeSet& restrict_to) {
  UndirectedGraph g;
  g.nodes = ancestral_set(dag, restrict_to);
  auto link = [&](const std::string& a, const std::string& b) {
    if (a != b) g.edges.insert(a < b ? std::pair{a, b} : std::pair{b, a});
  };
  for (const auto& v : g.nodes) {
    const NodeSet pa = dag.parents(v);
    for (const auto& p : pa) link(p, v);
    for (auto i = pa.begin(); i != pa.end(); ++i)
      for (auto j = std::next(i); j != pa.end(); ++j) link(*i, *j);
  }
  return g;
}

Dag surgery(const Dag& dag, const NodeSet& remove_incoming, const NodeSet& remove_outgoing) {
  for (const auto& n : remove_incoming) dag.node(n);
  for (const auto& n : remove_outgoing) dag.node(n);
  Dag out;
  for (const auto& n : dag.nodes()) out.add_node(n);
  for (const auto& e : dag.edges()) {
    if (remove_incoming.count(e.to) || remove_outgoing.count(e.from)) continue;
    out.add_edge(e.from, e.to, e.dashed);
  }
  return out;
}

Dag restrict_to_regime(const Dag& dag, const RegimeAssignment& assignment) {
  Dag out = dag;
  for (const auto& [regime, value] : assignment) {
    const Node& r = dag.node(regime);
    if (!r.is_regime()) throw GraphError("'" + regime + "' is not a regime node");
    const auto domain = dag.regime_domain(regime);
    if (std::find(domain.begin(), domain.end(), value) == domain.end())
      throw GraphError("value '" + value.to_string() + "' outside domain of regime '" + regime +
                       "'");
    if (value.is_idle()) continue;
    std::vector<std::string> dashed_parents;
    for (const auto& e : out.edges())
      if (e.to == r.target && e.dashed) dashed_parents.push_back(e.from);
    for (const auto& p : dashed_parents) out.remove_edge(p, r.target);
  }
  return out;
}

namespace {

std::string dot_id(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string to_dot(const Dag& dag, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << dot_id(name) << " {\n";
  for (const auto& n : sorted_nodes(dag)) {
    std::vector<std::string> style;
    if (n.latent) style.push_back("dotted");
    if (n.deterministic) style.push_back("bold");
    os << "  " << dot_id(n.name) << " [shape=" << (n.is_regime() ? "box" : "ellipse");
    if (!style.empty()) {
      os << ", style=\"";
      for (std::size_t i = 0; i < style.size(); ++i) os << (i ? "," : "") << style[i];
      os << "\"";
    }
    if (n.deterministic) os << ", penwidth=2";
    os << "];\n";
  }
  for (const auto& e : sorted_edges(dag, true)) {
    os << "  " << dot_id(e.from) << " -> " << dot_id(e.to);
    if (e.dashed) os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dtc
