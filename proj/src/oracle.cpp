#include "dtcausal/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "dtcausal/error.hpp"

namespace dtc {

namespace {

double parse_number(const std::string& var, const std::string& s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ModelError("state '" + s + "' of '" + var + "' is not numeric");
  return v;
}

void check_distribution(const std::vector<double>& p, std::size_t n, const std::string& what) {
  if (p.size() != n)
    throw ModelError(what + ": expected " + std::to_string(n) + " entries, got " +
                     std::to_string(p.size()));
  double s = 0;
  for (double x : p) {
    if (!(x >= 0) || !std::isfinite(x)) throw ModelError(what + ": negative or non-finite entry");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ModelError(what + ": probabilities sum to " + std::to_string(s));
}

double total_variation(const double* a, const double* b, std::size_t n) {
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) d += std::abs(a[i] - b[i]);
  return d / 2;
}

}  // namespace

void MultiRegimeModel::init_common() {
  require_valid(dag_);
  double states = 1;
  for (const auto& n : dag_.nodes()) {
    if (n.is_regime()) {
      regimes_.push_back(n.name);
      if (dag_.children(n.name) != NodeSet{n.target})
        throw ModelError("regime '" + n.name + "' must point at its target only");
    } else {
      variables_.push_back(n.name);
      states *= static_cast<double>(n.states.size());
    }
  }
  if (states > kMaxJointStates) throw ModelError("enumeration bound exceeded");
  NodeSet targets;
  for (const auto& r : regimes_)
    if (!targets.insert(dag_.node(r).target).second)
      throw ModelError("two regimes act on '" + dag_.node(r).target + "'");

  std::vector<RegimeAssignment> out{{}};
  for (const auto& r : regimes_) {
    std::vector<RegimeAssignment> next;
    for (const auto& a : out)
      for (const auto& v : dag_.regime_domain(r)) {
        auto b = a;
        b[r] = v;
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  assignments_ = std::move(out);

  for (const auto& r : regimes_) {
    const Node& t = dag_.node(dag_.node(r).target);
    if (!t.deterministic) continue;
    const std::string i = itt_of(r);
    if (i.empty() || dag_.parents(t.name).size() != 2)
      throw ModelError("deterministic target '" + t.name + "' needs exactly its regime and one ITT parent");
    if (dag_.node(i).states != t.states)
      throw ModelError("ITT node '" + i + "' must share the states of '" + t.name + "'");
  }
}

MultiRegimeModel MultiRegimeModel::itt(Dag dag, std::vector<Cpt> cpts) {
  MultiRegimeModel m;
  m.mode_ = ModelMode::Itt;
  m.dag_ = std::move(dag);
  m.init_common();
  NodeSet targets;
  for (const auto& r : m.regimes_) targets.insert(m.dag_.node(r).target);

  NodeSet seen;
  for (const auto& c : cpts) {
    const Node* n = m.dag_.find(c.child);
    if (n == nullptr || n->is_regime()) throw ModelError("CPT for unknown variable '" + c.child + "'");
    if (n->deterministic) throw ModelError("deterministic node '" + c.child + "' cannot have a CPT");
    if (!seen.insert(c.child).second) throw ModelError("duplicate CPT for '" + c.child + "'");
    NodeSet want;
    for (const auto& p : m.dag_.parents(c.child))
      if (!m.dag_.node(p).is_regime()) want.insert(p);
    const NodeSet have(c.parents.begin(), c.parents.end());
    if (have != want || have.size() != c.parents.size())
      throw ModelError("CPT parents of '" + c.child + "' do not match the graph");
    std::size_t rows = 1;
    for (const auto& p : c.parents) rows *= m.dag_.node(p).states.size();
    if (c.rows.size() != rows)
      throw ModelError("CPT for '" + c.child + "' needs " + std::to_string(rows) + " rows");
    for (std::size_t i = 0; i < rows; ++i)
      check_distribution(c.rows[i], n->states.size(), "CPT '" + c.child + "' row " + std::to_string(i));
  }
  for (const auto& n : m.dag_.nodes()) {
    if (n.is_regime()) continue;
    if (n.deterministic && !targets.count(n.name))
      throw ModelError("deterministic node '" + n.name + "' is not a regime target");
    if (!n.deterministic && !seen.count(n.name)) throw ModelError("missing CPT for '" + n.name + "'");
  }
  m.cpts_ = std::move(cpts);
  return m;
}

MultiRegimeModel MultiRegimeModel::raw(Dag dag, std::map<RegimeAssignment, std::vector<double>> tables) {
  MultiRegimeModel m;
  m.mode_ = ModelMode::Raw;
  m.dag_ = std::move(dag);
  m.init_common();
  std::size_t size = 1;
  for (const auto& v : m.variables_) size *= m.dag_.node(v).states.size();
  for (const auto& a : m.assignments_) {
    auto it = tables.find(a);
    if (it == tables.end()) throw ModelError("missing joint table for a regime assignment");
    check_distribution(it->second, size, "joint table");
  }
  if (tables.size() != m.assignments_.size()) throw ModelError("joint table for an unknown regime assignment");
  m.raw_ = std::move(tables);
  return m;
}

const std::vector<std::string>& MultiRegimeModel::states(const std::string& var) const {
  const Node* n = dag_.find(var);
  if (n == nullptr || n->is_regime()) throw ModelError("unknown variable '" + var + "'");
  return n->states;
}

std::size_t MultiRegimeModel::state_index(const std::string& var, const std::string& state) const {
  const auto& s = states(var);
  auto it = std::find(s.begin(), s.end(), state);
  if (it == s.end()) throw ModelError("'" + state + "' is not a state of '" + var + "'");
  return static_cast<std::size_t>(it - s.begin());
}

RegimeAssignment MultiRegimeModel::complete(const RegimeAssignment& partial) const {
  RegimeAssignment out;
  for (const auto& r : regimes_) out[r] = RegimeValue::idle();
  for (const auto& [r, v] : partial) {
    if (!out.count(r)) throw ModelError("unknown regime '" + r + "'");
    const auto dom = dag_.regime_domain(r);
    if (std::find(dom.begin(), dom.end(), v) == dom.end())
      throw ModelError("value '" + v.to_string() + "' outside domain of '" + r + "'");
    out[r] = v;
  }
  return out;
}

const Cpt* MultiRegimeModel::cpt(const std::string& child) const {
  for (const auto& c : cpts_)
    if (c.child == child) return &c;
  return nullptr;
}

const std::string& MultiRegimeModel::regime_of(const std::string& target) const {
  for (const auto& r : regimes_)
    if (dag_.node(r).target == target) return r;
  throw ModelError("no regime acts on '" + target + "'");
}

std::string MultiRegimeModel::itt_of(const std::string& regime) const {
  const std::string& t = dag_.node(regime).target;
  for (const auto& e : dag_.edges())
    if (e.to == t && e.dashed) return e.from;
  return {};
}

JointTable::JointTable(std::vector<std::string> vars, std::vector<std::size_t> card,
                       std::vector<double> probs)
    : vars_(std::move(vars)), card_(std::move(card)), probs_(std::move(probs)) {}

std::size_t JointTable::position(const std::string& var) const {
  auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) throw ModelError("unknown variable '" + var + "'");
  return static_cast<std::size_t>(it - vars_.begin());
}

double JointTable::sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

std::vector<double> JointTable::marginal(const std::vector<std::string>& vars) const {
  std::vector<std::size_t> pos;
  std::size_t size = 1;
  for (const auto& v : vars) {
    pos.push_back(position(v));
    size *= card_[pos.back()];
  }
  // Stride of each joint position in the output index.
  std::vector<std::size_t> stride(card_.size(), 0);
  std::size_t s = 1;
  for (std::size_t k = vars.size(); k-- > 0;) {
    stride[pos[k]] += s;
    s *= card_[pos[k]];
  }
  std::vector<double> out(size, 0.0);
  std::vector<std::size_t> digit(card_.size(), 0);
  std::size_t at = 0;
  for (double p : probs_) {
    out[at] += p;
    for (std::size_t k = card_.size(); k-- > 0;) {
      at += stride[k];
      if (++digit[k] < card_[k]) break;
      at -= stride[k] * card_[k];
      digit[k] = 0;
    }
  }
  return out;
}

JointTable joint(const MultiRegimeModel& model, const RegimeAssignment& regime) {
  const RegimeAssignment a = model.complete(regime);
  const Dag& dag = model.dag();
  const auto& vars = model.variables();
  std::vector<std::size_t> card;
  for (const auto& v : vars) card.push_back(model.states(v).size());
  std::size_t size = 1;
  for (auto c : card) size *= c;

  if (model.mode() == ModelMode::Raw) return JointTable(vars, card, model.raw_tables().at(a));

  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < vars.size(); ++i) pos[vars[i]] = i;
  std::vector<std::size_t> table_stride(vars.size());
  for (std::size_t i = vars.size(), s = 1; i-- > 0;) {
    table_stride[i] = s;
    s *= card[i];
  }

  // One step of the forward factorisation per stochastic node.
  struct Step {
    std::size_t var;
    const Cpt* cpt = nullptr;
    std::vector<std::size_t> parents;
    std::vector<std::size_t> parent_card;
    long fixed = -1;     // point mass from a set regime
    long copy_from = -1; // deterministic target copying its ITT node
  };
  std::vector<Step> steps;
  for (const auto& name : topological_order(dag)) {
    const Node& n = dag.node(name);
    if (n.is_regime()) continue;
    Step st;
    st.var = pos.at(name);
    const Node* reg = dag.regime_for(name);
    const bool set = reg != nullptr && !a.at(reg->name).is_idle();
    if (set) {
      st.fixed = static_cast<long>(model.state_index(name, a.at(reg->name).state()));
    } else if (n.deterministic) {
      st.copy_from = static_cast<long>(pos.at(model.itt_of(reg->name)));
    } else {
      st.cpt = model.cpt(name);
      for (const auto& p : st.cpt->parents) {
        st.parents.push_back(pos.at(p));
        st.parent_card.push_back(card[pos.at(p)]);
      }
    }
    steps.push_back(std::move(st));
  }

  std::vector<double> probs(size, 0.0);
  std::vector<std::size_t> value(vars.size(), 0);
  auto recurse = [&](auto&& self, std::size_t depth, double p, std::size_t index) -> void {
    if (depth == steps.size()) {
      probs[index] += p;
      return;
    }
    const Step& st = steps[depth];
    auto descend = [&](std::size_t v, double q) {
      if (q <= 0) return;
      value[st.var] = v;
      self(self, depth + 1, p * q, index + v * table_stride[st.var]);
    };
    if (st.fixed >= 0) {
      descend(static_cast<std::size_t>(st.fixed), 1.0);
    } else if (st.copy_from >= 0) {
      descend(value[static_cast<std::size_t>(st.copy_from)], 1.0);
    } else {
      std::size_t row = 0;
      for (std::size_t k = 0; k < st.parents.size(); ++k)
        row = row * st.parent_card[k] + value[st.parents[k]];
      const auto& dist = st.cpt->rows[row];
      for (std::size_t v = 0; v < dist.size(); ++v) descend(v, dist[v]);
    }
  };
  recurse(recurse, 0, 1.0, 0);
  return JointTable(vars, card, std::move(probs));
}

RegimeJoints::RegimeJoints(MultiRegimeModel model) : model_(std::move(model)) {
  for (const auto& a : model_.assignments()) joints_.emplace(a, dtc::joint(model_, a));
}

const JointTable& RegimeJoints::joint(const RegimeAssignment& regime) const {
  return joints_.at(model_.complete(regime));
}

bool RegimeJoints::eci_holds(const EciStatement& stmt, const Tolerance& tol) const {
  const Dag& dag = model_.dag();
  if (stmt.left.empty()) throw StatementError("left-hand side is empty");
  for (const auto& n : stmt.mentioned())
    if (!dag.has_node(n)) throw StatementError("unknown variable '" + n + "'");
  for (const auto& n : stmt.left)
    if (dag.node(n).is_regime()) throw StatementError("left-hand side must be stochastic, '" + n + "' is a regime");
  for (const auto& [n, v] : stmt.pinned) {
    if (!dag.node(n).is_regime()) throw StatementError("'" + n + "' is not a regime and cannot be pinned");
    const auto dom = dag.regime_domain(n);
    if (std::find(dom.begin(), dom.end(), v) == dom.end())
      throw StatementError("value '" + v.to_string() + "' outside domain of '" + n + "'");
  }
  if (stmt.right.empty()) return true;

  std::vector<std::string> g_vars, r_vars;
  NodeSet right_regimes;
  for (const auto& n : stmt.given)
    if (!dag.node(n).is_regime()) g_vars.push_back(n);
  for (const auto& n : stmt.right) {
    if (dag.node(n).is_regime())
      right_regimes.insert(n);
    else
      r_vars.push_back(n);
  }
  const std::vector<std::string> l_vars(stmt.left.begin(), stmt.left.end());
  auto block = [&](const std::vector<std::string>& vs) {
    std::size_t n = 1;
    for (const auto& v : vs) n *= model_.states(v).size();
    return n;
  };
  const std::size_t nG = block(g_vars), nR = block(r_vars), nL = block(l_vars);
  std::vector<std::string> order = g_vars;
  order.insert(order.end(), r_vars.begin(), r_vars.end());
  order.insert(order.end(), l_vars.begin(), l_vars.end());

  // Reference conditional per (fixed regime values, conditioning value).
  std::map<std::pair<std::vector<RegimeValue>, std::size_t>, std::vector<double>> reference;
  for (const auto& a : model_.assignments()) {
    bool consistent = true;
    for (const auto& [n, v] : stmt.pinned) consistent = consistent && a.at(n) == v;
    if (!consistent) continue;
    std::vector<RegimeValue> key;
    for (const auto& [r, v] : a)
      if (!right_regimes.count(r)) key.push_back(v);
    const auto m = joints_.at(a).marginal(order);
    for (std::size_t g = 0; g < nG; ++g) {
      for (std::size_t r = 0; r < nR; ++r) {
        const double* row = m.data() + (g * nR + r) * nL;
        const double pc = std::accumulate(row, row + nL, 0.0);
        if (pc <= tol.zero) continue;
        std::vector<double> cond(row, row + nL);
        for (auto& x : cond) x /= pc;
        auto [it, fresh] = reference.try_emplace({key, g}, cond);
        if (!fresh && total_variation(it->second.data(), cond.data(), nL) > tol.tv) return false;
      }
    }
  }
  return true;
}

bool eci_holds(const MultiRegimeModel& model, const EciStatement& stmt, const Tolerance& tol) {
  return RegimeJoints(model).eci_holds(stmt, tol);
}

namespace {

struct ActionInfo {
  std::string regime;
  std::string itt;
};

ActionInfo action_info(const MultiRegimeModel& model, const std::string& action) {
  ActionInfo info{model.regime_of(action), {}};
  info.itt = model.itt_of(info.regime);
  if (info.itt.empty()) throw ModelError("'" + action + "' has no ITT variable");
  return info;
}

// Conditional law of `vars` given var=state, or empty when the event has
// negligible probability.
std::vector<double> conditional(const JointTable& j, const std::vector<std::string>& vars,
                                const std::string& var, std::size_t state, double zero) {
  std::vector<std::string> order{var};
  order.insert(order.end(), vars.begin(), vars.end());
  const auto m = j.marginal(order);
  const std::size_t block = m.size() / j.cardinalities()[j.position(var)];
  std::vector<double> out(m.begin() + static_cast<long>(state * block),
                          m.begin() + static_cast<long>((state + 1) * block));
  const double p = std::accumulate(out.begin(), out.end(), 0.0);
  if (p <= zero) return {};
  for (auto& x : out) x /= p;
  return out;
}

}  // namespace

bool check_distributional_consistency(const MultiRegimeModel& model, const NodeSet& v,
                                      const std::string& action, const Tolerance& tol) {
  const ActionInfo info = action_info(model, action);
  const std::vector<std::string> vars(v.begin(), v.end());
  for (const auto& x : vars) model.states(x);
  const auto& states = model.states(action);
  for (const auto& a : model.assignments()) {
    if (!a.at(info.regime).is_idle()) continue;
    const JointTable idle = joint(model, a);
    for (std::size_t t = 0; t < states.size(); ++t) {
      auto b = a;
      b[info.regime] = RegimeValue::set(states[t]);
      const JointTable set = joint(model, b);
      const auto p = conditional(idle, vars, action, t, tol.zero);
      const auto q = conditional(set, vars, info.itt, t, tol.zero);
      if (p.empty() || q.empty()) continue;
      if (total_variation(p.data(), q.data(), p.size()) > tol.tv) return false;
    }
  }
  return true;
}

bool check_ignorability(const MultiRegimeModel& model, const std::string& y,
                        const std::string& action, const Tolerance& tol) {
  const ActionInfo info = action_info(model, action);
  return eci_holds(model, EciStatement{{y}, {info.itt}, {action, info.regime}, {}}, tol);
}

bool check_sufficient_covariate(const MultiRegimeModel& model, const std::string& x,
                                const std::string& y, const std::string& action,
                                const Tolerance& tol) {
  const ActionInfo info = action_info(model, action);
  if (model.dag().node(x).latent) throw ModelError("covariate '" + x + "' is latent");
  const RegimeJoints joints(model);
  const auto& states = model.states(action);
  for (const auto& t : states) {
    EciStatement s{{y}, {info.itt}, {x}, {{info.regime, RegimeValue::set(t)}}};
    if (!joints.eci_holds(s, tol)) return false;
  }
  // (X, T*) has one law across the interventional regimes.
  for (const auto& a : model.assignments()) {
    if (a.at(info.regime).is_idle()) continue;
    auto b = a;
    b[info.regime] = RegimeValue::set(states.front());
    const auto p = joints.joint(a).marginal({x, info.itt});
    const auto q = joints.joint(b).marginal({x, info.itt});
    if (total_variation(p.data(), q.data(), p.size()) > tol.tv) return false;
  }
  return true;
}

Distribution interventional_query(const MultiRegimeModel& model, const std::string& y,
                                  const RegimeAssignment& regime) {
  return joint(model, regime).marginal({y});
}

double expectation(const MultiRegimeModel& model, const std::string& y,
                   const RegimeAssignment& regime) {
  const auto p = interventional_query(model, y, regime);
  const auto& states = model.states(y);
  double e = 0;
  for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * parse_number(y, states[i]);
  return e;
}

double gformula_eval(const MultiRegimeModel& model, const GFormulaQuery& q, const Tolerance& tol) {
  const JointTable obs = joint(model, {});
  const std::size_t y = model.state_index(q.y, q.y_value);
  const std::size_t x0 = model.state_index(q.x0, q.x0_value);
  const std::size_t x1 = model.state_index(q.x1, q.x1_value);
  const std::size_t nz = model.states(q.z).size();
  const std::size_t ny = model.states(q.y).size();

  const auto pz = conditional(obs, {q.z}, q.x0, x0, tol.zero);
  if (pz.empty()) throw PositivityError("positivity violation: P(" + q.x0 + "=" + q.x0_value + ") = 0");
  const auto m = obs.marginal({q.x1, q.z, q.y});
  double total = 0;
  for (std::size_t z = 0; z < nz; ++z) {
    if (pz[z] <= tol.zero) continue;
    const double* row = m.data() + (x1 * nz + z) * ny;
    const double pc = std::accumulate(row, row + ny, 0.0);
    if (pc <= tol.zero)
      throw PositivityError("positivity violation: P(" + q.x1 + "=" + q.x1_value + ", " + q.z +
                            "=" + model.states(q.z)[z] + ") = 0");
    total += row[y] / pc * pz[z];
  }
  return total;
}

Distribution backdoor_adjustment(const MultiRegimeModel& model, const std::string& y,
                                 const std::string& x, const std::string& action,
                                 const std::string& t, const Tolerance& tol) {
  const JointTable obs = joint(model, {});
  const std::size_t ti = model.state_index(action, t);
  const std::size_t nx = model.states(x).size();
  const std::size_t nt = model.states(action).size();
  const std::size_t ny = model.states(y).size();
  const auto px = obs.marginal({x});
  const auto m = obs.marginal({x, action, y});
  Distribution out(ny, 0.0);
  for (std::size_t xi = 0; xi < nx; ++xi) {
    if (px[xi] <= tol.zero) continue;
    const double* row = m.data() + (xi * nt + ti) * ny;
    const double pc = std::accumulate(row, row + ny, 0.0);
    if (pc <= tol.zero)
      throw PositivityError("positivity violation: P(" + x + "=" + model.states(x)[xi] + ", " +
                            action + "=" + t + ") = 0");
    for (std::size_t k = 0; k < ny; ++k) out[k] += px[xi] * row[k] / pc;
  }
  return out;
}

double ett(const MultiRegimeModel& model, const std::string& y, const std::string& action,
           const Tolerance& tol) {
  const ActionInfo info = action_info(model, action);
  const std::size_t one = model.state_index(info.itt, "1");
  model.state_index(action, "0");
  const auto& ys = model.states(y);
  auto mean_given = [&](const std::string& t) {
    const JointTable j = joint(model, {{info.regime, RegimeValue::set(t)}});
    const auto p = conditional(j, {y}, info.itt, one, tol.zero);
    if (p.empty()) throw PositivityError("P(" + info.itt + "=1) = 0");
    double e = 0;
    for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * parse_number(y, ys[i]);
    return e;
  };
  return mean_given("1") - mean_given("0");
}

double model_ace(const MultiRegimeModel& model, const std::string& y, const std::string& action) {
  const std::string& f = model.regime_of(action);
  model.state_index(action, "1");
  model.state_index(action, "0");
  return expectation(model, y, {{f, RegimeValue::set("1")}}) -
         expectation(model, y, {{f, RegimeValue::set("0")}});
}

std::vector<double> flat_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> out(n);
  double s = 0;
  for (auto& x : out) s += (x = e(rng));
  for (auto& x : out) x /= s;
  return out;
}

MultiRegimeModel random_itt_model(const Dag& dag, std::mt19937_64& rng) {
  std::vector<Cpt> cpts;
  for (const auto& n : dag.nodes()) {
    if (n.is_regime() || n.deterministic) continue;
    Cpt c{n.name, {}, {}};
    std::size_t rows = 1;
    for (const auto& p : dag.parents(n.name)) {
      if (dag.node(p).is_regime()) continue;
      c.parents.push_back(p);
      rows *= dag.node(p).states.size();
    }
    for (std::size_t r = 0; r < rows; ++r) c.rows.push_back(flat_simplex(n.states.size(), rng));
    cpts.push_back(std::move(c));
  }
  return MultiRegimeModel::itt(dag, std::move(cpts));
}

}  // namespace dtc
