#include "dtcausal/eci.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "dtcausal/error.hpp"

namespace dtc {

Universe::Universe(std::vector<std::string> names, std::vector<NodeKind> kinds)
    : names_(std::move(names)), kinds_(std::move(kinds)) {
  if (names_.size() > kMaxVariables)
    throw DerivationError("universe exceeds " + std::to_string(kMaxVariables) + " variables");
  if (names_.size() != kinds_.size()) throw DerivationError("universe names/kinds size mismatch");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!seen.insert(names_[i]).second)
      throw DerivationError("duplicate universe variable '" + names_[i] + "'");
    if (kinds_[i] == NodeKind::Regime) regimes_ |= VarMask{1} << i;
  }
}

Universe Universe::from_statements(const std::vector<EciStatement>& statements,
                                   const NodeSet& regimes) {
  NodeSet all;
  for (const auto& s : statements) {
    auto m = s.mentioned();
    all.insert(m.begin(), m.end());
  }
  all.insert(regimes.begin(), regimes.end());
  std::vector<std::string> names(all.begin(), all.end());
  std::vector<NodeKind> kinds;
  for (const auto& n : names)
    kinds.push_back(regimes.count(n) ? NodeKind::Regime : NodeKind::Stochastic);
  return Universe(std::move(names), std::move(kinds));
}

bool Universe::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Universe::index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DerivationError("variable '" + name + "' not in universe");
  return static_cast<std::size_t>(it - names_.begin());
}

VarMask Universe::mask(const NodeSet& names) const {
  VarMask m = 0;
  for (const auto& n : names) m |= VarMask{1} << index(n);
  return m;
}

NodeSet Universe::names(VarMask mask) const {
  NodeSet out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (mask & (VarMask{1} << i)) out.insert(names_[i]);
  return out;
}

std::string axiom_name(Axiom a) {
  switch (a) {
    case Axiom::Premise: return "premise";
    case Axiom::P1: return "P1";
    case Axiom::P2: return "P2";
    case Axiom::P3: return "P3";
    case Axiom::P4: return "P4";
    case Axiom::P5: return "P5";
  }
  return "?";
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::uint64_t triple_key(const Triple& t) {
  return std::uint64_t{t.left} | (std::uint64_t{t.right} << 16) | (std::uint64_t{t.given} << 32);
}

std::uint64_t pair_key(VarMask a, VarMask b) { return std::uint64_t{a} | (std::uint64_t{b} << 16); }

// Nonempty subsets of m, excluding m itself.
template <typename F>
void for_each_proper_subset(VarMask m, F&& f) {
  for (VarMask s = (m - 1) & m; s; s = (s - 1) & m) f(s);
}

template <typename F>
void for_each_nonempty_subset(VarMask m, F&& f) {
  for (VarMask s = m; s; s = (s - 1) & m) f(s);
}

Triple to_triple(const EciStatement& s, const Universe& u) {
  if (!s.pinned.empty())
    throw DerivationError("pinned regime values are not supported by the derivation engine");
  return Triple{u.mask(s.left), u.mask(s.right), u.mask(s.given)};
}

EciStatement to_statement(const Triple& t, const Universe& u) {
  return EciStatement{u.names(t.left), u.names(t.right), u.names(t.given), {}};
}

bool disjoint(const Triple& t) {
  return (t.left & t.right) == 0 && (t.left & t.given) == 0 && (t.right & t.given) == 0;
}

bool is_trivial(const Triple& t) {
  return (t.left & ~t.given) == 0 || (t.right & ~t.given) == 0;
}

bool well_formed(const Triple& t, const Universe& u, const ClosureOptions& o) {
  if (t.left == 0 || t.right == 0 || !disjoint(t)) return false;
  return o.regimes_as_stochastic || (t.left & u.regime_mask()) == 0;
}

}  // namespace

class ClosureBuilder {
 public:
  ClosureBuilder(const Universe& u, const ClosureOptions& o) {
    c_.universe_ = u;
    c_.options_ = o;
  }

  void add_premise(const EciStatement& s) {
    const Triple t = to_triple(s, c_.universe_);
    if (t.left == 0) throw DerivationError("premise has empty left-hand side");
    if (!disjoint(t))
      throw DerivationError("premise parts must be disjoint: " + format_statement(s));
    if (!c_.options_.regimes_as_stochastic && (t.left & c_.universe_.regime_mask()))
      throw DerivationError("premise has a regime on the left-hand side: " + format_statement(s));
    if (t.right == 0) return;
    add(t, Axiom::Premise, Side::Right, kNone, kNone);
  }

  void stop_at(const Triple& t) { stop_key_ = triple_key(t); }

  Closure run() {
    for (std::size_t i = 0; i < c_.records_.size() && !found_; ++i) expand(i);
    return std::move(c_);
  }

 private:
  void add(const Triple& t, Axiom a, Side s, std::size_t in0, std::size_t in1) {
    if (!well_formed(t, c_.universe_, c_.options_)) return;
    const auto k = triple_key(t);
    const std::size_t idx = c_.records_.size();
    if (!c_.lookup_.emplace(k, idx).second) return;
    std::size_t depth = 0;
    if (in0 != kNone) depth = std::max(depth, c_.records_[in0].depth + 1);
    if (in1 != kNone) depth = std::max(depth, c_.records_[in1].depth + 1);
    c_.records_.push_back({t, a, s, in0, in1, depth});
    by_left_given_[pair_key(t.left, t.given)].push_back(idx);
    by_right_given_[pair_key(t.right, t.given)].push_back(idx);
    if (c_.records_.size() > c_.options_.max_statements)
      throw DerivationError("closure exceeded " + std::to_string(c_.options_.max_statements) +
                            " statements");
    if (stop_key_ && *stop_key_ == k) found_ = true;
  }

  std::vector<std::size_t> bucket(const std::unordered_map<std::uint64_t, std::vector<std::size_t>>& m,
                                  std::uint64_t key) const {
    auto it = m.find(key);
    return it == m.end() ? std::vector<std::size_t>{} : it->second;
  }

  void expand(std::size_t i) {
    const Triple t = c_.records_[i].triple;
    const bool symmetric = c_.options_.regimes_as_stochastic;

    if (symmetric || (t.right & c_.universe_.regime_mask()) == 0)
      add({t.right, t.left, t.given}, Axiom::P1, Side::Right, i, kNone);

    for_each_proper_subset(t.right, [&](VarMask w) {
      add({t.left, w, t.given}, Axiom::P3, Side::Right, i, kNone);
      add({t.left, t.right & ~w, t.given | w}, Axiom::P4, Side::Right, i, kNone);
    });

    // t as the first contraction premise X _||_ Y | Z.
    for (std::size_t j : bucket(by_left_given_, pair_key(t.left, t.right | t.given)))
      add({t.left, t.right | c_.records_[j].triple.right, t.given}, Axiom::P5, Side::Right, i, j);
    // t as the second premise X _||_ W | (Y, Z).
    for_each_nonempty_subset(t.given, [&](VarMask y) {
      if (auto j = c_.find({t.left, y, t.given & ~y}))
        add({t.left, y | t.right, t.given & ~y}, Axiom::P5, Side::Right, *j, i);
    });

    if (symmetric) return;

    // Mirrored forms acting on the left-hand side.
    for_each_proper_subset(t.left, [&](VarMask w) {
      add({w, t.right, t.given}, Axiom::P3, Side::Left, i, kNone);
      add({t.left & ~w, t.right, t.given | w}, Axiom::P4, Side::Left, i, kNone);
    });
    for (std::size_t j : bucket(by_right_given_, pair_key(t.right, t.left | t.given)))
      add({t.left | c_.records_[j].triple.left, t.right, t.given}, Axiom::P5, Side::Left, i, j);
    for_each_nonempty_subset(t.given, [&](VarMask x1) {
      if (auto j = c_.find({x1, t.right, t.given & ~x1}))
        add({x1 | t.left, t.right, t.given & ~x1}, Axiom::P5, Side::Left, *j, i);
    });
  }

  Closure c_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_left_given_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_right_given_;
  std::optional<std::uint64_t> stop_key_;
  bool found_ = false;
};

std::optional<std::size_t> Closure::find(const Triple& t) const {
  auto it = lookup_.find(triple_key(t));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool Closure::contains(const EciStatement& stmt) const {
  Triple t = to_triple(stmt, universe_);
  if (is_trivial(t)) return true;
  t.left &= ~t.given;
  t.right &= ~t.given;
  if (t.left & t.right) return false;
  return find(t).has_value();
}

std::vector<EciStatement> Closure::statements() const {
  std::vector<EciStatement> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(to_statement(r.triple, universe_));
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<ProofTrace> Closure::trace(const EciStatement& stmt) const {
  const Triple t = to_triple(stmt, universe_);
  if (is_trivial(t)) return ProofTrace{{ProofStep{Axiom::P2, Side::Right, {}, stmt}}};
  if (!disjoint(t)) throw DerivationError("proof traces require a target with disjoint parts");
  auto root = find(t);
  if (!root) return std::nullopt;

  ProofTrace trace;
  std::unordered_map<std::size_t, std::size_t> step_of;
  std::function<std::size_t(std::size_t)> emit = [&](std::size_t r) -> std::size_t {
    if (auto it = step_of.find(r); it != step_of.end()) return it->second;
    const Record& rec = records_[r];
    ProofStep step{rec.axiom, rec.side, {}, to_statement(rec.triple, universe_)};
    if (rec.in0 != kNone) step.inputs.push_back(emit(rec.in0));
    if (rec.in1 != kNone) step.inputs.push_back(emit(rec.in1));
    trace.steps.push_back(std::move(step));
    step_of[r] = trace.steps.size() - 1;
    return trace.steps.size() - 1;
  };
  emit(*root);
  return trace;
}

Closure closure(const std::vector<EciStatement>& premises, const Universe& universe,
                const ClosureOptions& options) {
  ClosureBuilder b(universe, options);
  for (const auto& p : premises) b.add_premise(p);
  return b.run();
}

Derivation derivable(const std::vector<EciStatement>& premises, const EciStatement& target,
                     const Universe& universe, const ClosureOptions& options) {
  const Triple t = to_triple(target, universe);
  if (is_trivial(t))
    return {true, ProofTrace{{ProofStep{Axiom::P2, Side::Right, {}, target}}}};
  if (!disjoint(t)) throw DerivationError("target parts must be disjoint");
  ClosureBuilder b(universe, options);
  for (const auto& p : premises) b.add_premise(p);
  b.stop_at(t);
  const Closure c = b.run();
  auto trace = c.trace(target);
  return {trace.has_value(), std::move(trace)};
}

namespace {

bool step_valid(const ProofStep& step, const std::vector<Triple>& outputs,
                const std::set<Triple>& premise_set, const Universe& u, const ClosureOptions& o) {
  const Triple out = to_triple(step.output, u);
  auto in = [&](std::size_t k) { return outputs[step.inputs[k]]; };
  const bool right = step.side == Side::Right;
  switch (step.axiom) {
    case Axiom::Premise:
      return step.inputs.empty() && premise_set.count(out) != 0;
    case Axiom::P2:
      return step.inputs.empty() && is_trivial(out);
    case Axiom::P1: {
      if (step.inputs.size() != 1 || !well_formed(out, u, o)) return false;
      const Triple a = in(0);
      return out == Triple{a.right, a.left, a.given};
    }
    case Axiom::P3: {
      if (step.inputs.size() != 1 || !well_formed(out, u, o)) return false;
      const Triple a = in(0);
      if (right)
        return out.left == a.left && out.given == a.given && (out.right & ~a.right) == 0 &&
               out.right != a.right;
      return out.right == a.right && out.given == a.given && (out.left & ~a.left) == 0 &&
             out.left != a.left;
    }
    case Axiom::P4: {
      if (step.inputs.size() != 1 || !well_formed(out, u, o)) return false;
      const Triple a = in(0);
      if (right) {
        const VarMask w = a.right & ~out.right;
        return out.left == a.left && w != 0 && (out.right & ~a.right) == 0 &&
               out.given == (a.given | w);
      }
      const VarMask w = a.left & ~out.left;
      return out.right == a.right && w != 0 && (out.left & ~a.left) == 0 &&
             out.given == (a.given | w);
    }
    case Axiom::P5: {
      if (step.inputs.size() != 2 || !well_formed(out, u, o)) return false;
      const Triple a = in(0), b = in(1);
      if (right)
        return a.left == b.left && b.given == (a.right | a.given) &&
               out == Triple{a.left, a.right | b.right, a.given};
      return a.right == b.right && b.given == (a.left | a.given) &&
             out == Triple{a.left | b.left, a.right, a.given};
    }
  }
  return false;
}

}  // namespace

bool replay(const ProofTrace& trace, const std::vector<EciStatement>& premises,
            const EciStatement& target, const Universe& universe, const ClosureOptions& options) {
  if (trace.steps.empty() || trace.steps.back().output != target) return false;
  std::set<Triple> premise_set;
  for (const auto& p : premises) premise_set.insert(to_triple(p, universe));
  std::vector<Triple> outputs;
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const auto& step = trace.steps[s];
    for (auto i : step.inputs)
      if (i >= s) return false;
    if (!step_valid(step, outputs, premise_set, universe, options)) return false;
    outputs.push_back(to_triple(step.output, universe));
  }
  return true;
}

std::string format_trace(const ProofTrace& trace) {
  std::ostringstream os;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    std::string rule = axiom_name(s.axiom);
    if (s.side == Side::Left && (s.axiom == Axiom::P3 || s.axiom == Axiom::P4 || s.axiom == Axiom::P5))
      rule += "/left";
    os << (i + 1) << ". [" << rule << "] " << format_statement(s.output);
    if (!s.inputs.empty()) {
      os << "  (from";
      for (auto in : s.inputs) os << ' ' << (in + 1);
      os << ')';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace dtc
