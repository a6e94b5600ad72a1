#pragma once

// Semigraphoid closure for (extended) conditional independence statements.
//
// Statements are stored over a bounded universe as triples of bit masks
// in normal form: the three parts pairwise disjoint and both sides
// nonempty. Statements whose normal form has an empty side are P2
// consequences and are never stored; contains() answers them directly.
// Intersection is never applied.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtcausal/graph.hpp"
#include "dtcausal/statement.hpp"

namespace dtc {

using VarMask = std::uint32_t;

class Universe {
 public:
  static constexpr std::size_t kMaxVariables = 16;

  Universe() = default;
  /// Throws DerivationError for more than 16 variables or duplicate names.
  Universe(std::vector<std::string> names, std::vector<NodeKind> kinds);

  /// Every name mentioned by `statements`, sorted; names in `regimes` are
  /// regime indicators, everything else stochastic.
  static Universe from_statements(const std::vector<EciStatement>& statements,
                                  const NodeSet& regimes = {});

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  NodeKind kind(std::size_t i) const { return kinds_[i]; }
  bool contains(const std::string& name) const;
  std::size_t index(const std::string& name) const;
  VarMask mask(const NodeSet& names) const;
  NodeSet names(VarMask mask) const;
  VarMask regime_mask() const { return regimes_; }

 private:
  std::vector<std::string> names_;
  std::vector<NodeKind> kinds_;
  VarMask regimes_ = 0;
};

struct Triple {
  VarMask left = 0;
  VarMask right = 0;
  VarMask given = 0;

  auto operator<=>(const Triple&) const = default;
};

enum class Axiom { Premise, P1, P2, P3, P4, P5 };
/// Which side of the statement a P3/P4/P5 step acts on. Left-hand steps
/// are the mirrored forms, used when symmetry is unavailable.
enum class Side { Right, Left };

std::string axiom_name(Axiom a);

struct ProofStep {
  Axiom axiom = Axiom::Premise;
  Side side = Side::Right;
  /// Indices of earlier steps.
  std::vector<std::size_t> inputs;
  EciStatement output;
};

struct ProofTrace {
  std::vector<ProofStep> steps;
};

struct ClosureOptions {
  /// Treat regime indicators as random variables, so symmetry may move
  /// them to the left-hand side.
  bool regimes_as_stochastic = false;
  /// Guard against runaway closures.
  std::size_t max_statements = 2'000'000;
};

class Closure {
 public:
  const Universe& universe() const { return universe_; }
  const ClosureOptions& options() const { return options_; }
  std::size_t size() const { return records_.size(); }

  /// True iff `stmt` (normalised) is in the closure or is a P2 instance.
  bool contains(const EciStatement& stmt) const;
  /// Stored statements in a deterministic order.
  std::vector<EciStatement> statements() const;
  /// Derivation of `stmt` from the premises; absent if not contained.
  std::optional<ProofTrace> trace(const EciStatement& stmt) const;

 private:
  friend class ClosureBuilder;

  struct Record {
    Triple triple;
    Axiom axiom;
    Side side;
    std::size_t in0;
    std::size_t in1;
    std::size_t depth;
  };

  std::optional<std::size_t> find(const Triple& t) const;

  Universe universe_;
  ClosureOptions options_;
  std::vector<Record> records_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

/// Saturates the premises under P1-P5. Throws DerivationError on malformed
/// premises or when max_statements is exceeded.
Closure closure(const std::vector<EciStatement>& premises, const Universe& universe,
                const ClosureOptions& options = {});

struct Derivation {
  bool derived = false;
  std::optional<ProofTrace> trace;
};

/// Sound but incomplete: derived=false means this engine found no proof.
/// The trace has minimal depth among the engine's derivations.
Derivation derivable(const std::vector<EciStatement>& premises, const EciStatement& target,
                     const Universe& universe, const ClosureOptions& options = {});

/// Re-checks every step of `trace` against the axioms and the premises and
/// that the final step yields `target`.
bool replay(const ProofTrace& trace, const std::vector<EciStatement>& premises,
            const EciStatement& target, const Universe& universe,
            const ClosureOptions& options = {});

std::string format_trace(const ProofTrace& trace);

}  // namespace dtc
