#pragma once

// Extended conditional independence statements and their text syntax:
//
//   A, B _||_ C, F | D, F2=1
//
// `_||_` separates left from right, `|` introduces the conditioning terms,
// `NAME=VALUE` pins a regime to a value and `~` spells the idle value.

#include <compare>
#include <map>
#include <string>
#include <string_view>

#include "dtcausal/graph.hpp"

namespace dtc {

struct EciStatement {
  NodeSet left;
  NodeSet right;
  NodeSet given;
  /// Regimes conditioned on a specific value rather than as a variable.
  std::map<std::string, RegimeValue> pinned;

  /// All names mentioned anywhere in the statement.
  NodeSet mentioned() const;

  auto operator<=>(const EciStatement&) const = default;
};

/// Throws StatementError with a 1-based column on malformed input.
EciStatement parse_statement(std::string_view text);
std::string format_statement(const EciStatement& stmt);

/// True when `c` may appear in a variable or state name.
bool is_name_char(char c);

/// Checks the statement against a graph: names exist, left is nonempty and
/// purely stochastic, the three parts are pairwise disjoint, pinned names
/// are regime nodes with in-domain values. Throws StatementError.
void check_statement(const Dag& dag, const EciStatement& stmt);

}  // namespace dtc
