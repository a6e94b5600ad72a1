#pragma once

// The .cadt graph language and .eci premise files.
//
//   graph fig6 {
//     node T* latent;
//     node T deterministic;
//     node Y states {0, 1};
//     regime F_T targets T;
//     edge T* -> T dashed;
//     edge F_T -> T;
//     edge T -> Y;
//   }
//   statement ign: Y _||_ T*, F_T | T;
//   plan: T as F_T;
//
// `#` starts a comment. Premise files hold one statement per line and an
// optional `regimes: F1, F2` line naming the regime indicators.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtcausal/augment.hpp"
#include "dtcausal/graph.hpp"
#include "dtcausal/statement.hpp"

namespace dtc {

struct GraphDoc {
  std::string name;
  Dag dag;
  std::vector<std::pair<std::string, EciStatement>> statements;
  std::optional<InterventionPlan> plan;
};

/// Throws ParseError carrying line, column and expected tokens.
GraphDoc parse_graph_doc(std::string_view source);
GraphDoc load_graph_doc(const std::string& path);

/// Canonical text: nodes, regimes and edges each sorted by name.
std::string format_dag(const Dag& dag, const std::string& name);
std::string format_graph_doc(const GraphDoc& doc);

struct PremiseFile {
  std::vector<EciStatement> premises;
  NodeSet regimes;
};

/// Throws ParseError.
PremiseFile parse_premises(std::string_view text);
PremiseFile load_premises(const std::string& path);

}  // namespace dtc
