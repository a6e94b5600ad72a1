#include "dtcausal/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "dtcausal/error.hpp"
#include "dtcausal/model_io.hpp"

namespace dtc {

namespace {

struct Pos {
  std::size_t line = 1;
  std::size_t column = 1;
};

class DocParser {
 public:
  explicit DocParser(std::string_view src) : src_(src) {}

  GraphDoc parse() {
    skip();
    const Pos graph_at = here();
    if (!keyword("graph")) fail("expected 'graph'", {"graph"});
    doc_.name = name("graph name");
    expect("{");
    for (;;) {
      skip();
      const Pos at = here();
      if (punct("}")) break;
      if (keyword("node"))
        node_decl(at);
      else if (keyword("regime"))
        regime_decl(at);
      else if (keyword("edge"))
        edge_decl(at);
      else
        fail("expected one of 'node', 'regime', 'edge', '}'", {"node", "regime", "edge", "}"});
    }
    for (;;) {
      skip();
      if (i_ == src_.size()) break;
      const Pos at = here();
      if (keyword("statement"))
        statement_decl();
      else if (keyword("plan"))
        plan_decl(at);
      else
        fail("expected one of 'statement', 'plan' or end of input", {"statement", "plan", "<eof>"});
    }
    finish(graph_at);
    return std::move(doc_);
  }

 private:
  Pos here() const { return pos_; }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const {
    throw ParseError(msg, pos_.line, pos_.column, std::move(expected));
  }
  [[noreturn]] static void fail_at(Pos p, const std::string& msg) {
    throw ParseError(msg, p.line, p.column);
  }

  void advance() {
    if (src_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip() {
    while (i_ < src_.size()) {
      if (src_[i_] == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view peek_word() const {
    std::size_t j = i_;
    while (j < src_.size() && is_name_char(src_[j])) ++j;
    return src_.substr(i_, j - i_);
  }

  bool keyword(std::string_view kw) {
    skip();
    if (peek_word() != kw) return false;
    for (std::size_t k = 0; k < kw.size(); ++k) advance();
    return true;
  }

  bool punct(std::string_view p) {
    skip();
    if (src_.substr(i_, p.size()) != p) return false;
    for (std::size_t k = 0; k < p.size(); ++k) advance();
    return true;
  }

  void expect(std::string_view p) {
    if (!punct(p)) fail("expected '" + std::string(p) + "'", {std::string(p)});
  }

  std::string name(const std::string& what) {
    skip();
    const auto w = peek_word();
    if (w.empty()) fail("expected " + what, {"<name>"});
    for (std::size_t k = 0; k < w.size(); ++k) advance();
    return std::string(w);
  }

  void declare(Node n, Pos at) {
    if (doc_.dag.has_node(n.name)) fail_at(at, "duplicate node '" + n.name + "'");
    doc_.dag.add_node(std::move(n));
  }

  void node_decl(Pos at) {
    Node n;
    n.name = name("node name");
    for (;;) {
      if (keyword("latent")) {
        n.latent = true;
      } else if (keyword("deterministic")) {
        n.deterministic = true;
      } else if (keyword("states")) {
        expect("{");
        n.states.clear();
        do {
          auto s = name("state name");
          if (std::find(n.states.begin(), n.states.end(), s) != n.states.end())
            fail("duplicate state '" + s + "'");
          n.states.push_back(std::move(s));
        } while (punct(","));
        expect("}");
      } else if (punct(";")) {
        break;
      } else {
        fail("expected one of 'latent', 'deterministic', 'states', ';'",
             {"latent", "deterministic", "states", ";"});
      }
    }
    declare(std::move(n), at);
  }

  void regime_decl(Pos at) {
    Node n;
    n.name = name("regime name");
    n.kind = NodeKind::Regime;
    n.states.clear();
    if (!keyword("targets")) fail("expected 'targets'", {"targets"});
    n.target = name("target name");
    expect(";");
    declare(std::move(n), at);
  }

  void edge_decl(Pos at) {
    Edge e;
    e.from = name("edge source");
    expect("->");
    e.to = name("edge target");
    if (keyword("dashed")) e.dashed = true;
    expect(";");
    edges_.push_back({e, at});
  }

  void statement_decl() {
    auto label = name("statement name");
    expect(":");
    skip();
    const Pos start = here();
    const std::size_t begin = i_;
    while (i_ < src_.size() && src_[i_] != ';' && src_[i_] != '\n') advance();
    if (i_ == src_.size() || src_[i_] != ';') fail("expected ';'", {";"});
    const auto text = src_.substr(begin, i_ - begin);
    advance();
    try {
      statements_.push_back({start, parse_statement(text)});
    } catch (const StatementError& e) {
      const std::size_t col = e.column() == 0 ? 0 : e.column() - 1;
      fail_at(Pos{start.line, start.column + col}, e.what());
    }
    for (const auto& [n, s] : doc_.statements)
      if (n == label) fail_at(start, "duplicate statement name '" + label + "'");
    doc_.statements.emplace_back(std::move(label), statements_.back().second);
  }

  void plan_decl(Pos at) {
    if (doc_.plan) fail_at(at, "duplicate plan");
    expect(":");
    InterventionPlan plan;
    do {
      auto t = name("intervention target");
      if (keyword("as")) plan.regime_names[t] = name("regime name");
      plan.targets.push_back(std::move(t));
    } while (punct(","));
    expect(";");
    doc_.plan = std::move(plan);
    plan_at_ = at;
  }

  void finish(Pos graph_at) {
    Dag& dag = doc_.dag;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [e, at] : edges_) {
      for (const auto& n : {e.from, e.to})
        if (!dag.has_node(n)) fail_at(at, "unknown node '" + n + "'");
      if (e.from == e.to) fail_at(at, "self-loop on '" + e.from + "'");
      if (!seen.insert({e.from, e.to}).second)
        fail_at(at, "duplicate edge " + e.from + " -> " + e.to);
      dag.add_edge(e.from, e.to, e.dashed);
    }
    if (auto v = validate(dag); !v.empty()) fail_at(graph_at, v.front().message);
    for (std::size_t k = 0; k < statements_.size(); ++k) {
      try {
        check_statement(dag, statements_[k].second);
      } catch (const StatementError& e) {
        fail_at(statements_[k].first, e.what());
      }
    }
    if (doc_.plan) {
      for (const auto& t : doc_.plan->targets) {
        const Node* n = dag.find(t);
        if (n == nullptr || n->is_regime())
          fail_at(plan_at_, "plan target '" + t + "' is not a stochastic node");
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Pos pos_;
  GraphDoc doc_;
  std::vector<std::pair<Edge, Pos>> edges_;
  std::vector<std::pair<Pos, EciStatement>> statements_;
  Pos plan_at_;
};

bool default_states(const Node& n) { return n.states == std::vector<std::string>{"0", "1"}; }

}  // namespace

GraphDoc parse_graph_doc(std::string_view source) {
  try {
    return DocParser(source).parse();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 1, 1);
  }
}

GraphDoc load_graph_doc(const std::string& path) { return parse_graph_doc(read_file(path)); }

std::string format_dag(const Dag& dag, const std::string& name) {
  std::vector<const Node*> nodes;
  for (const auto& n : dag.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) {
    if (a->is_regime() != b->is_regime()) return !a->is_regime();
    return a->name < b->name;
  });
  std::vector<Edge> edges = dag.edges();
  std::sort(edges.begin(), edges.end());

  std::string out = "graph " + name + " {\n";
  for (const Node* n : nodes) {
    if (n->is_regime()) {
      out += "  regime " + n->name + " targets " + n->target + ";\n";
      continue;
    }
    out += "  node " + n->name;
    if (n->latent) out += " latent";
    if (n->deterministic) out += " deterministic";
    if (!default_states(*n)) {
      out += " states {";
      for (std::size_t i = 0; i < n->states.size(); ++i) out += (i ? ", " : "") + n->states[i];
      out += "}";
    }
    out += ";\n";
  }
  for (const auto& e : edges) out += "  edge " + e.from + " -> " + e.to + (e.dashed ? " dashed" : "") + ";\n";
  out += "}\n";
  return out;
}

std::string format_graph_doc(const GraphDoc& doc) {
  std::string out = format_dag(doc.dag, doc.name);
  for (const auto& [name, s] : doc.statements) out += "statement " + name + ": " + format_statement(s) + ";\n";
  if (doc.plan) {
    out += "plan: ";
    for (std::size_t i = 0; i < doc.plan->targets.size(); ++i) {
      const auto& t = doc.plan->targets[i];
      out += (i ? ", " : "") + t;
      if (auto it = doc.plan->regime_names.find(t); it != doc.plan->regime_names.end()) out += " as " + it->second;
    }
    out += ";\n";
  }
  return out;
}

PremiseFile parse_premises(std::string_view text) {
  PremiseFile out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t lead = 0;
    while (lead < line.size() && std::isspace(static_cast<unsigned char>(line[lead]))) ++lead;
    std::string_view body = line.substr(lead);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    if (!body.empty()) {
      if (body.substr(0, 8) == "regimes:") {
        std::string_view rest = body.substr(8);
        std::size_t col = lead + 9;
        std::size_t k = 0;
        while (k <= rest.size()) {
          std::size_t comma = rest.find(',', k);
          if (comma == std::string_view::npos) comma = rest.size();
          std::string_view item = rest.substr(k, comma - k);
          std::size_t a = 0, b = item.size();
          while (a < b && std::isspace(static_cast<unsigned char>(item[a]))) ++a;
          while (b > a && std::isspace(static_cast<unsigned char>(item[b - 1]))) --b;
          item = item.substr(a, b - a);
          if (item.empty() || !std::all_of(item.begin(), item.end(), is_name_char))
            throw ParseError("expected regime name", line_no, col + k + a, {"<name>"});
          out.regimes.insert(std::string(item));
          k = comma + 1;
        }
      } else {
        try {
          out.premises.push_back(parse_statement(body));
        } catch (const StatementError& e) {
          throw ParseError(e.what(), line_no, lead + (e.column() ? e.column() : 1));
        }
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

PremiseFile load_premises(const std::string& path) { return parse_premises(read_file(path)); }

}  // namespace dtc
