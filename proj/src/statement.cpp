#include "dtcausal/statement.hpp"

#include <algorithm>
#include <cctype>

#include "dtcausal/error.hpp"

namespace dtc {

NodeSet EciStatement::mentioned() const {
  NodeSet all = left;
  all.insert(right.begin(), right.end());
  all.insert(given.begin(), given.end());
  for (const auto& [name, value] : pinned) all.insert(name);
  return all;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*' || c == '.' ||
         c == '\'';
}

namespace {

class StatementParser {
 public:
  explicit StatementParser(std::string_view text) : text_(text) {}

  EciStatement parse() {
    EciStatement s;
    list(s.left, nullptr, "left-hand variable");
    skip_ws();
    if (text_.substr(pos_, 4) != "_||_") fail("expected '_||_'");
    pos_ += 4;
    list(s.right, nullptr, "right-hand variable");
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '|') {
      ++pos_;
      list(s.given, &s.pinned, "conditioning term");
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    if (s.left.empty()) throw StatementError("left-hand side is empty", 1);
    return s;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw StatementError(msg, pos_ + 1); }

  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    // A lone '_' begins `_||_`, never a name.
    if (text_.substr(pos_, 4) == "_||_") return {};
    while (pos_ < text_.size() && is_name_char(text_[pos_]) && text_.substr(pos_, 4) != "_||_")
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Comma-separated (possibly empty) list. Pinned terms allowed only
  // when `pinned` is non-null.
  void list(NodeSet& out, std::map<std::string, RegimeValue>* pinned, const char* what) {
    skip_ws();
    if (pos_ == text_.size() || text_[pos_] == '|' || text_.substr(pos_, 4) == "_||_") return;
    for (;;) {
      std::size_t at = pos_;
      std::string n = name();
      if (n.empty()) fail(std::string("expected ") + what);
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '=') {
        if (pinned == nullptr) fail("regime values may only be pinned in the conditioning part");
        ++pos_;
        skip_ws();
        std::string v;
        if (pos_ < text_.size() && text_[pos_] == '~') {
          ++pos_;
          v = std::string(kIdleToken);
        } else {
          v = name();
        }
        if (v.empty()) fail("expected regime value or '~'");
        if (out.count(n) || !pinned->emplace(n, RegimeValue::parse(v)).second)
          throw StatementError("duplicate term '" + n + "'", at + 1);
      } else {
        if ((pinned && pinned->count(n)) || !out.insert(n).second)
          throw StatementError("duplicate term '" + n + "'", at + 1);
      }
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      return;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string join(const NodeSet& s) {
  std::string out;
  for (const auto& n : s) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

EciStatement parse_statement(std::string_view text) { return StatementParser(text).parse(); }

std::string format_statement(const EciStatement& stmt) {
  std::string out = join(stmt.left) + " _||_";
  if (!stmt.right.empty()) out += " " + join(stmt.right);
  if (!stmt.given.empty() || !stmt.pinned.empty()) {
    std::string cond = join(stmt.given);
    for (const auto& [n, v] : stmt.pinned) cond += (cond.empty() ? "" : ", ") + n + "=" + v.to_string();
    out += " | " + cond;
  }
  return out;
}

void check_statement(const Dag& dag, const EciStatement& stmt) {
  if (stmt.left.empty()) throw StatementError("left-hand side is empty");
  for (const auto& n : stmt.mentioned())
    if (!dag.has_node(n)) throw StatementError("unknown variable '" + n + "'");
  for (const auto& n : stmt.left)
    if (dag.node(n).is_regime())
      throw StatementError("left-hand side must be stochastic, '" + n + "' is a regime");
  auto overlap = [](const NodeSet& a, const NodeSet& b) {
    return std::any_of(a.begin(), a.end(), [&](const auto& x) { return b.count(x) != 0; });
  };
  NodeSet cond = stmt.given;
  for (const auto& [n, v] : stmt.pinned) cond.insert(n);
  if (overlap(stmt.left, stmt.right) || overlap(stmt.left, cond) || overlap(stmt.right, cond))
    throw StatementError("left, right and conditioning sets must be disjoint");
  for (const auto& [n, v] : stmt.pinned) {
    if (!dag.node(n).is_regime()) throw StatementError("'" + n + "' is not a regime and cannot be pinned");
    const auto dom = dag.regime_domain(n);
    if (std::find(dom.begin(), dom.end(), v) == dom.end())
      throw StatementError("value '" + v.to_string() + "' outside domain of '" + n + "'");
  }
}

}  // namespace dtc
