#include "sksynth/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>

#include "sksynth/errors.hpp"

namespace sksynth {

// ---------------------------------------------------------------------------
// QDIMACS
// ---------------------------------------------------------------------------

namespace {

struct QdimacsScanner {
  std::istringstream in;
  std::string line;
  std::istringstream tokens;
  int line_no = 0;

  explicit QdimacsScanner(const std::string& text) : in(text) {}

  // Advance to the next non-comment, non-empty line. Returns false at EOF.
  bool next_line() {
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t i = 0;
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) continue;
      if (line[i] == 'c') continue;
      tokens = std::istringstream(line);
      return true;
    }
    return false;
  }
};

}  // namespace

FactoredSpec parse_qdimacs(const std::string& text) {
  QdimacsScanner sc(text);
  if (!sc.next_line()) throw ParseError("missing header", 1);

  std::string word;
  sc.tokens >> word;
  long num_vars = 0, num_clauses = 0;
  if (word == "p") {
    std::string fmt;
    if (!(sc.tokens >> fmt >> num_vars >> num_clauses) || fmt != "cnf" || num_vars < 0 ||
        num_clauses < 0)
      throw ParseError("malformed header, expected `p cnf <vars> <clauses>`", sc.line_no);
    std::string extra;
    if (sc.tokens >> extra) throw ParseError("trailing tokens after header", sc.line_no);
  } else {
    throw ParseError("malformed header, expected `p cnf <vars> <clauses>`", sc.line_no);
  }

  // Quantifier prefix: consecutive same-quantifier lines merge into one block.
  std::vector<std::pair<char, std::vector<VarId>>> blocks;
  std::set<VarId> quantified;
  bool have_line = sc.next_line();
  while (have_line) {
    const int first = (sc.tokens >> std::ws).peek();
    if (first != 'a' && first != 'e') break;
    char quant;
    sc.tokens >> quant;
    std::vector<VarId> vars;
    long v;
    bool terminated = false;
    while (sc.tokens >> v) {
      if (v == 0) {
        terminated = true;
        break;
      }
      if (v < 0 || v > num_vars)
        throw ParseError("quantified variable " + std::to_string(v) + " out of range",
                         sc.line_no);
      if (!quantified.insert(static_cast<VarId>(v)).second)
        throw ParseError("variable " + std::to_string(v) + " quantified twice", sc.line_no);
      vars.push_back(static_cast<VarId>(v));
    }
    if (!terminated) throw ParseError("quantifier line not 0-terminated", sc.line_no);
    std::string junk;
    if (sc.tokens >> junk)
      throw ParseError("trailing tokens after quantifier line", sc.line_no);
    if (!blocks.empty() && blocks.back().first == quant) {
      auto& tail = blocks.back().second;
      tail.insert(tail.end(), vars.begin(), vars.end());
    } else {
      // Accepted prefixes: empty, `a`, `e`, or `a` then `e`. Anything else is
      // an alternation this problem class does not have.
      const bool ok = blocks.empty() || (blocks.size() == 1 && blocks[0].first == 'a' &&
                                         quant == 'e');
      if (!ok)
        throw ParseError(
            "unsupported quantifier prefix: expected universals followed by one "
            "innermost existential block",
            sc.line_no);
      blocks.push_back({quant, std::move(vars)});
    }
    have_line = sc.next_line();
  }

  std::vector<VarId> x_order;
  if (!blocks.empty() && blocks.back().first == 'e') x_order = blocks.back().second;
  std::set<VarId> x_set(x_order.begin(), x_order.end());

  FactoredSpec spec;
  spec.mgr = std::make_shared<AigManager>();
  std::set<VarId> seen_vars;

  // Pulls the next integer in the clause section, advancing across lines.
  // Returns false at end of file.
  auto next_int = [&](long& out) -> bool {
    while (true) {
      if (!have_line) return false;
      if (sc.tokens >> out) return true;
      sc.tokens.clear();
      std::string bad;
      if (sc.tokens >> bad)
        throw ParseError("unexpected token `" + bad + "` in clause section", sc.line_no);
      have_line = sc.next_line();
    }
  };

  long clauses_read = 0;
  while (clauses_read < num_clauses) {
    std::vector<NodeRef> lits;
    while (true) {
      long lit;
      if (!next_int(lit))
        throw ParseError("unexpected end of file: expected " + std::to_string(num_clauses) +
                             " clauses, got " + std::to_string(clauses_read),
                         sc.line_no);
      if (lit == 0) break;
      const long v = std::labs(lit);
      if (v > num_vars)
        throw ParseError("literal " + std::to_string(lit) + " out of range", sc.line_no);
      seen_vars.insert(static_cast<VarId>(v));
      const NodeRef leaf = spec.mgr->mk_var(static_cast<VarId>(v));
      lits.push_back(lit > 0 ? leaf : spec.mgr->mk_not(leaf));
    }
    spec.factors.push_back(spec.mgr->mk_big_or(lits));
    ++clauses_read;
  }
  long extra;
  if (next_int(extra)) throw ParseError("content after final clause", sc.line_no);

  spec.x_order = std::move(x_order);
  std::set<VarId> y_set;
  for (const auto& [quant, vars] : blocks)
    if (quant == 'a')
      for (VarId v : vars) y_set.insert(v);
  for (VarId v : seen_vars)
    if (!x_set.count(v)) y_set.insert(v);
  spec.y_vars.assign(y_set.begin(), y_set.end());
  for (VarId v : spec.y_vars) spec.mgr->mk_var(v);
  for (VarId v : spec.x_order) spec.mgr->mk_var(v);
  return spec;
}

// ---------------------------------------------------------------------------
// Factored format
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { kName, kPunct, kEnd } kind;
  std::string text;  // name or single punct char
  int line, col;
};

class FctrLexer {
 public:
  explicit FctrLexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= text_.size()) {
      tok_ = Token{Token::kEnd, "", line_, col_};
      return;
    }
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const int start_col = col_;
      std::string name;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          name.push_back(d);
          ++pos_;
          ++col_;
        } else {
          break;
        }
      }
      tok_ = Token{Token::kName, name, line_, start_col};
      return;
    }
    if (std::string("!&|^();:").find(c) != std::string::npos) {
      tok_ = Token{Token::kPunct, std::string(1, c), line_, col_};
      ++pos_;
      ++col_;
      return;
    }
    throw ParseError(std::string("unexpected character `") + c + "`", line_, col_);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_{Token::kEnd, "", 1, 1};
};

class FctrParser {
 public:
  explicit FctrParser(const std::string& text) : lex_(text) {
    spec_.mgr = std::make_shared<AigManager>();
  }

  FactoredSpec run() {
    while (lex_.peek().kind != Token::kEnd) {
      if (lex_.peek().kind == Token::kName && lex_.peek().text == "var")
        declaration();
      else
        factor();
    }
    std::sort(spec_.y_vars.begin(), spec_.y_vars.end());
    return std::move(spec_);
  }

 private:
  void expect_punct(const std::string& p) {
    const Token t = lex_.take();
    if (t.kind != Token::kPunct || t.text != p)
      throw ParseError("expected `" + p + "`", t.line, t.col);
  }

  void declaration() {
    lex_.take();  // var
    const Token name = lex_.take();
    if (name.kind != Token::kName)
      throw ParseError("expected variable name after `var`", name.line, name.col);
    expect_punct(":");
    const Token kind = lex_.take();
    if (kind.kind != Token::kName || (kind.text != "x" && kind.text != "y"))
      throw ParseError("expected `x` or `y`", kind.line, kind.col);
    expect_punct(";");
    if (ids_.count(name.text))
      throw ParseError("variable `" + name.text + "` declared twice", name.line, name.col);
    const VarId id = next_id_++;
    ids_.emplace(name.text, id);
    spec_.mgr->mk_var(id);
    spec_.mgr->set_var_name(id, name.text);
    if (kind.text == "x")
      spec_.x_order.push_back(id);
    else
      spec_.y_vars.push_back(id);
  }

  void factor() {
    spec_.factors.push_back(parse_or());
    expect_punct(";");
  }

  NodeRef parse_or() {
    NodeRef lhs = parse_xor();
    while (lex_.peek().kind == Token::kPunct && lex_.peek().text == "|") {
      lex_.take();
      lhs = spec_.mgr->mk_or(lhs, parse_xor());
    }
    return lhs;
  }

  NodeRef parse_xor() {
    NodeRef lhs = parse_and();
    while (lex_.peek().kind == Token::kPunct && lex_.peek().text == "^") {
      lex_.take();
      const NodeRef rhs = parse_and();
      // fixed expansion: (a|b) & !(a&b)
      lhs = spec_.mgr->mk_and(spec_.mgr->mk_or(lhs, rhs),
                              spec_.mgr->mk_not(spec_.mgr->mk_and(lhs, rhs)));
    }
    return lhs;
  }

  NodeRef parse_and() {
    NodeRef lhs = parse_unary();
    while (lex_.peek().kind == Token::kPunct && lex_.peek().text == "&") {
      lex_.take();
      lhs = spec_.mgr->mk_and(lhs, parse_unary());
    }
    return lhs;
  }

  NodeRef parse_unary() {
    const Token t = lex_.take();
    if (t.kind == Token::kPunct && t.text == "!") return spec_.mgr->mk_not(parse_unary());
    if (t.kind == Token::kPunct && t.text == "(") {
      const NodeRef inner = parse_or();
      expect_punct(")");
      return inner;
    }
    if (t.kind == Token::kName) {
      auto it = ids_.find(t.text);
      if (it == ids_.end())
        throw ParseError("undeclared name `" + t.text + "`", t.line, t.col);
      return spec_.mgr->mk_var(it->second);
    }
    throw ParseError("expected a variable, `!`, or `(`", t.line, t.col);
  }

  FctrLexer lex_;
  FactoredSpec spec_;
  std::unordered_map<std::string, VarId> ids_;
  VarId next_id_ = 1;
};

}  // namespace

FactoredSpec parse_factored(const std::string& text) { return FctrParser(text).run(); }

// ---------------------------------------------------------------------------
// Variable order
// ---------------------------------------------------------------------------

FactoredSpec order_variables(FactoredSpec spec) {
  std::unordered_map<VarId, std::size_t> occurrences;
  for (VarId x : spec.x_order) occurrences[x] = 0;
  for (NodeRef f : spec.factors)
    for (VarId v : spec.mgr->support(f))
      if (auto it = occurrences.find(v); it != occurrences.end()) ++it->second;
  std::stable_sort(spec.x_order.begin(), spec.x_order.end(),
                   [&](VarId a, VarId b) { return occurrences[a] < occurrences[b]; });
  return spec;
}

// ---------------------------------------------------------------------------
// Tseitin
// ---------------------------------------------------------------------------

int TseitinEncoder::fresh_cnf_var(VarId origin) {
  cnf_to_var_.push_back(origin);
  return next_var_++;
}

int TseitinEncoder::literal_for(NodeRef r) {
  if (mgr_->is_const(r)) throw UsageError("literal_for: constant root has no CNF literal");

  std::vector<std::uint32_t> stack{r.index()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (node_var_.find(n) != node_var_.end()) {
      stack.pop_back();
      continue;
    }
    const NodeRef nref = NodeRef::from_raw(n << 1);
    if (mgr_->is_var_node(nref)) {
      const VarId v = mgr_->var_of(nref);
      const int cv = fresh_cnf_var(v);
      node_var_.emplace(n, cv);
      var_to_cnf_.emplace(v, cv);
      stack.pop_back();
      continue;
    }
    const NodeRef f0 = mgr_->fanin0(nref);
    const NodeRef f1 = mgr_->fanin1(nref);
    const auto i0 = node_var_.find(f0.index());
    const auto i1 = node_var_.find(f1.index());
    if (i0 == node_var_.end() || i1 == node_var_.end()) {
      if (i0 == node_var_.end()) stack.push_back(f0.index());
      if (i1 == node_var_.end()) stack.push_back(f1.index());
      continue;
    }
    const int t = fresh_cnf_var(0);
    const int a = f0.complemented() ? -i0->second : i0->second;
    const int b = f1.complemented() ? -i1->second : i1->second;
    base_.add_clause({-t, a});
    base_.add_clause({-t, b});
    base_.add_clause({t, -a, -b});
    node_var_.emplace(n, t);
    stack.pop_back();
  }
  const int v = node_var_.at(r.index());
  return r.complemented() ? -v : v;
}

Cnf TseitinEncoder::query(std::span<const NodeRef> asserted_roots) {
  std::vector<int> units;
  bool contradiction = false;
  for (NodeRef r : asserted_roots) {
    if (r == AigManager::true_ref()) continue;
    if (r == AigManager::false_ref()) {
      contradiction = true;
      continue;
    }
    units.push_back(literal_for(r));
  }
  Cnf out = base_;
  out.num_vars = num_cnf_vars();
  if (contradiction) out.add_clause({});
  for (int u : units) out.add_clause({u});
  return out;
}

TseitinResult tseitin_cnf(const AigManager& m, std::span<const NodeRef> roots) {
  TseitinEncoder enc(m);
  TseitinResult result;
  result.cnf = enc.query(roots);
  result.var_to_cnf = enc.var_to_cnf();
  result.cnf_to_var = enc.cnf_to_var();
  return result;
}

}  // namespace sksynth
