#include "apimig/srcparse.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "apimig/text.hpp"

namespace apimig {

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Module: return "Module";
    case NodeKind::FunctionDef: return "FunctionDef";
    case NodeKind::ClassDef: return "ClassDef";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Return: return "Return";
    case NodeKind::If: return "If";
    case NodeKind::Assert: return "Assert";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::Call: return "Call";
    case NodeKind::Attribute: return "Attribute";
    case NodeKind::Name: return "Name";
    case NodeKind::Keyword: return "Keyword";
    case NodeKind::Literal: return "Literal";
    case NodeKind::Tuple: return "Tuple";
    case NodeKind::ListExpr: return "ListExpr";
    case NodeKind::DictExpr: return "DictExpr";
    case NodeKind::Subscript: return "Subscript";
    case NodeKind::Other: return "Other";
  }
  return "?";
}

std::string QualifiedName::dotted() const {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ".";
    out += p;
  }
  return out;
}

namespace {

bool is_quote(char c) { return c == '\'' || c == '"'; }

bool is_string_prefix(std::string_view s) {
  if (s.empty() || s.size() > 3) return false;
  for (char c : s) {
    char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
  }
  return true;
}

// Scans a string literal starting at the opening quote. Returns one past the
// closing quote. Throws on unterminated strings.
size_t scan_string(std::string_view src, size_t i) {
  char q = src[i];
  bool triple = i + 2 < src.size() && src[i + 1] == q && src[i + 2] == q;
  size_t start = i;
  i += triple ? 3 : 1;
  while (i < src.size()) {
    if (src[i] == '\\') {
      i += 2;
      continue;
    }
    if (triple) {
      if (src[i] == q && i + 2 < src.size() && src[i + 1] == q && src[i + 2] == q) return i + 3;
      ++i;
    } else {
      if (src[i] == q) return i + 1;
      if (src[i] == '\n') throw ParseError("unterminated string literal", start);
      ++i;
    }
  }
  throw ParseError("unterminated string literal", start);
}

struct Token {
  enum Type { Name, Number, String, Op, End } type = End;
  size_t begin = 0;
  size_t end = 0;
  std::string_view text;
};

// Tokenizes src[lo, hi); spans are absolute into src. Comments and
// whitespace (including newlines) are skipped.
std::vector<Token> tokenize(std::string_view src, size_t lo, size_t hi) {
  static const std::array<std::string_view, 19> kMultiOps = {
      "**=", "//=", ">>=", "<<=", "==", "!=", "<=", ">=", "//", "**",
      "->",  ":=",  "+=",  "-=",  "*=", "/=", "%=", ">>", "<<"};
  std::vector<Token> out;
  size_t i = lo;
  while (i < hi) {
    char c = src[i];
    if (is_space_char(c) || c == '\\') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < hi && src[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.begin = i;
    if (is_quote(c)) {
      t.type = Token::String;
      i = scan_string(src, i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < hi && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      t.type = Token::Number;
      ++i;
      while (i < hi && (is_word_char(src[i]) || src[i] == '.')) ++i;
    } else if (is_word_char(c)) {
      t.type = Token::Name;
      ++i;
      while (i < hi && is_word_char(src[i])) ++i;
      if (i < hi && is_quote(src[i]) && is_string_prefix(src.substr(t.begin, i - t.begin))) {
        t.type = Token::String;
        i = scan_string(src, i);
      }
    } else {
      t.type = Token::Op;
      bool multi = false;
      for (auto op : kMultiOps) {
        if (i + op.size() <= hi && src.substr(i, op.size()) == op) {
          i += op.size();
          multi = true;
          break;
        }
      }
      if (!multi) ++i;
    }
    t.end = i;
    t.text = src.substr(t.begin, t.end - t.begin);
    out.push_back(t);
  }
  return out;
}

int bracket_delta(const Token& t) {
  if (t.type != Token::Op || t.text.size() != 1) return 0;
  char c = t.text[0];
  if (c == '(' || c == '[' || c == '{') return 1;
  if (c == ')' || c == ']' || c == '}') return -1;
  return 0;
}

bool is_op(const Token& t, std::string_view s) { return t.type == Token::Op && t.text == s; }

const std::set<std::string_view>& other_keywords() {
  static const std::set<std::string_view> kw = {
      "import", "from",  "for",   "while",    "try",   "except", "finally",
      "with",   "elif",  "else",  "pass",     "break", "continue", "raise",
      "del",    "global", "nonlocal", "lambda", "yield", "async",  "await"};
  return kw;
}

class ExprParser {
 public:
  ExprParser(std::string_view src, const std::vector<Token>& toks) : src_(src), toks_(toks) {}

  // Parses [lo, hi) allowing top-level commas (unparenthesized tuples).
  SyntaxNode parse_full(size_t lo, size_t hi) {
    auto elems = split_top(lo, hi, ',');
    if (elems.size() == 1) return parse_single(lo, hi);
    SyntaxNode n = make(NodeKind::Tuple, lo, hi);
    for (auto [a, b] : elems)
      if (a < b) n.children.push_back(parse_single(a, b));
    return n;
  }

  // Parses a single expression. A lone primary chain keeps its structure;
  // anything else (operators, mixed forms) becomes an Other node holding the
  // primary chains it contains.
  SyntaxNode parse_single(size_t lo, size_t hi) {
    std::vector<SyntaxNode> operands;
    bool single_cover = false;
    size_t i = lo;
    while (i < hi) {
      if (starts_primary(i)) {
        size_t before = i;
        operands.push_back(parse_chain(i, hi));
        single_cover = operands.size() == 1 && before == lo && i == hi;
      } else {
        ++i;
      }
    }
    if (single_cover) return std::move(operands[0]);
    SyntaxNode n = make(NodeKind::Other, lo, hi);
    n.children = std::move(operands);
    return n;
  }

  // Splits [lo, hi) on a top-level single-char operator.
  std::vector<std::pair<size_t, size_t>> split_top(size_t lo, size_t hi, char sep) {
    std::vector<std::pair<size_t, size_t>> out;
    int depth = 0;
    size_t start = lo;
    for (size_t i = lo; i < hi; ++i) {
      depth += bracket_delta(toks_[i]);
      if (depth == 0 && toks_[i].type == Token::Op && toks_[i].text.size() == 1 &&
          toks_[i].text[0] == sep) {
        out.emplace_back(start, i);
        start = i + 1;
      }
    }
    out.emplace_back(start, hi);
    return out;
  }

  SyntaxNode make(NodeKind k, size_t lo, size_t hi) {
    SyntaxNode n;
    n.kind = k;
    if (lo < hi && lo < toks_.size()) {
      n.begin = toks_[lo].begin;
      n.end = toks_[hi - 1].end;
    }
    return n;
  }

 private:
  bool starts_primary(size_t i) {
    const Token& t = toks_[i];
    if (t.type == Token::Name) return !other_keywords().count(t.text);
    if (t.type == Token::Number || t.type == Token::String) return true;
    return is_op(t, "(") || is_op(t, "[") || is_op(t, "{");
  }

  // Index of the bracket closing toks_[open], or hi when unclosed (only
  // possible on malformed slices; logical lines keep brackets balanced).
  size_t matching(size_t open, size_t hi) {
    int depth = 0;
    for (size_t i = open; i < hi; ++i) {
      depth += bracket_delta(toks_[i]);
      if (depth == 0) return i;
    }
    return hi;
  }

  SyntaxNode parse_chain(size_t& i, size_t hi) {
    SyntaxNode cur = parse_atom(i, hi);
    while (i < hi) {
      if (is_op(toks_[i], ".") && i + 1 < hi && toks_[i + 1].type == Token::Name) {
        SyntaxNode attr;
        attr.kind = NodeKind::Attribute;
        attr.begin = cur.begin;
        attr.end = toks_[i + 1].end;
        attr.name = std::string(toks_[i + 1].text);
        attr.children.push_back(std::move(cur));
        cur = std::move(attr);
        i += 2;
      } else if (is_op(toks_[i], "(")) {
        size_t close = matching(i, hi);
        if (close >= hi) {
          ++i;
          break;
        }
        SyntaxNode call;
        call.kind = NodeKind::Call;
        call.begin = cur.begin;
        call.end = toks_[close].end;
        call.children.push_back(std::move(cur));
        parse_args(i + 1, close, call);
        cur = std::move(call);
        i = close + 1;
      } else if (is_op(toks_[i], "[")) {
        size_t close = matching(i, hi);
        if (close >= hi) {
          ++i;
          break;
        }
        SyntaxNode sub;
        sub.kind = NodeKind::Subscript;
        sub.begin = cur.begin;
        sub.end = toks_[close].end;
        sub.children.push_back(std::move(cur));
        for (auto [a, b] : split_top(i + 1, close, ','))
          if (a < b) sub.children.push_back(parse_index(a, b));
        cur = std::move(sub);
        i = close + 1;
      } else {
        break;
      }
    }
    return cur;
  }

  SyntaxNode parse_atom(size_t& i, size_t hi) {
    const Token& t = toks_[i];
    if (t.type == Token::Name) {
      SyntaxNode n = make(t.text == "True" || t.text == "False" || t.text == "None"
                              ? NodeKind::Literal
                              : NodeKind::Name,
                          i, i + 1);
      ++i;
      return n;
    }
    if (t.type == Token::Number || t.type == Token::String) {
      SyntaxNode n = make(NodeKind::Literal, i, i + 1);
      ++i;
      return n;
    }
    if (is_op(t, "(")) {
      size_t close = matching(i, hi);
      if (close >= hi) {
        SyntaxNode n = make(NodeKind::Other, i, i + 1);
        ++i;
        return n;
      }
      auto elems = split_top(i + 1, close, ',');
      SyntaxNode n;
      bool tuple = elems.size() > 1;
      n.kind = tuple ? NodeKind::Tuple : NodeKind::Other;
      n.begin = t.begin;
      n.end = toks_[close].end;
      for (auto [a, b] : elems)
        if (a < b) n.children.push_back(parse_single(a, b));
      i = close + 1;
      return n;
    }
    if (is_op(t, "[")) {
      size_t close = matching(i, hi);
      if (close >= hi) {
        SyntaxNode n = make(NodeKind::Other, i, i + 1);
        ++i;
        return n;
      }
      SyntaxNode n;
      n.kind = NodeKind::ListExpr;
      n.begin = t.begin;
      n.end = toks_[close].end;
      for (auto [a, b] : split_top(i + 1, close, ','))
        if (a < b) n.children.push_back(parse_single(a, b));
      i = close + 1;
      return n;
    }
    if (is_op(t, "{")) {
      size_t close = matching(i, hi);
      if (close >= hi) {
        SyntaxNode n = make(NodeKind::Other, i, i + 1);
        ++i;
        return n;
      }
      SyntaxNode n;
      n.kind = NodeKind::DictExpr;
      n.begin = t.begin;
      n.end = toks_[close].end;
      for (auto [a, b] : split_top(i + 1, close, ',')) {
        if (a >= b) continue;
        auto kv = split_top(a, b, ':');
        for (auto [ka, kb] : kv)
          if (ka < kb) n.children.push_back(parse_single(ka, kb));
      }
      i = close + 1;
      return n;
    }
    // Unreachable via starts_primary.
    SyntaxNode n = make(NodeKind::Other, i, i + 1);
    ++i;
    return n;
  }

  SyntaxNode parse_index(size_t lo, size_t hi) {
    auto pieces = split_top(lo, hi, ':');
    if (pieces.size() == 1) return parse_single(lo, hi);
    SyntaxNode n = make(NodeKind::Other, lo, hi);
    for (auto [a, b] : pieces)
      if (a < b) n.children.push_back(parse_single(a, b));
    return n;
  }

  void parse_args(size_t lo, size_t hi, SyntaxNode& call) {
    for (auto [a, b] : split_top(lo, hi, ',')) {
      if (a >= b) continue;
      if (toks_[a].type == Token::Name && a + 1 < b && is_op(toks_[a + 1], "=")) {
        SyntaxNode kw;
        kw.kind = NodeKind::Keyword;
        kw.begin = toks_[a].begin;
        kw.end = toks_[b - 1].end;
        kw.name = std::string(toks_[a].text);
        kw.children.push_back(parse_single(a + 2, b));
        call.children.push_back(std::move(kw));
      } else {
        call.children.push_back(parse_single(a, b));
      }
    }
  }

  std::string_view src_;
  const std::vector<Token>& toks_;
};

// Parses the tokens of one logical line (header + optional inline body).
SyntaxNode parse_stmt_tokens(std::string_view src, const std::vector<Token>& toks) {
  SyntaxNode stmt;
  stmt.kind = NodeKind::Other;
  if (toks.empty()) return stmt;
  stmt.begin = toks.front().begin;
  stmt.end = toks.back().end;
  size_t n = toks.size();
  ExprParser ep(src, toks);

  auto top_colon = [&](size_t lo) -> size_t {
    int depth = 0;
    for (size_t i = lo; i < n; ++i) {
      depth += bracket_delta(toks[i]);
      if (depth == 0 && is_op(toks[i], ":")) return i;
    }
    return n;
  };

  const Token& first = toks[0];
  if (first.type == Token::Name) {
    std::string_view kw = first.text;
    if ((kw == "def" || kw == "class") && n >= 2 && toks[1].type == Token::Name) {
      stmt.kind = kw == "def" ? NodeKind::FunctionDef : NodeKind::ClassDef;
      stmt.name = std::string(toks[1].text);
      size_t colon = top_colon(0);
      if (colon + 1 < n) {  // inline body
        SyntaxNode body = parse_stmt_tokens(src, {toks.begin() + colon + 1, toks.end()});
        stmt.children.push_back(std::move(body));
      }
      return stmt;
    }
    if (kw == "return") {
      stmt.kind = NodeKind::Return;
      if (n > 1) stmt.children.push_back(ep.parse_full(1, n));
      return stmt;
    }
    if (kw == "assert") {
      stmt.kind = NodeKind::Assert;
      auto pieces = ep.split_top(1, n, ',');
      for (auto [a, b] : pieces)
        if (a < b) stmt.children.push_back(ep.parse_single(a, b));
      if (stmt.children.empty()) stmt.kind = NodeKind::Other;
      return stmt;
    }
    if (kw == "if") {
      size_t colon = top_colon(1);
      if (colon < n) {
        stmt.kind = NodeKind::If;
        stmt.children.push_back(ep.parse_full(1, colon));
        if (colon + 1 < n) {
          SyntaxNode body = parse_stmt_tokens(src, {toks.begin() + colon + 1, toks.end()});
          stmt.children.push_back(std::move(body));
        }
        return stmt;
      }
    }
    if (other_keywords().count(kw)) return stmt;  // Other
  }

  // Single top-level `=`: plain assignment. Multiple targets or augmented
  // assignment degrade to Other.
  {
    int depth = 0;
    std::vector<size_t> eqs;
    bool augmented = false;
    for (size_t i = 0; i < n; ++i) {
      depth += bracket_delta(toks[i]);
      if (depth != 0 || toks[i].type != Token::Op) continue;
      if (toks[i].text == "=") eqs.push_back(i);
      if (toks[i].text.size() >= 2 && toks[i].text.back() == '=' && toks[i].text != "==" &&
          toks[i].text != "!=" && toks[i].text != "<=" && toks[i].text != ">=")
        augmented = true;
    }
    if (augmented || eqs.size() > 1) return stmt;  // Other
    if (eqs.size() == 1) {
      size_t eq = eqs[0];
      if (eq == 0 || eq + 1 == n) return stmt;
      SyntaxNode target = ep.parse_full(0, eq);
      switch (target.kind) {
        case NodeKind::Name:
        case NodeKind::Attribute:
        case NodeKind::Subscript:
        case NodeKind::Tuple:
          break;
        default:
          return stmt;  // Other (decorated / multi-target / exotic)
      }
      stmt.kind = NodeKind::Assign;
      stmt.children.push_back(std::move(target));
      stmt.children.push_back(ep.parse_full(eq + 1, n));
      return stmt;
    }
  }

  SyntaxNode expr = ep.parse_full(0, n);
  if (expr.kind == NodeKind::Other && expr.children.empty()) return stmt;  // Other leaf
  stmt.kind = NodeKind::ExprStmt;
  stmt.children.push_back(std::move(expr));
  return stmt;
}

}  // namespace

std::vector<LogicalLine> logical_lines(std::string_view source) {
  std::vector<LogicalLine> out;
  size_t i = 0;
  size_t line_no = 1;
  std::vector<size_t> opener_stack;
  bool pending = false;   // inside a logical line with content
  LogicalLine cur;
  size_t last_token_end = 0;

  auto begin_content = [&](size_t pos) {
    if (!pending) {
      pending = true;
      cur = LogicalLine{};
      cur.begin = pos;
      cur.first_line = line_no;
      size_t ls = source.rfind('\n', pos == 0 ? 0 : pos - 1);
      ls = (ls == std::string_view::npos || pos == 0) ? 0 : ls + 1;
      cur.indent = pos - ls;
    }
  };
  auto flush = [&]() {
    if (pending) {
      cur.end = last_token_end;
      cur.last_line = line_no;
      out.push_back(cur);
      pending = false;
    }
  };

  while (i < source.size()) {
    char c = source[i];
    if (c == '\n') {
      if (opener_stack.empty()) flush();
      ++line_no;
      ++i;
      continue;
    }
    if (is_space_char(c)) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < source.size() && source[i] != '\n') ++i;
      continue;
    }
    if (c == '\\' && i + 1 < source.size() && source[i + 1] == '\n') {
      begin_content(i);
      ++line_no;
      i += 2;
      continue;
    }
    begin_content(i);
    if (is_quote(c)) {
      size_t end = scan_string(source, i);
      line_no += static_cast<size_t>(std::count(source.begin() + static_cast<long>(i),
                                                source.begin() + static_cast<long>(end), '\n'));
      i = end;
      last_token_end = i;
      continue;
    }
    if (is_word_char(c)) {
      size_t b = i;
      while (i < source.size() && is_word_char(source[i])) ++i;
      if (i < source.size() && is_quote(source[i]) && is_string_prefix(source.substr(b, i - b))) {
        size_t end = scan_string(source, i);
        line_no += static_cast<size_t>(std::count(source.begin() + static_cast<long>(i),
                                                  source.begin() + static_cast<long>(end), '\n'));
        i = end;
      }
      last_token_end = i;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') {
      opener_stack.push_back(i);
    } else if (c == ')' || c == ']' || c == '}') {
      if (opener_stack.empty()) throw ParseError("unbalanced closing delimiter", i);
      opener_stack.pop_back();
    }
    ++i;
    last_token_end = i;
  }
  if (!opener_stack.empty())
    throw ParseError("unclosed delimiter", opener_stack.back());
  flush();
  return out;
}

namespace {

std::vector<SyntaxNode> parse_block(std::string_view source, const std::vector<LogicalLine>& lines,
                                    size_t& idx, size_t block_indent) {
  std::vector<SyntaxNode> stmts;
  while (idx < lines.size() && lines[idx].indent >= block_indent) {
    const LogicalLine& line = lines[idx];
    ++idx;
    auto toks = tokenize(source, line.begin, line.end);
    SyntaxNode node = parse_stmt_tokens(source, toks);
    bool opener = !toks.empty() && is_op(toks.back(), ":");
    if (opener && idx < lines.size() && lines[idx].indent > line.indent) {
      auto body = parse_block(source, lines, idx, lines[idx].indent);
      for (auto& b : body) {
        node.end = std::max(node.end, b.end);
        node.children.push_back(std::move(b));
      }
    }
    stmts.push_back(std::move(node));
  }
  return stmts;
}

}  // namespace

SyntaxNode parse_module(std::string_view source) {
  SyntaxNode mod;
  mod.kind = NodeKind::Module;
  mod.begin = 0;
  mod.end = source.size();
  auto lines = logical_lines(source);
  size_t idx = 0;
  size_t base = lines.empty() ? 0 : lines.front().indent;
  for (const auto& l : lines) base = std::min(base, l.indent);
  mod.children = parse_block(source, lines, idx, base);
  // Stray lines (inconsistent dedent below the first line's indent).
  while (idx < lines.size()) {
    auto toks = tokenize(source, lines[idx].begin, lines[idx].end);
    mod.children.push_back(parse_stmt_tokens(source, toks));
    ++idx;
  }
  return mod;
}

SyntaxNode parse_statement(std::string_view stmt_source) {
  SyntaxNode mod = parse_module(stmt_source);
  if (mod.children.size() == 1) return std::move(mod.children[0]);
  if (mod.children.empty()) {
    SyntaxNode n;
    n.kind = NodeKind::Other;
    n.begin = 0;
    n.end = stmt_source.size();
    return n;
  }
  mod.kind = NodeKind::Other;
  return mod;
}

QualifiedName classify_name(std::vector<std::string> parts, std::string_view path) {
  QualifiedName q;
  q.parts = std::move(parts);
  for (const auto& p : q.parts) {
    if (p.rfind("test_", 0) == 0 || p.rfind("Test", 0) == 0) q.is_test = true;
    if (!p.empty() && p[0] == '_') q.is_private = true;
  }
  if (!path.empty()) {
    size_t pos = 0;
    while (pos <= path.size()) {
      size_t slash = path.find('/', pos);
      std::string_view seg = path.substr(pos, (slash == std::string_view::npos ? path.size() : slash) - pos);
      if (seg == "tests") q.is_test = true;
      if (slash == std::string_view::npos) break;
      pos = slash + 1;
    }
  }
  return q;
}

std::vector<const SyntaxNode*> enclosing_chain(const SyntaxNode& tree, std::string_view source,
                                               size_t line) {
  // Byte offset of the line's first non-space character.
  size_t pos = 0;
  for (size_t ln = 1; ln < line && pos < source.size(); ++ln) {
    size_t nl = source.find('\n', pos);
    if (nl == std::string_view::npos) {
      pos = source.size();
      break;
    }
    pos = nl + 1;
  }
  size_t b = pos;
  while (b < source.size() && source[b] != '\n' && is_space_char(source[b])) ++b;

  std::vector<const SyntaxNode*> chain;
  const SyntaxNode* node = &tree;
  bool descended = true;
  while (descended) {
    descended = false;
    for (const auto& child : node->children) {
      if (child.begin <= b && b < child.end) {
        if (child.kind == NodeKind::FunctionDef || child.kind == NodeKind::ClassDef)
          chain.push_back(&child);
        node = &child;
        descended = true;
        break;
      }
    }
  }
  return chain;
}

QualifiedName enclosing_def(const SyntaxNode& tree, std::string_view source, size_t line,
                            std::string_view path) {
  std::vector<std::string> parts;
  for (const SyntaxNode* n : enclosing_chain(tree, source, line)) parts.push_back(n->name);
  return classify_name(std::move(parts), path);
}

std::set<std::string> call_names(const SyntaxNode& node, std::string_view source) {
  std::set<std::string> out;
  std::vector<const SyntaxNode*> stack = {&node};
  while (!stack.empty()) {
    const SyntaxNode* n = stack.back();
    stack.pop_back();
    if (n->kind == NodeKind::Call && !n->children.empty()) {
      const SyntaxNode& callee = n->children.front();
      if (callee.kind == NodeKind::Attribute)
        out.insert(callee.name);
      else if (callee.kind == NodeKind::Name)
        out.insert(std::string(callee.text(source)));
    }
    for (const auto& c : n->children) stack.push_back(&c);
  }
  return out;
}

}  // namespace apimig
