#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apimig/template_lang.hpp"  // ParseError

namespace apimig {

enum class NodeKind {
  Module,
  FunctionDef,
  ClassDef,
  Assign,
  Return,
  If,
  Assert,
  ExprStmt,
  Call,
  Attribute,
  Name,
  Keyword,
  Literal,
  Tuple,
  ListExpr,
  DictExpr,
  Subscript,
  Other,
};

const char* node_kind_name(NodeKind k);

/// Concrete-syntax node. Spans are byte ranges into the parsed source;
/// `text(source)` is the exact slice. Children are in source order with
/// nested, non-overlapping spans.
///
/// Shape notes:
///   Call       children = callee, positional args..., Keyword args...
///   Keyword    name = argument name, children = { value }
///   Attribute  name = attribute segment, children = { value }
///   Subscript  children = { value, index... }
///   Assign     children = { target, value }
///   FunctionDef/ClassDef  name set, children = body statements
///   If         children = { condition, body statements... }
struct SyntaxNode {
  NodeKind kind = NodeKind::Other;
  size_t begin = 0;
  size_t end = 0;
  std::string name;  // FunctionDef/ClassDef/Attribute/Keyword
  std::vector<SyntaxNode> children;

  std::string_view text(std::string_view source) const {
    return source.substr(begin, end - begin);
  }
  bool is_leaf() const { return children.empty(); }
};

struct QualifiedName {
  std::vector<std::string> parts;  // outermost class/def first
  bool is_test = false;
  bool is_private = false;

  std::string dotted() const;
  bool empty() const { return parts.empty(); }
};

/// A logical source line: physical lines joined while brackets remain open
/// or a backslash continuation is pending. `begin/end` cover the statement's
/// tokens only (leading indentation and trailing comments excluded).
struct LogicalLine {
  size_t begin = 0;
  size_t end = 0;
  size_t first_line = 0;  // 1-based physical line numbers
  size_t last_line = 0;
  size_t indent = 0;
};

/// Splits source into logical lines. Throws ParseError on unbalanced
/// delimiters or unterminated strings.
std::vector<LogicalLine> logical_lines(std::string_view source);

/// Parses a whole file into a Module tree. Statements outside the supported
/// subset degrade to Other nodes; block statements own their indented body.
/// Throws ParseError only for unbalanced delimiters / unterminated strings.
SyntaxNode parse_module(std::string_view source);

/// Parses a single statement (one logical line, possibly with an inline
/// body). The returned node's spans index into `stmt_source`.
SyntaxNode parse_statement(std::string_view stmt_source);

/// Innermost FunctionDef/ClassDef chain containing the 1-based physical
/// line. Module level yields an empty path. `path` (optional) feeds the
/// tests-directory classification.
QualifiedName enclosing_def(const SyntaxNode& tree, std::string_view source, size_t line,
                            std::string_view path = {});

/// The FunctionDef/ClassDef nodes enclosing the 1-based physical line,
/// outermost first.
std::vector<const SyntaxNode*> enclosing_chain(const SyntaxNode& tree, std::string_view source,
                                               size_t line);

QualifiedName classify_name(std::vector<std::string> parts, std::string_view path = {});

/// Terminal callee names (last attribute segment or bare name) of all Call
/// descendants, including `node` itself.
std::set<std::string> call_names(const SyntaxNode& node, std::string_view source);

}  // namespace apimig
