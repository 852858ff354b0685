#include <doctest.h>

#include <random>

#include "apimig/srcparse.hpp"

using namespace apimig;

namespace {

const SyntaxNode* find_kind(const SyntaxNode& n, NodeKind k) {
  if (n.kind == k) return &n;
  for (const auto& c : n.children)
    if (const SyntaxNode* r = find_kind(c, k)) return r;
  return nullptr;
}

void collect_leaves(const SyntaxNode& n, std::vector<const SyntaxNode*>& out) {
  if (n.children.empty() && n.kind != NodeKind::Module) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

}  // namespace

TEST_CASE("assignment with keyword call parses to the documented shape") {
  std::string src = "r = pd.read_csv(f, squeeze=True)";
  SyntaxNode stmt = parse_statement(src);
  REQUIRE(stmt.kind == NodeKind::Assign);
  REQUIRE(stmt.children.size() == 2);
  CHECK(stmt.children[0].kind == NodeKind::Name);
  CHECK(stmt.children[0].text(src) == "r");
  const SyntaxNode& call = stmt.children[1];
  REQUIRE(call.kind == NodeKind::Call);
  REQUIRE(call.children.size() == 3);
  CHECK(call.children[0].kind == NodeKind::Attribute);
  CHECK(call.children[0].name == "read_csv");
  CHECK(call.children[1].kind == NodeKind::Name);
  CHECK(call.children[1].text(src) == "f");
  CHECK(call.children[2].kind == NodeKind::Keyword);
  CHECK(call.children[2].name == "squeeze");
  REQUIRE(call.children[2].children.size() == 1);
  CHECK(call.children[2].children[0].kind == NodeKind::Literal);
  CHECK(call.children[2].children[0].text(src) == "True");
}

TEST_CASE("empty source yields empty module") {
  SyntaxNode mod = parse_module("");
  CHECK(mod.kind == NodeKind::Module);
  CHECK(mod.children.empty());
}

TEST_CASE("text equals source slice everywhere") {
  std::string src = "x = [1, 2]\nreturn a.b(c)[0]\n";
  SyntaxNode mod = parse_module(src);
  std::vector<const SyntaxNode*> stack = {&mod};
  while (!stack.empty()) {
    const SyntaxNode* n = stack.back();
    stack.pop_back();
    CHECK(n->begin <= n->end);
    CHECK(n->end <= src.size());
    for (const auto& c : n->children) {
      CHECK(c.begin >= n->begin);
      CHECK(c.end <= n->end);
      stack.push_back(&c);
    }
  }
}

TEST_CASE("logical lines join open brackets") {
  std::string src =
      "r = pd.read_csv(f,\n"
      "                squeeze=True)\n"
      "y = 2\n";
  auto lines = logical_lines(src);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].first_line == 1);
  CHECK(lines[0].last_line == 2);
  CHECK(lines[1].first_line == 3);
  SyntaxNode mod = parse_module(src);
  REQUIRE(mod.children.size() == 2);
  CHECK(mod.children[0].kind == NodeKind::Assign);
}

TEST_CASE("trailing comments are excluded from statement spans") {
  std::string src = "x = f(1)  # call it\n";
  SyntaxNode mod = parse_module(src);
  REQUIRE(mod.children.size() == 1);
  CHECK(mod.children[0].text(src) == "x = f(1)");
}

TEST_CASE("unbalanced delimiters raise with location") {
  CHECK_THROWS_AS(parse_module("x = f(1\n"), ParseError);
  CHECK_THROWS_AS(parse_module("x = f(1))\n"), ParseError);
  CHECK_THROWS_AS(parse_module("s = 'abc\n"), ParseError);
}

TEST_CASE("unsupported constructs degrade to Other, never reject") {
  std::string src =
      "import os\n"
      "for i in range(10):\n"
      "    x = f(i)\n"
      "y += 1\n";
  SyntaxNode mod = parse_module(src);
  REQUIRE(mod.children.size() == 3);  // import, for-block, augmented assign
  CHECK(mod.children[0].kind == NodeKind::Other);
  CHECK(mod.children[1].kind == NodeKind::Other);
  REQUIRE(mod.children[1].children.size() == 1);  // body statement owned by the block
  CHECK(mod.children[1].children[0].kind == NodeKind::Assign);
  CHECK(mod.children[2].kind == NodeKind::Other);
}

TEST_CASE("enclosing_def resolves nested class/function chains") {
  std::string src =
      "class TestDatetimeIndex:\n"
      "    def test_x(self):\n"
      "        y = f(1)\n"
      "\n"
      "def outer():\n"
      "    def inner():\n"
      "        return 1\n"
      "    return inner\n"
      "\n"
      "top = 1\n";
  SyntaxNode mod = parse_module(src);

  QualifiedName q = enclosing_def(mod, src, 3);
  CHECK(q.dotted() == "TestDatetimeIndex.test_x");
  CHECK(q.is_test);

  QualifiedName inner = enclosing_def(mod, src, 7);
  CHECK(inner.dotted() == "outer.inner");
  CHECK_FALSE(inner.is_test);

  QualifiedName top = enclosing_def(mod, src, 10);
  CHECK(top.empty());
}

TEST_CASE("classify_name flags tests and private names") {
  CHECK(classify_name({"TestFoo", "helper"}).is_test);
  CHECK(classify_name({"module", "test_thing"}).is_test);
  CHECK(classify_name({"append"}, "pandas/tests/io.py").is_test);
  CHECK(classify_name({"_private"}).is_private);
  CHECK(classify_name({"Frame", "__init__"}).is_private);
  CHECK_FALSE(classify_name({"append"}, "pandas/core/frame.py").is_test);
}

TEST_CASE("call_names extracts terminal callee names") {
  std::string src = "r = pd.read_csv(f, squeeze=True)";
  SyntaxNode stmt = parse_statement(src);
  CHECK(call_names(stmt, src) == std::set<std::string>{"read_csv"});

  std::string nested = "a.b.c(d.e(f))";
  SyntaxNode n2 = parse_statement(nested);
  CHECK(call_names(n2, nested) == std::set<std::string>{"c", "e"});

  std::string lit = "x = 42";
  SyntaxNode n3 = parse_statement(lit);
  CHECK(call_names(n3, lit).empty());
}

TEST_CASE("return/if/assert statement kinds") {
  std::string r = "return signal.spline.cspline2d(image, 8.0)";
  SyntaxNode rn = parse_statement(r);
  CHECK(rn.kind == NodeKind::Return);
  REQUIRE(rn.children.size() == 1);
  CHECK(rn.children[0].kind == NodeKind::Call);

  std::string i = "if x: y = f(1)";
  SyntaxNode in = parse_statement(i);
  CHECK(in.kind == NodeKind::If);
  REQUIRE(in.children.size() == 2);
  CHECK(in.children[1].kind == NodeKind::Assign);

  std::string a = "assert np.allclose(x, y)";
  SyntaxNode an = parse_statement(a);
  CHECK(an.kind == NodeKind::Assert);
  REQUIRE(an.children.size() == 1);
}

TEST_CASE("multi-line figure statement parses as one logical statement") {
  std::string src =
      "r = pd.read_csv(\n"
      "  filename,\n"
      "  compression=comp,\n"
      "  encoding=enc,\n"
      "  index_col=0,\n"
      "  squeeze=True)\n";
  SyntaxNode mod = parse_module(src);
  REQUIRE(mod.children.size() == 1);
  const SyntaxNode& stmt = mod.children[0];
  CHECK(stmt.kind == NodeKind::Assign);
  const SyntaxNode* call = find_kind(stmt, NodeKind::Call);
  REQUIRE(call != nullptr);
  CHECK(call->children.size() == 6);  // callee + 1 positional + 4 keywords
}

namespace {

std::string random_statement(std::mt19937& rng, int i) {
  switch (rng() % 5) {
    case 0: return "x" + std::to_string(i) + " = f" + std::to_string(i % 3) + "(a, b=1)";
    case 1: return "return g(x" + std::to_string(i) + ")";
    case 2: return "assert h(y) == " + std::to_string(i);
    case 3: return "items = [1, 2, {'k': v}]";
    default: return "obj.method(arg" + std::to_string(i) + ", kw=w)";
  }
}

void deep_equal(const SyntaxNode& a, const SyntaxNode& b) {
  CHECK(a.kind == b.kind);
  CHECK(a.name == b.name);
  CHECK(a.begin == b.begin);
  CHECK(a.end == b.end);
  REQUIRE(a.children.size() == b.children.size());
  for (size_t i = 0; i < a.children.size(); ++i) deep_equal(a.children[i], b.children[i]);
}

}  // namespace

TEST_CASE("30-statement synthetic file reparses from leaf concatenation") {
  std::mt19937 rng(7);
  std::string src;
  for (int i = 0; i < 30; ++i) src += random_statement(rng, i) + "\n";
  SyntaxNode mod = parse_module(src);
  CHECK(mod.children.size() == 30);

  // Rebuild the source from leaves plus inter-leaf gaps; the result must be
  // byte-identical and reparse to the same tree.
  std::vector<const SyntaxNode*> leaves;
  collect_leaves(mod, leaves);
  std::string rebuilt;
  size_t pos = 0;
  for (const SyntaxNode* leaf : leaves) {
    REQUIRE(leaf->begin >= pos);
    rebuilt += src.substr(pos, leaf->begin - pos);
    rebuilt += std::string(leaf->text(src));
    pos = leaf->end;
  }
  rebuilt += src.substr(pos);
  CHECK(rebuilt == src);
  SyntaxNode again = parse_module(rebuilt);
  deep_equal(mod, again);
}

TEST_CASE("random byte soup either parses or raises ParseError") {
  static const std::string alphabet = "abz01 _().,=[]{}\"'#:\n\t\\+-*<>@";
  std::mt19937 rng(123123);
  std::uniform_int_distribution<size_t> len(0, 120);
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  for (int i = 0; i < 500; ++i) {
    std::string src;
    size_t n = len(rng);
    for (size_t k = 0; k < n; ++k) src.push_back(alphabet[pick(rng)]);
    try {
      SyntaxNode mod = parse_module(src);
      CHECK(mod.end <= src.size());
    } catch (const ParseError&) {
      // unbalanced delimiters / unterminated strings are the only rejections
    }
  }
}

TEST_CASE("string prefixes and triple quotes lex as single literals") {
  std::string src = "s = r\"raw\"\nd = '''multi\nline'''\n";
  SyntaxNode mod = parse_module(src);
  REQUIRE(mod.children.size() == 2);
  CHECK(mod.children[0].kind == NodeKind::Assign);
  CHECK(mod.children[1].kind == NodeKind::Assign);
  CHECK(mod.children[1].children[1].kind == NodeKind::Literal);
}
