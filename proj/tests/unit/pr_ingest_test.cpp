#include <doctest.h>

#include "apimig/pr_ingest.hpp"
#include "apimig/text.hpp"

using namespace apimig;

namespace {

// One-hunk unified diff between full old/new texts (naive full-file hunk).
std::string full_patch(const std::string& old_text, const std::string& new_text) {
  auto count_lines = [](const std::string& s) {
    size_t n = 0;
    for (char c : s)
      if (c == '\n') ++n;
    if (!s.empty() && s.back() != '\n') ++n;
    return n;
  };
  std::string patch = "@@ -1," + std::to_string(count_lines(old_text)) + " +1," +
                      std::to_string(count_lines(new_text)) + " @@\n";
  size_t pos = 0;
  while (pos < old_text.size()) {
    size_t nl = old_text.find('\n', pos);
    std::string line = old_text.substr(pos, (nl == std::string::npos ? old_text.size() : nl) - pos);
    patch += "-" + line + "\n";
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  pos = 0;
  while (pos < new_text.size()) {
    size_t nl = new_text.find('\n', pos);
    std::string line = new_text.substr(pos, (nl == std::string::npos ? new_text.size() : nl) - pos);
    patch += "+" + line + "\n";
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return patch;
}

}  // namespace

TEST_CASE("parse_unified_diff: single hunk with one removed/added line") {
  std::string diff =
      "--- a/lib.py\n"
      "+++ b/lib.py\n"
      "@@ -4,3 +4,3 @@\n"
      " context\n"
      "-r = pd.read_csv(f, squeeze=True)\n"
      "+r = pd.read_csv(f).squeeze()\n"
      " more\n";
  auto hunks = parse_unified_diff(diff);
  REQUIRE(hunks.size() == 1);
  CHECK(hunks[0].old_start == 4);
  CHECK(hunks[0].new_start == 4);
  int removed = 0, added = 0;
  for (const auto& l : hunks[0].lines) {
    if (l.tag == '-') ++removed;
    if (l.tag == '+') ++added;
  }
  CHECK(removed == 1);
  CHECK(added == 1);
}

TEST_CASE("parse_unified_diff: empty and malformed") {
  CHECK(parse_unified_diff("").empty());
  CHECK_THROWS_AS(parse_unified_diff("@@ nonsense @@\n"), ParseError);
}

TEST_CASE("apply_hunks reconstructs the new file byte-exactly") {
  std::string old_text =
      "a = 1\n"
      "b = 2\n"
      "c = 3\n"
      "d = 4\n"
      "e = 5\n"
      "f = 6\n"
      "g = 7\n"
      "h = 8\n"
      "i = 9\n";
  std::string diff =
      "@@ -1,3 +1,3 @@\n"
      " a = 1\n"
      "-b = 2\n"
      "+b = 20\n"
      " c = 3\n"
      "@@ -5,2 +5,3 @@\n"
      " e = 5\n"
      "+e2 = 55\n"
      " f = 6\n"
      "@@ -8,2 +9,1 @@\n"
      "-h = 8\n"
      " i = 9\n";
  std::string want =
      "a = 1\n"
      "b = 20\n"
      "c = 3\n"
      "d = 4\n"
      "e = 5\n"
      "e2 = 55\n"
      "f = 6\n"
      "g = 7\n"
      "i = 9\n";
  CHECK(apply_hunks(old_text, parse_unified_diff(diff)) == want);
}

TEST_CASE("pure-insertion hunks anchor after the stated old line") {
  std::string old_text = "a\nb\nc\n";
  std::string diff = "@@ -2,0 +3,1 @@\n+inserted\n";
  CHECK(apply_hunks(old_text, parse_unified_diff(diff)) == "a\nb\ninserted\nc\n");
}

TEST_CASE("file_contents reconstructs the missing side from the patch") {
  FileChange fc;
  fc.path = "lib.py";
  fc.old_content = "x = 1\ny = 2\n";
  fc.patch = "@@ -1,2 +1,2 @@\n x = 1\n-y = 2\n+y = 3\n";
  auto both = file_contents(fc);
  REQUIRE(both.has_value());
  CHECK(both->second == "x = 1\ny = 3\n");

  FileChange reverse;
  reverse.path = "lib.py";
  reverse.new_content = "x = 1\ny = 3\n";
  reverse.patch = fc.patch;
  auto rboth = file_contents(reverse);
  REQUIRE(rboth.has_value());
  CHECK(rboth->first == "x = 1\ny = 2\n");

  FileChange neither;
  neither.patch = fc.patch;
  CHECK(file_contents(neither).has_value());  // context lines reconstruct both sides
}

TEST_CASE("load_pr_json parses the documented schema") {
  PullRequest pr = load_pr_json(R"({
    "id": "pandas#43242", "url": "https://example/pr/43242",
    "title": "Deprecate squeeze", "description": "...",
    "discussion": ["comment one"],
    "files": [{"path": "pandas/io/parsers.py", "old_content": "x = 1\n",
               "new_content": null, "patch": "@@ -1,1 +1,1 @@\n-x = 1\n+x = 2\n"}]})");
  CHECK(pr.id == "pandas#43242");
  CHECK(pr.discussion.size() == 1);
  REQUIRE(pr.files.size() == 1);
  CHECK(pr.files[0].old_content.has_value());
  CHECK_FALSE(pr.files[0].new_content.has_value());
}

TEST_CASE("affected_apis keeps public defs, drops tests and private names") {
  std::string old_src =
      "def append(self, other):\n"
      "    return _concat(self, other)\n"
      "\n"
      "def _private_helper(x):\n"
      "    return x\n"
      "\n"
      "class TestThing:\n"
      "    def test_append(self):\n"
      "        y = 1\n";
  std::string new_src =
      "def append(self, other):\n"
      "    return _concat(self, other, copy=False)\n"
      "\n"
      "def _private_helper(x):\n"
      "    return x + 1\n"
      "\n"
      "class TestThing:\n"
      "    def test_append(self):\n"
      "        y = 2\n";
  PullRequest pr;
  pr.id = "pandas#1";
  FileChange fc;
  fc.path = "pandas/core/frame.py";
  fc.old_content = old_src;
  fc.new_content = new_src;
  fc.patch =
      "@@ -2,1 +2,1 @@\n"
      "-    return _concat(self, other)\n"
      "+    return _concat(self, other, copy=False)\n"
      "@@ -5,1 +5,1 @@\n"
      "-    return x\n"
      "+    return x + 1\n"
      "@@ -9,1 +9,1 @@\n"
      "-        y = 1\n"
      "+        y = 2\n";
  pr.files.push_back(fc);
  auto apis = affected_apis(pr);
  CHECK(apis == std::set<std::string>{"append"});
}

TEST_CASE("PR touching only private helpers yields no apis") {
  PullRequest pr;
  pr.id = "x#2";
  FileChange fc;
  fc.path = "lib/mod.py";
  fc.old_content = "def _private_helper(x):\n    return x\n";
  fc.new_content = "def _private_helper(x):\n    return x + 1\n";
  fc.patch = "@@ -2,1 +2,1 @@\n-    return x\n+    return x + 1\n";
  pr.files.push_back(fc);
  CHECK(affected_apis(pr).empty());
}

TEST_CASE("relevant_change_pairs keeps api-using diffs even in tests") {
  PullRequest pr;
  pr.id = "pandas#44539";
  FileChange fc;
  fc.path = "pandas/tests/test_frame.py";
  fc.old_content =
      "def test_datetimeindex(self):\n"
      "    result = ser1.append(ser2)\n";
  fc.new_content =
      "def test_datetimeindex(self):\n"
      "    result = pd.concat([ser1, ser2])\n";
  fc.patch =
      "@@ -2,1 +2,1 @@\n"
      "-    result = ser1.append(ser2)\n"
      "+    result = pd.concat([ser1, ser2])\n";
  pr.files.push_back(fc);

  auto pairs = relevant_change_pairs(pr, {"append", "concat"});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].before_text == "result = ser1.append(ser2)");
  CHECK(pairs[0].after_text == "result = pd.concat([ser1, ser2])");
  CHECK(pairs[0].pr_id == "pandas#44539");

  CHECK(relevant_change_pairs(pr, {}).empty());
  CHECK(relevant_change_pairs(pr, {"unrelated"}).empty());
}

TEST_CASE("alignment pairs index-wise on equal counts, by overlap otherwise") {
  auto idx = align_statements({"a = f(1)", "b = g(2)"}, {"a = f(9)", "b = g(8)"});
  CHECK(idx == std::vector<std::pair<size_t, size_t>>{{0, 0}, {1, 1}});

  auto ov = align_statements({"x = h.one(alpha)", "y = h.two(beta)"},
                             {"y = h.two(beta, extra)", "z = other()", "x = h.one(alpha, extra)"});
  // Greedy token overlap pairs one->one and two->two despite reordering.
  bool has_one = false, has_two = false;
  for (auto [i, j] : ov) {
    if (i == 0 && j == 2) has_one = true;
    if (i == 1 && j == 0) has_two = true;
  }
  CHECK(has_one);
  CHECK(has_two);
}

TEST_CASE("multi-line statements pair through logical lines") {
  std::string old_src =
      "def read(filename):\n"
      "    r = pd.read_csv(filename,\n"
      "                    squeeze=True)\n"
      "    return r\n";
  std::string new_src =
      "def read(filename):\n"
      "    r = pd.read_csv(filename).squeeze()\n"
      "    return r\n";
  PullRequest pr;
  pr.id = "pandas#43242";
  FileChange fc;
  fc.path = "pandas/io/parsers.py";
  fc.old_content = old_src;
  fc.new_content = new_src;
  fc.patch =
      "@@ -2,2 +2,1 @@\n"
      "-    r = pd.read_csv(filename,\n"
      "-                    squeeze=True)\n"
      "+    r = pd.read_csv(filename).squeeze()\n";
  pr.files.push_back(fc);
  auto pairs = relevant_change_pairs(pr, {"read_csv", "read"});
  REQUIRE(pairs.size() == 1);
  CHECK(normalize_ws(pairs[0].before_text) == "r = pd.read_csv(filename, squeeze=True)");
  CHECK(pairs[0].before_offset == old_src.find("r = pd"));
}

TEST_CASE("round trip: patch from full texts rebuilds new content") {
  std::string old_text = "a = 1\nb = 2\nc = 3\n";
  std::string new_text = "a = 1\nB = 9\nc = 3\nd = 4\n";
  auto hunks = parse_unified_diff(full_patch(old_text, new_text));
  CHECK(apply_hunks(old_text, hunks) == new_text);
}
