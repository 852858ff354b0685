#include <doctest.h>

#include <filesystem>

#include "apimig/catalog.hpp"
#include "apimig/text.hpp"

using namespace apimig;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    char tmpl[] = "/tmp/apimig_catalog_XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Rule sample_rule(const std::string& pr) {
  Rule r;
  r.match = parse_template(":[[x]].append(:[[y]])");
  r.rewrite = parse_template("pd.concat([:[[x]], :[[y]]])");
  r.constraints = {{"x", ConstraintKind::TypeEquals, "DataFrame"}};
  r.provenance.pr_id = pr;
  r.provenance.pr_url = "https://example/" + pr;
  r.provenance.stages = {"inferred", "generalized"};
  r.provenance.before_text = "a.append(b)";
  r.provenance.after_text = "pd.concat([a, b])";
  return r;
}

}  // namespace

TEST_CASE("catalog round trips rules, provenance, and index") {
  TempDir dir;
  std::vector<Rule> rules = {sample_rule("pandas#44539")};
  save_catalog(dir.path.string(), rules);
  CHECK(rules[0].id == "rule_000");
  CHECK(fs::exists(dir.path / "rule_000.rule"));
  CHECK(fs::exists(dir.path / "index.json"));

  auto loaded = load_catalog(dir.path.string());
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].id == "rule_000");
  CHECK(print_template(loaded[0].match) == ":[[x]].append(:[[y]])");
  CHECK(loaded[0].constraints.size() == 1);
  CHECK(loaded[0].provenance.pr_id == "pandas#44539");
  CHECK(loaded[0].provenance.stage_string() == "inferred+generalized");
  CHECK(loaded[0].provenance.before_text == "a.append(b)");

  std::string index = read_file((dir.path / "index.json").string());
  CHECK(index.find("\"rule_000\"") != std::string::npos);
  CHECK(index.find("\"stage\": \"inferred+generalized\"") != std::string::npos);
}

TEST_CASE("catalog order is file-name lexicographic") {
  TempDir dir;
  Rule a = sample_rule("p1");
  a.id = "b_second";
  Rule b = sample_rule("p1");
  b.id = "a_first";
  std::vector<Rule> rules = {a, b};
  save_catalog(dir.path.string(), rules);
  auto loaded = load_catalog(dir.path.string());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "a_first");
  CHECK(loaded[1].id == "b_second");
}

TEST_CASE("filter report lands under the rejected index key") {
  TempDir dir;
  FilterReport report;
  report.rejected.emplace_back(sample_rule("p9"), RejectReason::NoApiKeyword);
  std::vector<Rule> kept = {sample_rule("p9")};
  save_catalog(dir.path.string(), kept, &report);
  std::string index = read_file((dir.path / "index.json").string());
  CHECK(index.find("\"rejected\"") != std::string::npos);
  CHECK(index.find("no-api-keyword") != std::string::npos);
}

TEST_CASE("free-text provenance comments are tolerated") {
  Rule r = parse_rule_file_text(
      "match: f(:[a])\nrewrite: g(:[a])\n# provenance: hand written, not json\n");
  CHECK(r.provenance.pr_id.empty());
  CHECK(print_template(r.rewrite) == "g(:[a])");
}
