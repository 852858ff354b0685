#include <doctest.h>

#include <random>

#include "apimig/apply.hpp"
#include "apimig/rule_infer.hpp"
#include "apimig/template_lang.hpp"
#include "support/pair_generator.hpp"

using namespace apimig;

namespace {

ChangePair make_pair(const std::string& before, const std::string& after,
                     const std::string& before_file = "", size_t offset = 0) {
  ChangePair p;
  p.before_text = before;
  p.after_text = after;
  p.before = parse_statement(before);
  p.after = parse_statement(after);
  p.pr_id = "test";
  p.before_file = before_file;
  p.before_offset = offset;
  p.file = "lib.py";
  return p;
}

Rule expect_rule(const std::string& match, const std::string& rewrite,
                 std::vector<Constraint> cs = {}) {
  Rule r;
  r.match = parse_template(match);
  r.rewrite = parse_template(rewrite);
  r.constraints = std::move(cs);
  return r;
}

}  // namespace

TEST_CASE("golden: read_csv squeeze pair infers the assignment-level rule") {
  std::string file =
      "import pandas as pd\n"
      "\n"
      "def read_csv(filename, comp, enc):\n"
      "    r = pd.read_csv(filename,\n"
      "                    compression=comp,\n"
      "                    encoding=enc,\n"
      "                    index_col=0,\n"
      "                    squeeze=True)\n"
      "    return r\n";
  std::string before =
      "r = pd.read_csv(filename,\n"
      "                    compression=comp,\n"
      "                    encoding=enc,\n"
      "                    index_col=0,\n"
      "                    squeeze=True)";
  std::string after =
      "r = pd.read_csv(filename,\n"
      "                    compression=comp,\n"
      "                    encoding=enc,\n"
      "                    index_col=0).squeeze()";
  size_t offset = file.find("r = pd");
  ChangePair pair = make_pair(before, after, file, offset);
  auto rule = infer_rule(pair, TypeOracle::import_heuristic());
  REQUIRE(rule.has_value());

  Rule want = expect_rule(
      ":[[a]] = :[[i]].read_csv(:[[d]], compression=:[e], encoding=:[f], index_col=:[[g]], "
      "squeeze=True)",
      ":[[a]] = :[[i]].read_csv(:[[d]], compression=:[e], encoding=:[f], "
      "index_col=:[[g]]).squeeze()",
      {{"i", ConstraintKind::TypeEquals, "pandas"}});
  CHECK(alpha_equivalent_loose(*rule, want));
  CHECK(rule->provenance.stages == std::vector<std::string>{"inferred"});

  // Keystone round trip.
  CHECK(validate_rule(*rule, pair));
}

TEST_CASE("golden: spline return pair infers the specific call rule") {
  ChangePair pair = make_pair("return signal.spline.cspline2d(image, 8.0)",
                              "return signal.cspline2d(image, 8.0)");
  auto rule = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(rule.has_value());
  Rule want = expect_rule(":[[s]].spline.cspline2d(:[[x]],:[y])", ":[[s]].cspline2d(:[[x]], :[y])");
  CHECK(alpha_equivalent_loose(*rule, want));
  CHECK(rule->constraints.empty());
  CHECK(validate_rule(*rule, pair));
}

TEST_CASE("golden: append to concat keeps shared holes and reverts pd") {
  ChangePair pair = make_pair("ser1.append(ser2)", "pd.concat([ser1, ser2])");
  auto rule = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(rule.has_value());
  Rule want = expect_rule(":[[s2]].append(:[[s1]])", "pd.concat([:[[s2]], :[[s1]]])");
  CHECK(alpha_equivalent_loose(*rule, want));
  CHECK(validate_rule(*rule, pair));
}

TEST_CASE("golden: DataFrame wrap keeps class and callee names concrete") {
  ChangePair pair = make_pair("df.append(s)", "pd.concat([df, DataFrame(s).T.infer_objects()])");
  auto rule = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(rule.has_value());
  Rule want = expect_rule(":[[a]].append(:[[b]])",
                          "pd.concat([:[[a]], DataFrame(:[[b]]).T.infer_objects()])");
  CHECK(alpha_equivalent_loose(*rule, want));
  CHECK(validate_rule(*rule, pair));
}

TEST_CASE("identical sides infer nothing") {
  ChangePair pair;
  pair.before_text = "x = f(1)";
  pair.after_text = "x = f(1)";
  pair.before = parse_statement(pair.before_text);
  pair.after = parse_statement(pair.after_text);
  CHECK_FALSE(infer_rule(pair, TypeOracle::always_unknown()).has_value());
}

TEST_CASE("both-Other pairs infer nothing") {
  ChangePair pair = make_pair("import foo", "import bar");
  CHECK_FALSE(infer_rule(pair, TypeOracle::always_unknown()).has_value());
}

TEST_CASE("shared literal arguments abstract to one hole") {
  ChangePair pair = make_pair("x = a.f(1)", "x = a.g(1)");
  auto rule = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(rule.has_value());
  Rule want = expect_rule(":[[x]] = :[[a]].f(:[[c]])", ":[[x]] = :[[a]].g(:[[c]])");
  CHECK(alpha_equivalent_loose(*rule, want));
  CHECK(validate_rule(*rule, pair));
}

TEST_CASE("changed-side-only booleans revert to concrete text") {
  ChangePair pair = make_pair("d.f(x, inplace=True)", "d.f(x)");
  auto rule = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(rule.has_value());
  std::string match = print_template(rule->match);
  CHECK(match.find("inplace=True") != std::string::npos);
  CHECK(validate_rule(*rule, pair));
}

TEST_CASE("side symmetry: match and rewrite use the same hole set") {
  std::mt19937 rng(99);
  for (int i = 0; i < 60; ++i) {
    auto sp = gen::random_pair(rng);
    if (sp.before == sp.after) continue;
    ChangePair pair = gen::to_change_pair(sp, "sym");
    auto rule = infer_rule(pair, TypeOracle::always_unknown());
    if (!rule) continue;
    std::set<std::string> mh, rh;
    for (const auto& h : rule->match.holes()) mh.insert(h.name);
    for (const auto& h : rule->rewrite.holes()) rh.insert(h.name);
    CHECK(mh == rh);
  }
}

TEST_CASE("determinism: identical pairs give identical rules") {
  ChangePair pair = make_pair("obj.run(a, b, mode='fast')", "obj.run(a, b)");
  auto r1 = infer_rule(pair, TypeOracle::always_unknown());
  auto r2 = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(r1.has_value());
  REQUIRE(r2.has_value());
  CHECK(print_rule(*r1) == print_rule(*r2));
}

TEST_CASE("round-trip property on 200 generated pairs") {
  std::mt19937 rng(20230814);
  int produced = 0, attempts = 0;
  while (produced < 200 && attempts < 2000) {
    ++attempts;
    auto sp = gen::random_pair(rng);
    if (sp.before == sp.after) continue;
    ChangePair pair = gen::to_change_pair(sp, "prop");
    auto rule = infer_rule(pair, TypeOracle::always_unknown());
    REQUIRE_MESSAGE(rule.has_value(), "pair should infer: " << sp.before << " -> " << sp.after);
    ++produced;
    bool ok = validate_rule(*rule, pair);
    if (!ok) {
      CAPTURE(sp.before);
      CAPTURE(sp.after);
      CAPTURE(print_rule(*rule));
      REQUIRE(ok);
    }
  }
  CHECK(produced == 200);
}

TEST_CASE("type guards attach only to resolvable Alnum holes") {
  // `r` is being defined by this very statement, so only `pd` resolves.
  std::string file = "import pandas as pd\nr = pd.read_csv(f)\n";
  ChangePair pair = make_pair("r = pd.read_csv(f)", "r = pd.read_table(f)", file,
                              file.find("r = pd"));
  auto rule = infer_rule(pair, TypeOracle::import_heuristic());
  REQUIRE(rule.has_value());
  REQUIRE(rule->constraints.size() == 1);
  CHECK(rule->constraints[0].type_name == "pandas");
  Hole constrained = rule->match.find_hole(rule->constraints[0].hole_name).value();
  CHECK(constrained.kind == HoleKind::Alnum);
}

TEST_CASE("type guards use propagated types for later occurrences") {
  std::string file =
      "import pandas as pd\n"
      "df = pd.read_csv(f)\n"
      "out = df.append(row)\n";
  ChangePair pair = make_pair("out = df.append(row)", "out = pd.concat([df, row])", file,
                              file.find("out = df"));
  auto rule = infer_rule(pair, TypeOracle::import_heuristic());
  REQUIRE(rule.has_value());
  bool has_df_guard = false;
  for (const auto& c : rule->constraints)
    if (c.type_name == "pandas.DataFrame") has_df_guard = true;
  CHECK(has_df_guard);
}
