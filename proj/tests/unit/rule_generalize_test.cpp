#include <doctest.h>

#include "apimig/apply.hpp"
#include "apimig/matcher.hpp"
#include "apimig/rule_generalize.hpp"
#include "apimig/rule_infer.hpp"
#include "apimig/srcparse.hpp"

using namespace apimig;

namespace {

Rule make_rule(const std::string& match, const std::string& rewrite,
               std::vector<Constraint> cs = {}) {
  Rule r;
  r.match = parse_template(match);
  r.rewrite = parse_template(rewrite);
  r.constraints = std::move(cs);
  r.provenance.pr_id = "test";
  r.provenance.stages = {"inferred"};
  return r;
}

Rule golden_squeeze_rule() {
  return make_rule(
      ":[[a]] = :[[i]].read_csv(:[[d]], compression=:[e], encoding=:[f], index_col=:[[g]], "
      "squeeze=True)",
      ":[[a]] = :[[i]].read_csv(:[[d]], compression=:[e], encoding=:[f], "
      "index_col=:[[g]]).squeeze()",
      {{"i", ConstraintKind::TypeEquals, "pandas"}});
}

}  // namespace

TEST_CASE("remove_common_context strips assignment targets when unused") {
  Rule r = golden_squeeze_rule();
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  auto [n1, n2] = remove_common_context(before, after);
  CHECK(n1->kind == NodeKind::Call);
  CHECK(n2->kind == NodeKind::Call);
}

TEST_CASE("remove_common_context unwraps returns") {
  Rule r = make_rule("return f(:[[x]])", "return g(:[[x]])");
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  auto [n1, n2] = remove_common_context(before, after);
  CHECK(n1->kind == NodeKind::Call);
  CHECK(n2->kind == NodeKind::Call);
  CHECK(std::string(n1->text(before.rendered)).find("f(") == 0);
}

TEST_CASE("assignment target kept when the hole recurs on the rewrite side") {
  Rule r = make_rule(":[[d]].set_index(:[[k]], inplace=True)",
                     ":[[d]] = :[[d]].set_index(:[[k]])");
  // As inferred: before is an expression statement, after an assignment;
  // kinds differ, nothing unwraps, and the target must survive.
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  auto [n1, n2] = remove_common_context(before, after);
  CHECK(n2->kind == NodeKind::Assign);

  Rule g = generalize(r);
  std::string rewrite = print_template(g.rewrite);
  CHECK(rewrite.find("=") != std::string::npos);  // target still there
}

TEST_CASE("assignment with identical targets on both sides unwraps") {
  Rule r = make_rule(":[[a]] = f(:[[x]])", ":[[a]] = g(:[[x]])");
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  auto [n1, n2] = remove_common_context(before, after);
  CHECK(n1->kind == NodeKind::Call);
  CHECK(n2->kind == NodeKind::Call);
}

TEST_CASE("get_call_pairs pairs by callee name through the Hungarian assignment") {
  Rule r = golden_squeeze_rule();
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  auto [n1, n2] = remove_common_context(before, after);
  auto pairs = get_call_pairs(n1, n2, before, after);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].cost == doctest::Approx(0.0));
  CHECK(std::string(pairs[0].before_call->text(before.rendered)).find("read_csv") !=
        std::string::npos);
}

TEST_CASE("get_call_pairs: no calls yields no pairs") {
  Rule r = make_rule(":[[a]] = :[[b]]", ":[[a]] = :[[b]] ");
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  CHECK(get_call_pairs(&before.root, &after.root, before, after).empty());
}

TEST_CASE("crossed call names pair by name, not position") {
  Rule r = make_rule("a = one(p) + two(q)", "b = two(q) + one(p)");
  TemplateTree before = template_to_tree(r.match);
  TemplateTree after = template_to_tree(r.rewrite);
  auto pairs = get_call_pairs(&before.root, &after.root, before, after);
  REQUIRE(pairs.size() == 2);
  for (const auto& p : pairs) {
    std::string b(p.before_call->text(before.rendered));
    std::string a(p.after_call->text(after.rendered));
    CHECK(b.substr(0, 3) == a.substr(0, 3));  // one<->one, two<->two
  }
}

TEST_CASE("golden: generalize the squeeze rule to the args form") {
  Rule g = generalize(golden_squeeze_rule());
  CHECK(print_template(g.match) == ":[[i]].read_csv(:[gen_args_0], squeeze=True)");
  CHECK(print_template(g.rewrite) == ":[[i]].read_csv(:[gen_args_0]).squeeze()");
  REQUIRE(g.constraints.size() == 1);
  CHECK(g.constraints[0].hole_name == "i");
  CHECK(g.constraints[0].type_name == "pandas");
  CHECK(g.provenance.has_stage("generalized"));
}

TEST_CASE("golden: generalize the spline rule (Spec to Gen)") {
  Rule spec = make_rule(":[[s]].spline.cspline2d(:[[x]], :[y])", ":[[s]].cspline2d(:[[x]], :[y])");
  Rule g = generalize(spec);
  CHECK(print_template(g.match) == ":[[s]].spline.cspline2d(:[gen_args_0])");
  CHECK(print_template(g.rewrite) == ":[[s]].cspline2d(:[gen_args_0])");
}

TEST_CASE("single shared argument stays specific (run length 1)") {
  Rule r = make_rule("f(:[[x]], old=1)", "f(:[[x]], new=1)");
  Rule g = generalize(r);
  CHECK(print_template(g.match) == "f(:[[x]], old=1)");
  CHECK(print_template(g.rewrite) == "f(:[[x]], new=1)");
}

TEST_CASE("rule with no calls and no common context is unchanged") {
  Rule r = make_rule(":[a] - :[b]", ":[b] - :[a]");
  Rule g = generalize(r);
  CHECK(print_template(g.match) == print_template(r.match));
  CHECK(print_template(g.rewrite) == print_template(r.rewrite));
  CHECK(g.provenance.has_stage("generalized"));
}

TEST_CASE("constraints on holes swallowed by context removal are dropped") {
  Rule r = make_rule(":[[a]] = f(:[[x]], :[[y]])", ":[[a]] = g(:[[x]], :[[y]])",
                     {{"a", ConstraintKind::TypeEquals, "pandas.DataFrame"},
                      {"x", ConstraintKind::TypeEquals, "str"}});
  Rule g = generalize(r);
  // `a` vanished with the assignment target; x/y merged into one args hole.
  for (const auto& c : g.constraints) CHECK(c.hole_name != "a");
}

TEST_CASE("rewrite keyword arguments move to the end") {
  Rule r = make_rule("f(:[[x]], k=1, :[[y]])", "f(:[[x]], k=2, :[[y]])");
  Rule g = generalize(r);
  std::string rw = print_template(g.rewrite);
  size_t kw = rw.find("k=2");
  size_t y = rw.find(":[[y]]");
  REQUIRE(kw != std::string::npos);
  REQUIRE(y != std::string::npos);
  CHECK(y < kw);
}

TEST_CASE("unparseable templates survive generalize with a warning") {
  // Unbalanced delimiters cannot re-parse as a statement.
  Rule r = make_rule("f(:[x]", "g(:[x]");
  Rule g = generalize(r);
  CHECK(print_template(g.match) == print_template(r.match));
  CHECK_FALSE(g.provenance.warnings.empty());
  CHECK_FALSE(g.provenance.has_stage("generalized"));
}

TEST_CASE("block-wrapper templates pass through generalize unchanged") {
  Rule r = make_rule("try:\n    :[x]", "except:\n    :[x]");
  Rule g = generalize(r);
  CHECK(print_template(g.match) == print_template(r.match));
  CHECK(print_template(g.rewrite) == print_template(r.rewrite));
}

TEST_CASE("fidelity: the generalized rule still reproduces the originating edit") {
  ChangePair pair;
  pair.before_text =
      "r = pd.read_csv(filename, compression=comp, encoding=enc, index_col=0, squeeze=True)";
  pair.after_text =
      "r = pd.read_csv(filename, compression=comp, encoding=enc, index_col=0).squeeze()";
  pair.before = parse_statement(pair.before_text);
  pair.after = parse_statement(pair.after_text);
  pair.pr_id = "fid";
  auto rule = infer_rule(pair, TypeOracle::always_unknown());
  REQUIRE(rule.has_value());
  Rule g = generalize(*rule);
  CHECK(validate_rule(g, pair));  // context removal never changes the induced edit
}

TEST_CASE("monotonicity on the golden corpus snippet") {
  Rule spec = golden_squeeze_rule();
  Rule g = generalize(spec);
  std::string site =
      "out = pd.read_csv(path, compression=c, encoding=e, index_col=0, squeeze=True)";
  CHECK(match_all(spec.match, site).size() == 1);
  CHECK(match_all(g.match, site).size() == 1);
  std::string widened = "pd.read_csv(path, squeeze=True)";
  CHECK(match_all(spec.match, widened).empty());
  CHECK(match_all(g.match, widened).size() == 1);
}

TEST_CASE("variants insert args holes around concrete keywords") {
  Rule g = generalize(golden_squeeze_rule());
  auto vs = variants(g);
  REQUIRE(vs.size() == 1);
  const Rule& v = vs[0];
  CHECK(v.provenance.has_stage("variant"));
  CHECK(print_template(v.match) == ":[[i]].read_csv(:[gen_args_0], squeeze=True, :[args0])");
  CHECK(print_template(v.rewrite) == ":[[i]].read_csv(:[gen_args_0], :[args0]).squeeze()");

  // The variant matches extra trailing arguments; the base does not.
  std::string src = "r = pd.read_csv(f, squeeze=True, dtype=str)";
  CHECK(match_all(g.match, src).empty());
  auto ms = match_all(v.match, src);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].bindings.at("args0").text == "dtype=str");
}

TEST_CASE("variant of a keyword-only call inserts holes on both sides") {
  Rule r = make_rule(":[[i]].read_csv(squeeze=True)", ":[[i]].read_csv().squeeze()");
  auto vs = variants(r);
  REQUIRE(vs.size() == 1);
  CHECK(print_template(vs[0].match) == ":[[i]].read_csv(:[args0], squeeze=True, :[args1])");
}

TEST_CASE("rules without keyword arguments have no variants") {
  Rule r = make_rule("f(:[args])", "g(:[args])");
  CHECK(variants(r).empty());
}
