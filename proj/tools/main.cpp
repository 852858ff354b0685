#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apimig/apply.hpp"
#include "apimig/catalog.hpp"
#include "apimig/example_gen.hpp"
#include "apimig/matcher.hpp"
#include "apimig/pr_ingest.hpp"
#include "apimig/rule_filter.hpp"
#include "apimig/rule_generalize.hpp"
#include "apimig/rule_infer.hpp"
#include "apimig/text.hpp"
#include "apimig/type_oracle.hpp"

namespace {

using namespace apimig;

struct OracleArgs {
  std::string backend = "imports";  // annotations | imports | none
  std::string types_file;
};

void add_oracle_flags(CLI::App* cmd, OracleArgs& args) {
  cmd->add_option("--type-backend", args.backend, "Type resolution backend")
      ->check(CLI::IsMember({"annotations", "imports", "none"}));
  cmd->add_option("--types", args.types_file, "Annotation map JSON file");
}

TypeOracle build_oracle(const OracleArgs& args) {
  if (args.backend == "none") return TypeOracle::always_unknown();
  if (args.backend == "annotations") {
    if (args.types_file.empty())
      throw std::runtime_error("--type-backend annotations requires --types <file.json>");
    return TypeOracle::annotation_map_from_json(read_file(args.types_file));
  }
  if (!args.types_file.empty())
    return TypeOracle::composite({TypeOracle::annotation_map_from_json(read_file(args.types_file)),
                                  TypeOracle::import_heuristic()});
  return TypeOracle::import_heuristic();
}

int cmd_infer(const std::string& pr_file, const std::string& out_dir, const OracleArgs& oracle_args,
              bool also_generalize, bool with_variants, bool filter) {
  PullRequest pr = load_pr_file(pr_file);
  TypeOracle oracle = build_oracle(oracle_args);
  auto apis = affected_apis(pr);
  auto pairs = relevant_change_pairs(pr, apis);
  std::vector<Rule> rules;
  for (const auto& pair : pairs) {
    auto rule = infer_rule(pair, oracle);
    if (rule) rules.push_back(std::move(*rule));
  }
  if (also_generalize) {
    std::vector<Rule> generalized;
    for (const auto& r : rules) {
      generalized.push_back(r);
      generalized.push_back(generalize(r));
      if (with_variants) {
        auto vs = variants(generalized.back());
        generalized.insert(generalized.end(), vs.begin(), vs.end());
      }
    }
    rules = std::move(generalized);
  }
  if (filter) {
    FilterReport report = run_filters(rules, apis);
    std::vector<Rule> kept = report.kept;
    save_catalog(out_dir, kept, &report);
    std::cerr << "apimig: " << kept.size() << " rule(s) kept, " << report.rejected.size()
              << " rejected\n";
    return 0;
  }
  save_catalog(out_dir, rules);
  std::cerr << "apimig: wrote " << rules.size() << " rule(s) to " << out_dir << "\n";
  return 0;
}

int cmd_generalize(const std::string& rules_dir, const std::string& out_dir, bool with_variants) {
  auto rules = load_catalog(rules_dir);
  std::vector<Rule> out;
  for (const auto& r : rules) {
    Rule g = generalize(r);
    g.id.clear();
    out.push_back(g);
    if (with_variants) {
      for (auto& v : variants(g)) {
        v.id.clear();
        out.push_back(std::move(v));
      }
    }
  }
  save_catalog(out_dir, out);
  std::cerr << "apimig: generalized " << rules.size() << " rule(s) into " << out.size() << "\n";
  return 0;
}

int cmd_filter(const std::string& rules_dir, const std::string& out_dir,
               const std::string& pr_file) {
  auto rules = load_catalog(rules_dir);
  std::set<std::string> apis;
  if (!pr_file.empty()) apis = affected_apis(load_pr_file(pr_file));
  FilterReport report = run_filters(rules, apis);
  std::vector<Rule> kept = report.kept;
  for (auto& r : kept) r.id.clear();
  save_catalog(out_dir, kept, &report);
  std::cerr << "apimig: kept " << kept.size() << ", rejected " << report.rejected.size() << "\n";
  return 0;
}

int cmd_gen_examples(const std::string& pr_file, const std::string& provider_kind,
                     const std::string& fixtures, const std::string& endpoint,
                     const std::string& endpoint_path, int n, double temperature,
                     const std::string& interpreter, int timeout, const std::string& out_dir,
                     const std::string& save_examples, const OracleArgs& oracle_args) {
  PullRequest pr = load_pr_file(pr_file);
  GenConfig cfg;
  cfg.n = n;
  cfg.temperature = temperature;
  cfg.interpreter = interpreter;
  cfg.test_timeout_s = timeout;

  std::unique_ptr<GenerationProvider> provider;
  if (provider_kind == "mock") {
    provider = make_mock_provider(fixtures, pr.id);
  } else {
    const char* key = std::getenv("APIMIG_API_KEY");
    provider = make_http_provider(endpoint, endpoint_path, cfg.model, cfg.temperature,
                                  key ? key : "");
  }
  ExampleRun run = generate_transition_examples(pr, *provider, cfg);
  auto survivors = run.survivors();
  std::cerr << "apimig: " << survivors.size() << " of " << run.all.size()
            << " example(s) survived validation\n";
  if (!save_examples.empty()) {
    std::filesystem::create_directories(save_examples);
    for (const auto& ex : survivors) {
      std::string stem = ex.id;
      for (auto& c : stem)
        if (c == '/' || c == '#') c = '_';
      write_file(save_examples + "/" + stem + "_old.py", ex.e_old);
      write_file(save_examples + "/" + stem + "_new.py", ex.e_new);
    }
  }
  if (!out_dir.empty()) {
    TypeOracle oracle = build_oracle(oracle_args);
    auto pairs = examples_to_pairs(survivors, pr.id);
    std::vector<Rule> rules;
    for (const auto& pair : pairs) {
      auto rule = infer_rule(pair, oracle);
      if (rule) rules.push_back(std::move(*rule));
    }
    save_catalog(out_dir, rules);
    std::cerr << "apimig: wrote " << rules.size() << " rule(s) to " << out_dir << "\n";
  }
  return 0;
}

int cmd_apply(const std::string& rules_dir, const std::string& root, bool dry_run,
              const std::vector<std::string>& globs, const std::string& report_file,
              const OracleArgs& oracle_args) {
  auto rules = load_catalog(rules_dir);
  TypeOracle oracle = build_oracle(oracle_args);
  ApplyOptions opts;
  opts.dry_run = dry_run;
  if (!globs.empty()) opts.include_globs = globs;
  ApplyReport report = apply_ruleset(rules, root, oracle, opts);
  for (const auto& d : report.diffs) std::cout << d;
  if (report_file.empty())
    std::cout << report.to_json() << "\n";
  else
    write_file(report_file, report.to_json() + "\n");
  if (report.fatal_error) {
    std::cerr << "apimig: " << *report.fatal_error << "\n";
    return 1;
  }
  return 0;
}

int cmd_match(const std::string& rules_dir, const std::string& template_text,
              const std::string& path) {
  std::vector<Template> templates;
  std::vector<std::string> labels;
  if (!template_text.empty()) {
    templates.push_back(parse_template(template_text));
    labels.push_back("<template>");
  }
  if (!rules_dir.empty()) {
    for (const auto& r : load_catalog(rules_dir)) {
      templates.push_back(r.match);
      labels.push_back(r.id);
    }
  }
  if (templates.empty()) throw std::runtime_error("match needs --template or --rules");
  std::string source = read_file(path);
  size_t total = 0;
  for (size_t i = 0; i < templates.size(); ++i) {
    auto matches = match_all(templates[i], source);
    total += matches.size();
    for (const auto& m : matches) {
      std::cout << path << ":" << m.begin << "-" << m.end << " " << labels[i];
      for (const auto& [name, binding] : m.bindings) std::cout << " " << name << "=" << binding.text;
      std::cout << "\n";
    }
  }
  std::cerr << "apimig: " << total << " match(es)\n";
  return 0;
}

int cmd_validate(const std::string& rules_dir) {
  auto rules = load_catalog(rules_dir);
  size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& r : rules) {
    if (r.provenance.before_text.empty()) {
      std::cout << "SKIP " << r.id << " (no provenance example)\n";
      ++skipped;
      continue;
    }
    bool ok = validate_rule_text(r, r.provenance.before_text, r.provenance.after_text);
    std::cout << (ok ? "PASS " : "FAIL ") << r.id << "\n";
    ok ? ++passed : ++failed;
  }
  std::cerr << "apimig: " << passed << " passed, " << failed << " failed, " << skipped
            << " skipped\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"apimig: mines structural API-migration rules from pull requests and applies "
               "them to client code"};
  app.require_subcommand(1);

  // infer
  auto* infer = app.add_subcommand("infer", "Infer rules from a PR's code diffs");
  std::string infer_pr, infer_out = "rules";
  bool infer_generalize = false, infer_variants = false, infer_filter = false;
  OracleArgs infer_oracle;
  infer->add_option("--pr", infer_pr, "PR JSON file")->required();
  infer->add_option("--out", infer_out, "Output rule catalog directory");
  infer->add_flag("--generalize", infer_generalize, "Also emit generalized rules");
  infer->add_flag("--variants", infer_variants, "Also emit variants (with --generalize)");
  infer->add_flag("--filter", infer_filter, "Apply the quality filters");
  add_oracle_flags(infer, infer_oracle);

  // generalize
  auto* gen = app.add_subcommand("generalize", "Generalize a rule catalog");
  std::string gen_rules, gen_out = "rules_gen";
  bool gen_variants = false;
  gen->add_option("--rules", gen_rules, "Input catalog directory")->required();
  gen->add_option("--out", gen_out, "Output catalog directory");
  gen->add_flag("--variants", gen_variants, "Also emit variant rules");

  // filter
  auto* filt = app.add_subcommand("filter", "Filter a rule catalog");
  std::string filt_rules, filt_out = "rules_filtered", filt_pr;
  filt->add_option("--rules", filt_rules, "Input catalog directory")->required();
  filt->add_option("--out", filt_out, "Output catalog directory");
  filt->add_option("--pr", filt_pr, "PR JSON file (affected API names)");

  // gen-examples
  auto* ge = app.add_subcommand("gen-examples", "Generate and validate transition examples");
  std::string ge_pr, ge_provider = "mock", ge_fixtures = "fixtures", ge_out, ge_save;
  std::string ge_endpoint = "http://localhost:8080", ge_path = "/complete";
  std::string ge_interp = "python3";
  int ge_n = 5, ge_timeout = 30;
  double ge_temp = 0.2;
  OracleArgs ge_oracle;
  ge->add_option("--pr", ge_pr, "PR JSON file")->required();
  ge->add_option("--provider", ge_provider, "Provider backend")
      ->check(CLI::IsMember({"http", "mock"}));
  ge->add_option("--fixtures", ge_fixtures, "Mock fixture directory");
  ge->add_option("--endpoint", ge_endpoint, "HTTP provider host:port");
  ge->add_option("--endpoint-path", ge_path, "HTTP provider request path");
  ge->add_option("--n", ge_n, "Sample count");
  ge->add_option("--temperature", ge_temp, "Sampling temperature");
  ge->add_option("--interpreter", ge_interp, "Test interpreter command");
  ge->add_option("--timeout", ge_timeout, "Per-test timeout (seconds)");
  ge->add_option("--out", ge_out, "Infer rules from survivors into this catalog");
  ge->add_option("--save-examples", ge_save, "Write surviving example sources here");
  add_oracle_flags(ge, ge_oracle);

  // apply
  auto* ap = app.add_subcommand("apply", "Apply a rule catalog to a codebase");
  std::string ap_rules, ap_root, ap_report;
  bool ap_dry = false;
  std::vector<std::string> ap_globs;
  OracleArgs ap_oracle;
  ap->add_option("--rules", ap_rules, "Rule catalog directory")->required();
  ap->add_option("root", ap_root, "Codebase root (or single file)")->required();
  ap->add_flag("--dry-run", ap_dry, "Print unified diffs instead of writing");
  ap->add_option("--include", ap_globs, "Include globs (default *.py)");
  ap->add_option("--report", ap_report, "Write the JSON report to a file");
  add_oracle_flags(ap, ap_oracle);

  // match
  auto* mt = app.add_subcommand("match", "Match templates against a file");
  std::string mt_rules, mt_template, mt_path;
  mt->add_option("--rules", mt_rules, "Rule catalog directory");
  mt->add_option("--template", mt_template, "Inline match template");
  mt->add_option("path", mt_path, "Source file")->required();

  // validate
  auto* va = app.add_subcommand("validate", "Validate catalog rules against their examples");
  std::string va_rules;
  va->add_option("--rules", va_rules, "Rule catalog directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(infer))
      return cmd_infer(infer_pr, infer_out, infer_oracle, infer_generalize, infer_variants,
                       infer_filter);
    if (app.got_subcommand(gen)) return cmd_generalize(gen_rules, gen_out, gen_variants);
    if (app.got_subcommand(filt)) return cmd_filter(filt_rules, filt_out, filt_pr);
    if (app.got_subcommand(ge))
      return cmd_gen_examples(ge_pr, ge_provider, ge_fixtures, ge_endpoint, ge_path, ge_n, ge_temp,
                              ge_interp, ge_timeout, ge_out, ge_save, ge_oracle);
    if (app.got_subcommand(ap))
      return cmd_apply(ap_rules, ap_root, ap_dry, ap_globs, ap_report, ap_oracle);
    if (app.got_subcommand(mt)) return cmd_match(mt_rules, mt_template, mt_path);
    if (app.got_subcommand(va)) return cmd_validate(va_rules);
  } catch (const std::exception& e) {
    std::cerr << "apimig: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
