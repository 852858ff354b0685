#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apimig/matcher.hpp"
#include "apimig/pr_ingest.hpp"
#include "apimig/template_lang.hpp"
#include "apimig/type_oracle.hpp"

namespace apimig {

struct RuleStats {
  size_t matched = 0;
  size_t applied = 0;
  size_t skipped_unknown_type = 0;
  size_t skipped_constraint_failed = 0;
};

struct ApplyReport {
  std::map<std::string, size_t> file_edits;      // relative path -> edit count
  std::map<std::string, RuleStats> rule_stats;   // rule id -> stats
  std::vector<std::string> unreadable;
  std::vector<std::string> diffs;                // dry-run unified diffs
  std::optional<std::string> fatal_error;        // write failure: partial report

  std::string to_json() const;
};

struct ApplyOptions {
  bool dry_run = false;
  std::vector<std::string> include_globs = {"*.py"};
  bool permissive_constraints = false;
};

/// Applies each catalog rule once, in catalog order, to every file under
/// `root` matching the include globs. Dry-run collects unified diffs
/// instead of writing.
ApplyReport apply_ruleset(const std::vector<Rule>& catalog, const std::string& root,
                          const TypeOracle& oracle, const ApplyOptions& opts = {});

/// Round-trip check: the rule applied to its originating before-statement
/// yields the after-statement, modulo elastic whitespace.
bool validate_rule(const Rule& rule, const ChangePair& pair);
bool validate_rule_text(const Rule& rule, const std::string& before, const std::string& after);

/// Minimal `*` / `?` glob (a `*` also crosses directory separators).
bool glob_match(std::string_view pattern, std::string_view path);

/// Line-oriented unified diff of two buffers, `---/+++` headers included.
std::string unified_diff(std::string_view old_text, std::string_view new_text,
                         const std::string& path);

}  // namespace apimig
