#pragma once

#include <string>
#include <vector>

#include "apimig/rule_filter.hpp"
#include "apimig/template_lang.hpp"

namespace apimig {

/// A directory of `*.rule` files plus an index.json mapping rule id ->
/// {file, pr_url, stage, example_ids}. Rule order is file-name
/// lexicographic. Provenance rides in `# provenance:` comment lines of the
/// rule files (free text to the rule parser, JSON to the catalog).
std::vector<Rule> load_catalog(const std::string& dir);

/// Writes rules (ids assigned as rule_000, ... when empty) and index.json.
/// A filter report, when given, is recorded under the reserved "rejected"
/// index key.
void save_catalog(const std::string& dir, std::vector<Rule>& rules,
                  const FilterReport* report = nullptr);

/// Serialized form of one rule file, provenance included.
std::string rule_file_text(const Rule& r);
Rule parse_rule_file_text(std::string_view text);

}  // namespace apimig
