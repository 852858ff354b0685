#pragma once

#include <set>
#include <string>
#include <vector>

#include "apimig/template_lang.hpp"

namespace apimig {

enum class RejectReason { Duplicate, NoApiKeyword, UnsafeVariable, PrivateNamespace };
const char* reject_reason_name(RejectReason r);

struct FilterReport {
  std::vector<Rule> kept;
  std::vector<std::pair<Rule, RejectReason>> rejected;
};

/// Collapses rules identical up to alpha-equivalence within the same PR.
std::vector<Rule> dedup(const std::vector<Rule>& rules);

/// Keeps rules whose match or rewrite template contains some affected API
/// name as a whole token.
FilterReport filter_api_keywords(const std::vector<Rule>& rules, const std::set<std::string>& apis);

/// Rejects rules whose rewrite references holes absent from the match
/// template, or whose rewrite names an underscore-prefixed segment.
FilterReport filter_unsafe(const std::vector<Rule>& rules);

/// Full quality gate: dedup, API keywords, unsafe/private checks.
FilterReport run_filters(const std::vector<Rule>& rules, const std::set<std::string>& apis);

}  // namespace apimig
