#include "apimig/rule_filter.hpp"

#include <algorithm>
#include <map>

#include "apimig/text.hpp"

namespace apimig {

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::Duplicate: return "duplicate";
    case RejectReason::NoApiKeyword: return "no-api-keyword";
    case RejectReason::UnsafeVariable: return "unsafe-variable";
    case RejectReason::PrivateNamespace: return "private-namespace";
  }
  return "?";
}

namespace {

std::string rule_signature(const Rule& r) {
  Rule n = alpha_normalize(r);
  std::string sig = print_template(n.match) + "\x1f" + print_template(n.rewrite);
  for (const auto& c : n.constraints) sig += "\x1f" + c.hole_name + "==" + c.type_name;
  return sig;
}

bool has_private_segment(const Template& t) {
  for (const auto& p : t.parts) {
    if (p.is_hole) continue;
    const std::string& s = p.text;
    size_t i = 0;
    while (i < s.size()) {
      if (is_word_char(s[i])) {
        size_t b = i;
        while (i < s.size() && is_word_char(s[i])) ++i;
        if (s[b] == '_') return true;
      } else {
        ++i;
      }
    }
  }
  return false;
}

bool rewrite_holes_bound(const Rule& r) {
  std::set<std::string> match_holes;
  for (const auto& h : r.match.holes()) match_holes.insert(h.name);
  for (const auto& h : r.rewrite.holes())
    if (!match_holes.count(h.name)) return false;
  return true;
}

bool template_has_api(const Template& t, const std::set<std::string>& apis) {
  for (const auto& p : t.parts) {
    if (p.is_hole) continue;
    for (const auto& api : apis)
      if (contains_word(p.text, api)) return true;
  }
  return false;
}

}  // namespace

std::vector<Rule> dedup(const std::vector<Rule>& rules) {
  std::vector<Rule> out;
  std::map<std::string, std::set<std::string>> seen;  // pr id -> signatures
  for (const auto& r : rules) {
    std::string sig = rule_signature(r);
    auto& sigs = seen[r.provenance.pr_id];
    if (sigs.count(sig)) continue;
    sigs.insert(sig);
    out.push_back(r);
  }
  return out;
}

FilterReport filter_api_keywords(const std::vector<Rule>& rules,
                                 const std::set<std::string>& apis) {
  FilterReport report;
  for (const auto& r : rules) {
    if (template_has_api(r.match, apis) || template_has_api(r.rewrite, apis))
      report.kept.push_back(r);
    else
      report.rejected.emplace_back(r, RejectReason::NoApiKeyword);
  }
  return report;
}

FilterReport filter_unsafe(const std::vector<Rule>& rules) {
  FilterReport report;
  for (const auto& r : rules) {
    if (!rewrite_holes_bound(r))
      report.rejected.emplace_back(r, RejectReason::UnsafeVariable);
    else if (has_private_segment(r.rewrite))
      report.rejected.emplace_back(r, RejectReason::PrivateNamespace);
    else
      report.kept.push_back(r);
  }
  return report;
}

FilterReport run_filters(const std::vector<Rule>& rules, const std::set<std::string>& apis) {
  FilterReport report;
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& r : rules) {
    std::string sig = rule_signature(r);
    auto& sigs = seen[r.provenance.pr_id];
    if (sigs.count(sig)) {
      report.rejected.emplace_back(r, RejectReason::Duplicate);
      continue;
    }
    sigs.insert(sig);
    if (!template_has_api(r.match, apis) && !template_has_api(r.rewrite, apis)) {
      report.rejected.emplace_back(r, RejectReason::NoApiKeyword);
      continue;
    }
    if (!rewrite_holes_bound(r)) {
      report.rejected.emplace_back(r, RejectReason::UnsafeVariable);
      continue;
    }
    if (has_private_segment(r.rewrite)) {
      report.rejected.emplace_back(r, RejectReason::PrivateNamespace);
      continue;
    }
    report.kept.push_back(r);
  }
  return report;
}

}  // namespace apimig
