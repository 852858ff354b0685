#include "apimig/apply.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "apimig/text.hpp"

namespace apimig {

namespace fs = std::filesystem;

bool glob_match(std::string_view pattern, std::string_view path) {
  // Iterative wildcard match; '*' crosses '/' so "*.py" matches any depth.
  size_t p = 0, s = 0;
  size_t star_p = std::string_view::npos, star_s = 0;
  while (s < path.size()) {
    if (p < pattern.size() && (pattern[p] == path[s] || pattern[p] == '?')) {
      ++p;
      ++s;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star_p = p++;
      star_s = s;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      s = ++star_s;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

namespace {

std::vector<std::string> to_lines(std::string_view text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.emplace_back(text.substr(pos));
      break;
    }
    out.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

std::string unified_diff(std::string_view old_text, std::string_view new_text,
                         const std::string& path) {
  auto a = to_lines(old_text);
  auto b = to_lines(new_text);
  // Common prefix/suffix, then line-LCS over the middle (coarse single-hunk
  // fallback for very large middles).
  size_t pre = 0;
  while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
  size_t suf = 0;
  while (suf < a.size() - pre && suf < b.size() - pre &&
         a[a.size() - 1 - suf] == b[b.size() - 1 - suf])
    ++suf;
  size_t an = a.size() - pre - suf, bn = b.size() - pre - suf;

  std::vector<std::pair<char, const std::string*>> script;  // ' ', '-', '+'
  if (an * bn <= 4u * 1000u * 1000u) {
    std::vector<std::vector<int>> dp(an + 1, std::vector<int>(bn + 1, 0));
    for (size_t i = an; i-- > 0;)
      for (size_t j = bn; j-- > 0;)
        dp[i][j] = a[pre + i] == b[pre + j] ? dp[i + 1][j + 1] + 1
                                            : std::max(dp[i + 1][j], dp[i][j + 1]);
    size_t i = 0, j = 0;
    while (i < an && j < bn) {
      if (a[pre + i] == b[pre + j]) {
        script.emplace_back(' ', &a[pre + i]);
        ++i;
        ++j;
      } else if (dp[i + 1][j] >= dp[i][j + 1]) {
        script.emplace_back('-', &a[pre + i]);
        ++i;
      } else {
        script.emplace_back('+', &b[pre + j]);
        ++j;
      }
    }
    while (i < an) script.emplace_back('-', &a[pre + i++]);
    while (j < bn) script.emplace_back('+', &b[pre + j++]);
  } else {
    for (size_t i = 0; i < an; ++i) script.emplace_back('-', &a[pre + i]);
    for (size_t j = 0; j < bn; ++j) script.emplace_back('+', &b[pre + j]);
  }
  if (script.empty()) return "";

  struct Item {
    char tag;
    const std::string* line;
  };
  std::vector<Item> items;
  for (size_t k = 0; k < pre; ++k) items.push_back({' ', &a[k]});
  for (auto& [t, l] : script) items.push_back({t, l});
  for (size_t k = 0; k < suf; ++k) items.push_back({' ', &a[a.size() - suf + k]});

  // Hunks: change blocks padded with kContext equal lines, merged when the
  // gap between blocks is small.
  constexpr size_t kContext = 3;
  std::vector<std::pair<size_t, size_t>> hunks;  // [begin, end) into items
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].tag == ' ') continue;
    size_t begin = i >= kContext ? i - kContext : 0;
    size_t end = i + 1;
    size_t equal_run = 0;
    size_t j = i + 1;
    while (j < items.size() && equal_run <= 2 * kContext) {
      if (items[j].tag == ' ')
        ++equal_run;
      else {
        equal_run = 0;
        end = j + 1;
      }
      ++j;
    }
    end = std::min(items.size(), end + kContext);
    if (!hunks.empty() && begin <= hunks.back().second)
      hunks.back().second = end;
    else
      hunks.emplace_back(begin, end);
    i = end > 0 ? end - 1 : 0;
  }

  std::ostringstream out;
  out << "--- a/" << path << "\n+++ b/" << path << "\n";
  size_t old_line = 1, new_line = 1, idx = 0;
  for (auto [begin, end] : hunks) {
    for (; idx < begin; ++idx) {
      if (items[idx].tag != '+') ++old_line;
      if (items[idx].tag != '-') ++new_line;
    }
    size_t o_start = old_line, n_start = new_line, o_count = 0, n_count = 0;
    std::ostringstream body;
    for (; idx < end; ++idx) {
      body << items[idx].tag << *items[idx].line << "\n";
      if (items[idx].tag != '+') {
        ++o_count;
        ++old_line;
      }
      if (items[idx].tag != '-') {
        ++n_count;
        ++new_line;
      }
    }
    out << "@@ -" << o_start << "," << o_count << " +" << n_start << "," << n_count << " @@\n"
        << body.str();
  }
  return out.str();
}

ApplyReport apply_ruleset(const std::vector<Rule>& catalog, const std::string& root,
                          const TypeOracle& oracle, const ApplyOptions& opts) {
  ApplyReport report;
  for (const auto& r : catalog) report.rule_stats[r.id];  // deterministic key set

  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) {
    files.push_back(root);
  } else {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      std::string rel = fs::relative(entry.path(), root).generic_string();
      bool included = std::any_of(opts.include_globs.begin(), opts.include_globs.end(),
                                  [&](const std::string& g) { return glob_match(g, rel); });
      if (included) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  }

  ApplyRuleOptions rule_opts;
  rule_opts.permissive_constraints = opts.permissive_constraints;

  for (const auto& file : files) {
    std::string rel = fs::is_regular_file(root) && files.size() == 1 && file == fs::path(root)
                          ? file.filename().string()
                          : fs::relative(file, root).generic_string();
    std::string original;
    try {
      original = read_file(file.string());
    } catch (const std::exception&) {
      report.unreadable.push_back(rel);
      continue;
    }
    std::string text = original;
    size_t edits_here = 0;
    for (const auto& rule : catalog) {
      RewriteOutcome outcome = apply_rule(rule, text, oracle, rel, LangProfile::python(), rule_opts);
      RuleStats& stats = report.rule_stats[rule.id];
      stats.matched += outcome.edits.size() + outcome.skipped.size();
      stats.applied += outcome.edits.size();
      for (const auto& s : outcome.skipped) {
        if (s.reason == SkipReason::UnknownType)
          ++stats.skipped_unknown_type;
        else
          ++stats.skipped_constraint_failed;
      }
      edits_here += outcome.edits.size();
      text = std::move(outcome.new_source);
    }
    if (edits_here) report.file_edits[rel] = edits_here;
    if (text == original) continue;
    if (opts.dry_run) {
      report.diffs.push_back(unified_diff(original, text, rel));
    } else {
      try {
        write_file(file.string(), text);
      } catch (const std::exception& e) {
        report.fatal_error = std::string("write failed for ") + rel + ": " + e.what();
        return report;
      }
    }
  }
  return report;
}

std::string ApplyReport::to_json() const {
  nlohmann::ordered_json j;
  j["files"] = nlohmann::ordered_json::object();
  for (const auto& [path, count] : file_edits) j["files"][path] = count;
  j["rules"] = nlohmann::ordered_json::object();
  for (const auto& [id, s] : rule_stats) {
    nlohmann::ordered_json r;
    r["matched"] = s.matched;
    r["applied"] = s.applied;
    r["skipped"] = {{"unknown-type", s.skipped_unknown_type},
                    {"constraint-failed", s.skipped_constraint_failed}};
    j["rules"][id] = r;
  }
  j["unreadable"] = unreadable;
  if (fatal_error) j["error"] = *fatal_error;
  return j.dump(2);
}

bool validate_rule_text(const Rule& rule, const std::string& before, const std::string& after) {
  TypeOracle oracle = TypeOracle::always_unknown();
  ApplyRuleOptions opts;
  opts.permissive_constraints = true;
  RewriteOutcome outcome = apply_rule(rule, before, oracle, "", LangProfile::python(), opts);
  return normalize_ws(outcome.new_source) == normalize_ws(after);
}

bool validate_rule(const Rule& rule, const ChangePair& pair) {
  return validate_rule_text(rule, pair.before_text, pair.after_text);
}

}  // namespace apimig
