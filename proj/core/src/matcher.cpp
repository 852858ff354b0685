#include "apimig/matcher.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "apimig/text.hpp"

namespace apimig {

const LangProfile& LangProfile::python() {
  static const LangProfile p{};
  return p;
}

SourceScan::SourceScan(std::string_view source, const LangProfile& profile) {
  token_.assign(source.size(), 0);
  uint32_t next_id = 1;
  size_t i = 0;
  const char comment_char = profile.line_comment.empty() ? '\0' : profile.line_comment[0];
  while (i < source.size()) {
    char c = source[i];
    if (comment_char != '\0' && c == comment_char) {
      uint32_t id = next_id++;
      while (i < source.size() && source[i] != '\n') token_[i++] = id;
      continue;
    }
    if (c == '\'' || c == '"') {
      uint32_t id = next_id++;
      size_t start = i;
      char q = c;
      bool triple = profile.triple_quotes && i + 2 < source.size() && source[i + 1] == q &&
                    source[i + 2] == q;
      i += triple ? 3 : 1;
      bool closed = false;
      while (i < source.size()) {
        if (source[i] == '\\') {
          i += 2;
          continue;
        }
        if (triple) {
          if (source[i] == q && i + 2 < source.size() && source[i + 1] == q &&
              source[i + 2] == q) {
            i += 3;
            closed = true;
            break;
          }
          ++i;
        } else {
          if (source[i] == q) {
            ++i;
            closed = true;
            break;
          }
          if (source[i] == '\n') break;  // unterminated: treat the rest of line as the token
          ++i;
        }
      }
      if (i > source.size()) i = source.size();
      for (size_t k = start; k < i && k < source.size(); ++k) token_[k] = id;
      (void)closed;
      continue;
    }
    ++i;
  }
}

namespace {

struct PartCtx {
  bool prev_is_hole = false;
  bool next_is_hole = false;
};

class Matcher {
 public:
  Matcher(const Template& t, std::string_view src, const SourceScan& scan,
          const MatchOptions& opts)
      : parts_(t.parts), src_(src), scan_(scan), opts_(opts) {}

  std::optional<MatchResult> match_at(size_t start) {
    if (!scan_.boundary_ok(start)) return std::nullopt;
    bindings_.clear();
    std::optional<size_t> end = match_part(0, start, /*at_match_start=*/true);
    if (!end) return std::nullopt;
    MatchResult r;
    r.begin = start;
    r.end = *end;
    r.bindings = bindings_;
    return r;
  }

 private:
  // Matches parts_[idx..] at src_[pos..]; returns the end position.
  std::optional<size_t> match_part(size_t idx, size_t pos, bool at_match_start) {
    if (idx == parts_.size()) {
      if (!scan_.boundary_ok(pos)) return std::nullopt;
      return pos;
    }
    const Template::Part& p = parts_[idx];
    if (!p.is_hole) {
      PartCtx ctx;
      ctx.prev_is_hole = idx > 0 && parts_[idx - 1].is_hole;
      ctx.next_is_hole = idx + 1 < parts_.size() && parts_[idx + 1].is_hole;
      auto next = match_literal(p.text, pos, ctx);
      if (!next) return std::nullopt;
      return match_part(idx + 1, *next, false);
    }
    return match_hole(idx, pos, at_match_start);
  }

  std::optional<size_t> match_literal(std::string_view lit, size_t pos, const PartCtx& ctx) {
    size_t i = 0, j = pos;
    while (i < lit.size()) {
      if (!opts_.strict_whitespace && is_space_char(lit[i])) {
        size_t run_begin = i;
        while (i < lit.size() && is_space_char(lit[i])) ++i;
        bool leading = run_begin == 0;
        bool trailing = i == lit.size();
        bool optional = (leading && ctx.prev_is_hole) || (trailing && ctx.next_is_hole);
        size_t k = 0;
        while (j < src_.size() && is_space_char(src_[j])) {
          ++j;
          ++k;
        }
        if (k == 0 && !optional) return std::nullopt;
        continue;
      }
      if (j >= src_.size() || src_[j] != lit[i]) return std::nullopt;
      ++i;
      ++j;
    }
    return j;
  }

  std::optional<size_t> match_hole(size_t idx, size_t pos, bool at_match_start) {
    const Hole& h = parts_[idx].hole;
    size_t b = pos;
    if (!opts_.strict_whitespace && !at_match_start)
      while (b < src_.size() && is_space_char(src_[b])) ++b;
    if (!scan_.boundary_ok(b)) return std::nullopt;

    auto bound = bindings_.find(h.name);
    if (bound != bindings_.end()) {
      const std::string& text = bound->second.text;
      if (src_.substr(b, text.size()) != text) return std::nullopt;
      size_t e = b + text.size();
      if (!scan_.boundary_ok(e)) return std::nullopt;
      return match_part(idx + 1, e, false);
    }

    auto try_bind = [&](size_t e) -> std::optional<size_t> {
      Binding bind;
      bind.begin = b;
      bind.end = e;
      bind.text = std::string(src_.substr(b, e - b));
      bindings_[h.name] = bind;
      auto r = match_part(idx + 1, e, false);
      if (!r) bindings_.erase(h.name);
      return r;
    };

    if (h.kind == HoleKind::Alnum) {
      size_t max_e = b;
      while (max_e < src_.size() && is_word_char(src_[max_e])) ++max_e;
      for (size_t e = b + 1; e <= max_e; ++e) {
        if (auto r = try_bind(e)) return r;
      }
      return std::nullopt;
    }

    // Balanced / Args: lazy extension with delimiter counts over code bytes.
    std::array<int, 3> open{0, 0, 0};
    auto balanced = [&]() { return open[0] == 0 && open[1] == 0 && open[2] == 0; };
    size_t e = b;
    if (h.kind == HoleKind::Args) {
      if (auto r = try_bind(e)) return r;
    }
    while (e < src_.size()) {
      if (scan_.is_code(e)) {
        switch (src_[e]) {
          case '(': ++open[0]; break;
          case ')': --open[0]; break;
          case '[': ++open[1]; break;
          case ']': --open[1]; break;
          case '{': ++open[2]; break;
          case '}': --open[2]; break;
          default: break;
        }
      }
      ++e;
      if (!balanced() || !scan_.boundary_ok(e)) continue;
      if (auto r = try_bind(e)) return r;
    }
    return std::nullopt;
  }

  const std::vector<Template::Part>& parts_;
  std::string_view src_;
  const SourceScan& scan_;
  MatchOptions opts_;
  std::map<std::string, Binding> bindings_;
};

}  // namespace

std::vector<MatchResult> match_all(const Template& t, std::string_view source,
                                   const LangProfile& profile, const MatchOptions& opts) {
  std::vector<MatchResult> out;
  if (t.parts.empty()) return out;
  SourceScan scan(source, profile);
  Matcher m(t, source, scan, opts);

  // Fast scan anchor: first non-whitespace byte of a leading literal.
  char anchor = '\0';
  if (!t.parts.front().is_hole) {
    for (char c : t.parts.front().text) {
      if (!is_space_char(c)) {
        anchor = c;
        break;
      }
    }
  }

  size_t pos = 0;
  while (pos <= source.size()) {
    if (anchor != '\0') {
      // The match must begin at the literal's first byte; whitespace-led
      // literals still anchor at their first non-ws byte further right.
      bool lit_starts_ws = is_space_char(t.parts.front().text[0]);
      if (!lit_starts_ws) {
        size_t found = source.find(anchor, pos);
        if (found == std::string_view::npos) break;
        pos = found;
      }
    }
    if (pos > source.size()) break;
    auto r = m.match_at(pos);
    if (r) {
      out.push_back(*r);
      pos = r->end > r->begin ? r->end : r->begin + 1;
    } else {
      ++pos;
    }
  }
  return out;
}

ConstraintOutcome check_constraints(const MatchResult& m, const std::vector<Constraint>& cs,
                                    const TypeOracle& oracle, const FileContext& ctx) {
  bool any_unknown = false, any_fail = false;
  for (const auto& c : cs) {
    auto it = m.bindings.find(c.hole_name);
    if (it == m.bindings.end()) {
      any_unknown = true;
      continue;
    }
    auto resolved = oracle.resolve(ctx, it->second.begin, it->second.end);
    if (!resolved) {
      any_unknown = true;
      continue;
    }
    const std::string& t = *resolved;
    const std::string& want = c.type_name;
    bool ok = t == want ||
              (t.size() > want.size() && t.compare(0, want.size(), want) == 0 &&
               t[want.size()] == '.') ||
              (t.size() > want.size() && t.compare(t.size() - want.size(), want.size(), want) == 0 &&
               t[t.size() - want.size() - 1] == '.');
    if (!ok) any_fail = true;
  }
  if (any_unknown) return ConstraintOutcome::Unknown;
  if (any_fail) return ConstraintOutcome::Fail;
  return ConstraintOutcome::Pass;
}

std::string substitute(const Template& rewrite, const std::map<std::string, Binding>& bindings) {
  std::string out;
  std::vector<size_t> empty_marks;
  for (const auto& p : rewrite.parts) {
    if (!p.is_hole) {
      out += p.text;
      continue;
    }
    auto it = bindings.find(p.hole.name);
    if (it == bindings.end())
      throw std::runtime_error("unbound hole `" + p.hole.name + "` in rewrite template");
    if (p.hole.kind == HoleKind::Args && it->second.text.empty()) empty_marks.push_back(out.size());
    out += it->second.text;
  }

  auto is_open = [](char c) { return c == '(' || c == '[' || c == '{'; };
  auto is_close = [](char c) { return c == ')' || c == ']' || c == '}'; };
  for (size_t mi = 0; mi < empty_marks.size(); ++mi) {
    size_t m = empty_marks[mi];
    size_t p = m;
    while (p > 0 && is_space_char(out[p - 1])) --p;
    size_t q = m;
    while (q < out.size() && is_space_char(out[q])) ++q;
    size_t erase_begin = out.size(), erase_end = out.size();
    if (p > 0 && out[p - 1] == ',' && q < out.size() && is_close(out[q])) {
      erase_begin = p - 1;  // drop `, ` before the closer
      erase_end = q;
    } else if (p > 0 && is_open(out[p - 1]) && q < out.size() && out[q] == ',') {
      erase_begin = q;  // drop the comma (and one space) after the opener
      erase_end = q + 1;
      if (erase_end < out.size() && out[erase_end] == ' ') ++erase_end;
    } else if (p > 0 && out[p - 1] == ',' && q < out.size() && out[q] == ',') {
      erase_begin = p;  // keep the first comma, drop the gap and the second
      erase_end = q + 1;
    }
    if (erase_begin < erase_end) {
      out.erase(erase_begin, erase_end - erase_begin);
      size_t shift = erase_end - erase_begin;
      for (size_t k = mi + 1; k < empty_marks.size(); ++k) {
        if (empty_marks[k] >= erase_end)
          empty_marks[k] -= shift;
        else if (empty_marks[k] > erase_begin)
          empty_marks[k] = erase_begin;
      }
    }
  }
  return out;
}

const char* skip_reason_name(SkipReason r) {
  return r == SkipReason::UnknownType ? "unknown-type" : "constraint-failed";
}

RewriteOutcome apply_rule(const Rule& rule, std::string_view source, const TypeOracle& oracle,
                          const std::string& path, const LangProfile& profile,
                          const ApplyRuleOptions& opts) {
  RewriteOutcome out;
  FileContext ctx{path, source};
  auto matches = match_all(rule.match, source, profile, opts.match);
  for (const auto& m : matches) {
    ConstraintOutcome gate = check_constraints(m, rule.constraints, oracle, ctx);
    if (gate == ConstraintOutcome::Unknown && opts.permissive_constraints)
      gate = ConstraintOutcome::Pass;
    if (gate == ConstraintOutcome::Pass) {
      Edit e;
      e.begin = m.begin;
      e.end = m.end;
      e.replacement = substitute(rule.rewrite, m.bindings);
      e.rule_id = rule.id;
      out.edits.push_back(std::move(e));
    } else {
      Skip s;
      s.begin = m.begin;
      s.end = m.end;
      s.reason = gate == ConstraintOutcome::Unknown ? SkipReason::UnknownType
                                                    : SkipReason::ConstraintFailed;
      out.skipped.push_back(s);
    }
  }
  std::string result;
  size_t pos = 0;
  for (const auto& e : out.edits) {
    result.append(source.substr(pos, e.begin - pos));
    result.append(e.replacement);
    pos = e.end;
  }
  result.append(source.substr(pos));
  out.new_source = std::move(result);
  return out;
}

}  // namespace apimig
