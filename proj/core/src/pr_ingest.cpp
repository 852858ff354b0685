#include "apimig/pr_ingest.hpp"

#include <algorithm>
#include <iostream>
#include <map>

#include <json.hpp>

#include "apimig/text.hpp"

namespace apimig {

namespace {

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.emplace_back(s.substr(pos));
      break;
    }
    out.emplace_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

PullRequest load_pr_json(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text);
  PullRequest pr;
  pr.id = j.at("id").get<std::string>();
  pr.url = j.value("url", "");
  pr.title = j.value("title", "");
  pr.description = j.value("description", "");
  if (j.contains("discussion"))
    for (const auto& d : j["discussion"]) pr.discussion.push_back(d.get<std::string>());
  if (j.contains("files")) {
    for (const auto& f : j["files"]) {
      FileChange fc;
      fc.path = f.at("path").get<std::string>();
      if (f.contains("old_content") && !f["old_content"].is_null())
        fc.old_content = f["old_content"].get<std::string>();
      if (f.contains("new_content") && !f["new_content"].is_null())
        fc.new_content = f["new_content"].get<std::string>();
      fc.patch = f.value("patch", "");
      pr.files.push_back(std::move(fc));
    }
  }
  if (pr.id.empty()) throw std::runtime_error("PR id must be nonempty");
  return pr;
}

PullRequest load_pr_file(const std::string& path) { return load_pr_json(read_file(path)); }

std::vector<Hunk> parse_unified_diff(std::string_view text) {
  std::vector<Hunk> hunks;
  auto lines = split_lines(text);
  size_t i = 0;
  size_t line_no = 0;
  auto parse_range = [](std::string_view s, size_t line) -> std::pair<size_t, size_t> {
    // "12" or "12,4"
    size_t comma = s.find(',');
    try {
      size_t start = std::stoul(std::string(s.substr(0, comma)));
      size_t count = comma == std::string_view::npos
                         ? 1
                         : std::stoul(std::string(s.substr(comma + 1)));
      return {start, count};
    } catch (...) {
      throw ParseError("malformed hunk range on line " + std::to_string(line), line);
    }
  };
  while (i < lines.size()) {
    const std::string& line = lines[i];
    ++line_no;
    if (line.rfind("@@", 0) != 0) {
      ++i;
      continue;
    }
    size_t close = line.find("@@", 2);
    if (close == std::string::npos)
      throw ParseError("malformed hunk header on line " + std::to_string(line_no), line_no);
    std::string body = normalize_ws(line.substr(2, close - 2));
    size_t space = body.find(' ');
    if (body.size() < 2 || body[0] != '-' || space == std::string::npos ||
        space + 1 >= body.size() || body[space + 1] != '+')
      throw ParseError("malformed hunk header on line " + std::to_string(line_no), line_no);
    Hunk h;
    auto [os, oc] = parse_range(body.substr(1, space - 1), line_no);
    auto [ns, nc] = parse_range(body.substr(space + 2), line_no);
    h.old_start = os;
    h.old_count = oc;
    h.new_start = ns;
    h.new_count = nc;
    ++i;
    while (i < lines.size()) {
      const std::string& l = lines[i];
      if (l.rfind("@@", 0) == 0) break;
      if (!l.empty() && l[0] == '\\') {  // "\ No newline at end of file"
        ++i;
        ++line_no;
        continue;
      }
      char tag = l.empty() ? ' ' : l[0];
      if (tag != ' ' && tag != '-' && tag != '+') break;
      Hunk::Line hl;
      hl.tag = tag;
      hl.text = l.empty() ? "" : l.substr(1);
      h.lines.push_back(std::move(hl));
      ++i;
      ++line_no;
    }
    hunks.push_back(std::move(h));
  }
  return hunks;
}

std::string apply_hunks(std::string_view old_content, const std::vector<Hunk>& hunks) {
  auto old_lines = split_lines(old_content);
  bool trailing_newline = !old_content.empty() && old_content.back() == '\n';
  std::vector<std::string> out;
  size_t cursor = 0;  // 0-based index into old_lines
  for (const auto& h : hunks) {
    // A zero-count old range anchors *after* old_start (insertion hunks).
    size_t start = h.old_count == 0 ? h.old_start : (h.old_start == 0 ? 0 : h.old_start - 1);
    while (cursor < start && cursor < old_lines.size()) out.push_back(old_lines[cursor++]);
    for (const auto& l : h.lines) {
      if (l.tag == '+') {
        out.push_back(l.text);
      } else {
        if (cursor < old_lines.size()) ++cursor;
        if (l.tag == ' ') out.push_back(l.text);
      }
    }
  }
  while (cursor < old_lines.size()) out.push_back(old_lines[cursor++]);
  std::string result;
  for (size_t i = 0; i < out.size(); ++i) {
    result += out[i];
    if (i + 1 < out.size() || trailing_newline) result += "\n";
  }
  return result;
}

std::optional<std::pair<std::string, std::string>> file_contents(const FileChange& fc) {
  if (fc.old_content && fc.new_content) return std::make_pair(*fc.old_content, *fc.new_content);
  if (fc.patch.empty()) return std::nullopt;
  std::vector<Hunk> hunks;
  try {
    hunks = parse_unified_diff(fc.patch);
  } catch (const ParseError&) {
    return std::nullopt;
  }
  if (fc.old_content) return std::make_pair(*fc.old_content, apply_hunks(*fc.old_content, hunks));
  if (fc.new_content) {
    std::vector<Hunk> reversed = hunks;
    for (auto& h : reversed) {
      std::swap(h.old_start, h.new_start);
      std::swap(h.old_count, h.new_count);
      for (auto& l : h.lines) l.tag = l.tag == '+' ? '-' : (l.tag == '-' ? '+' : ' ');
    }
    return std::make_pair(apply_hunks(*fc.new_content, reversed), *fc.new_content);
  }
  if (hunks.empty()) return std::nullopt;
  // Neither side present: rebuild both from the hunk text alone. Partial for
  // patches that do not cover the whole file, but downstream parsing
  // degrades gracefully.
  std::string old_text, new_text;
  for (const auto& h : hunks) {
    for (const auto& l : h.lines) {
      if (l.tag != '+') old_text += l.text + "\n";
      if (l.tag != '-') new_text += l.text + "\n";
    }
  }
  return std::make_pair(std::move(old_text), std::move(new_text));
}

namespace {

// 1-based physical line numbers changed by a hunk, per side.
std::pair<std::vector<size_t>, std::vector<size_t>> changed_lines(const Hunk& h) {
  std::vector<size_t> removed, added;
  size_t o = h.old_start, n = h.new_start;
  for (const auto& l : h.lines) {
    switch (l.tag) {
      case '-': removed.push_back(o++); break;
      case '+': added.push_back(n++); break;
      default:
        ++o;
        ++n;
        break;
    }
  }
  return {removed, added};
}

}  // namespace

std::set<std::string> affected_apis(const PullRequest& pr) {
  std::set<std::string> apis;
  for (const auto& fc : pr.files) {
    auto contents = file_contents(fc);
    if (!contents) continue;
    const auto& [old_src, new_src] = *contents;
    SyntaxNode old_tree, new_tree;
    try {
      old_tree = parse_module(old_src);
      new_tree = parse_module(new_src);
    } catch (const ParseError& e) {
      std::cerr << "apimig: skipping unparseable file " << fc.path << ": " << e.what() << "\n";
      continue;
    }
    std::vector<Hunk> hunks;
    try {
      hunks = parse_unified_diff(fc.patch);
    } catch (const ParseError&) {
      continue;
    }
    auto collect = [&](const SyntaxNode& tree, std::string_view src, size_t line) {
      auto chain = enclosing_chain(tree, src, line);
      std::vector<std::string> parts;
      for (const SyntaxNode* n : chain) parts.push_back(n->name);
      QualifiedName q = classify_name(parts, fc.path);
      if (q.empty() || q.is_test || q.is_private) return;
      // Innermost enclosing function; class-only chains contribute nothing.
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        if ((*it)->kind == NodeKind::FunctionDef) {
          apis.insert((*it)->name);
          return;
        }
      }
    };
    for (const auto& h : hunks) {
      auto [removed, added] = changed_lines(h);
      for (size_t line : removed) collect(old_tree, old_src, line);
      for (size_t line : added) collect(new_tree, new_src, line);
    }
  }
  return apis;
}

std::vector<std::pair<size_t, size_t>> align_statements(const std::vector<std::string>& before,
                                                        const std::vector<std::string>& after) {
  std::vector<std::pair<size_t, size_t>> pairs;
  if (before.size() == after.size()) {
    for (size_t i = 0; i < before.size(); ++i) pairs.emplace_back(i, i);
    return pairs;
  }
  struct Cand {
    double overlap;
    size_t i, j;
  };
  std::vector<Cand> cands;
  for (size_t i = 0; i < before.size(); ++i)
    for (size_t j = 0; j < after.size(); ++j) {
      double ov = token_jaccard(before[i], after[j]);
      if (ov > 0.0) cands.push_back({ov, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::vector<bool> used_i(before.size()), used_j(after.size());
  for (const auto& c : cands) {
    if (used_i[c.i] || used_j[c.j]) continue;
    used_i[c.i] = used_j[c.j] = true;
    pairs.emplace_back(c.i, c.j);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

namespace {

struct StatementRef {
  std::string text;
  size_t offset = 0;  // byte offset in the file
};

// Logical statements of `src` touched by the 1-based physical lines.
std::vector<StatementRef> touched_statements(std::string_view src,
                                             const std::vector<size_t>& lines) {
  std::vector<StatementRef> out;
  std::vector<LogicalLine> logical;
  try {
    logical = logical_lines(src);
  } catch (const ParseError&) {
    return out;
  }
  std::set<size_t> picked;
  for (size_t line : lines) {
    for (size_t k = 0; k < logical.size(); ++k) {
      if (line >= logical[k].first_line && line <= logical[k].last_line) {
        picked.insert(k);
        break;
      }
    }
  }
  for (size_t k : picked) {
    StatementRef ref;
    ref.text = std::string(src.substr(logical[k].begin, logical[k].end - logical[k].begin));
    ref.offset = logical[k].begin;
    out.push_back(std::move(ref));
  }
  return out;
}

}  // namespace

std::vector<ChangePair> relevant_change_pairs(const PullRequest& pr,
                                              const std::set<std::string>& apis) {
  std::vector<ChangePair> out;
  if (apis.empty()) return out;
  for (const auto& fc : pr.files) {
    auto contents = file_contents(fc);
    if (!contents) continue;
    const auto& [old_src, new_src] = *contents;
    std::vector<Hunk> hunks;
    try {
      hunks = parse_unified_diff(fc.patch);
    } catch (const ParseError&) {
      continue;
    }
    for (const auto& h : hunks) {
      auto [removed_lines, added_lines] = changed_lines(h);
      auto before_stmts = touched_statements(old_src, removed_lines);
      auto after_stmts = touched_statements(new_src, added_lines);
      std::vector<std::string> before_texts, after_texts;
      for (const auto& s : before_stmts) before_texts.push_back(s.text);
      for (const auto& s : after_stmts) after_texts.push_back(s.text);
      for (auto [i, j] : align_statements(before_texts, after_texts)) {
        if (before_texts[i] == after_texts[j]) continue;
        ChangePair pair;
        pair.before_text = before_texts[i];
        pair.after_text = after_texts[j];
        try {
          pair.before = parse_statement(pair.before_text);
          pair.after = parse_statement(pair.after_text);
        } catch (const ParseError&) {
          continue;
        }
        std::set<std::string> names = call_names(pair.before, pair.before_text);
        auto after_names = call_names(pair.after, pair.after_text);
        names.insert(after_names.begin(), after_names.end());
        bool relevant = std::any_of(names.begin(), names.end(),
                                    [&](const std::string& n) { return apis.count(n) > 0; });
        if (!relevant) continue;
        pair.file = fc.path;
        pair.pr_id = pr.id;
        pair.before_file = old_src;
        pair.before_offset = before_stmts[i].offset;
        out.push_back(std::move(pair));
      }
    }
  }
  return out;
}

}  // namespace apimig
