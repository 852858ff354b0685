#include "apimig/rule_generalize.hpp"

#include <algorithm>
#include <set>

#include "apimig/assignment.hpp"
#include "apimig/text.hpp"

namespace apimig {

namespace {

std::string node_text(const SyntaxNode& n, const TemplateTree& t) {
  return collapse_ws(n.text(t.rendered));
}

std::vector<std::string> sentinels_in(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : word_tokens(text))
    if (tok.rfind("__h", 0) == 0 && tok.size() > 5 && tok.substr(tok.size() - 2) == "__")
      out.push_back(tok);
  return out;
}

}  // namespace

std::string TemplateTree::sentinel_for(const Hole& h) {
  auto it = by_hole.find(h.name);
  if (it != by_hole.end()) return it->second;
  std::string s = "__h" + std::to_string(sentinels.size()) + "__";
  while (sentinels.count(s)) s = "_" + s;
  sentinels[s] = h;
  by_hole[h.name] = s;
  return s;
}

TemplateTree template_to_tree(const Template& t) {
  TemplateTree out;
  for (const auto& p : t.parts) {
    if (p.is_hole)
      out.rendered += out.sentinel_for(p.hole);
    else
      out.rendered += p.text;
  }
  out.root = parse_statement(out.rendered);
  return out;
}

Template tree_text_to_template(std::string_view text,
                               const std::map<std::string, Hole>& sentinels) {
  std::string rendered(text);
  // Longest sentinel first avoids prefix clashes from the collision guard.
  std::vector<std::pair<std::string, Hole>> items(sentinels.begin(), sentinels.end());
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  for (const auto& [sentinel, hole] : items) {
    size_t pos = 0;
    while ((pos = rendered.find(sentinel, pos)) != std::string::npos) {
      std::string hole_text = print_hole(hole);
      rendered.replace(pos, sentinel.size(), hole_text);
      pos += hole_text.size();
    }
  }
  return parse_template(rendered);
}

std::pair<const SyntaxNode*, const SyntaxNode*> remove_common_context(const TemplateTree& before,
                                                                      const TemplateTree& after) {
  const SyntaxNode* n1 = &before.root;
  const SyntaxNode* n2 = &after.root;
  bool changed = true;
  while (changed) {
    changed = false;
    if (n1->kind == NodeKind::Return && n2->kind == NodeKind::Return &&
        n1->children.size() == 1 && n2->children.size() == 1) {
      n1 = &n1->children[0];
      n2 = &n2->children[0];
      changed = true;
      continue;
    }
    if (n1->kind == NodeKind::If && n2->kind == NodeKind::If && n1->children.size() == 2 &&
        n2->children.size() == 2 &&
        node_text(n1->children[0], before) == node_text(n2->children[0], after)) {
      n1 = &n1->children[1];
      n2 = &n2->children[1];
      changed = true;
      continue;
    }
    if (n1->kind == NodeKind::Assert && n2->kind == NodeKind::Assert &&
        !n1->children.empty() && !n2->children.empty()) {
      bool msg_same =
          (n1->children.size() == 1 && n2->children.size() == 1) ||
          (n1->children.size() == 2 && n2->children.size() == 2 &&
           node_text(n1->children[1], before) == node_text(n2->children[1], after));
      if (msg_same) {
        n1 = &n1->children[0];
        n2 = &n2->children[0];
        changed = true;
        continue;
      }
    }
    if (n1->kind == NodeKind::Assign && n2->kind == NodeKind::Assign &&
        n1->children.size() == 2 && n2->children.size() == 2) {
      std::string t1 = node_text(n1->children[0], before);
      std::string t2 = node_text(n2->children[0], after);
      if (t1 == t2) {
        bool reused = false;
        std::string v1 = node_text(n1->children[1], before);
        std::string v2 = node_text(n2->children[1], after);
        for (const auto& s : sentinels_in(t1))
          if (contains_word(v1, s) || contains_word(v2, s)) reused = true;
        if (!reused) {
          n1 = &n1->children[1];
          n2 = &n2->children[1];
          changed = true;
          continue;
        }
      }
    }
    if (n1->kind == NodeKind::ExprStmt && n2->kind == NodeKind::ExprStmt &&
        n1->children.size() == 1 && n2->children.size() == 1) {
      n1 = &n1->children[0];
      n2 = &n2->children[0];
      changed = true;
      continue;
    }
  }
  return {n1, n2};
}

namespace {

void collect_calls(const SyntaxNode* n, std::vector<const SyntaxNode*>& out) {
  if (n->kind == NodeKind::Call) out.push_back(n);
  for (const auto& c : n->children) collect_calls(&c, out);
}

std::string callee_name(const SyntaxNode& call, const TemplateTree& t) {
  if (call.children.empty()) return "";
  const SyntaxNode& callee = call.children[0];
  if (callee.kind == NodeKind::Attribute) return callee.name;
  if (callee.kind == NodeKind::Name) return std::string(callee.text(t.rendered));
  return "";
}

std::string args_text(const SyntaxNode& call, const TemplateTree& t) {
  std::string out;
  for (size_t i = 1; i < call.children.size(); ++i) {
    out += node_text(call.children[i], t);
    out += " ";
  }
  return out;
}

}  // namespace

std::vector<CallPair> get_call_pairs(const SyntaxNode* n1, const SyntaxNode* n2,
                                     const TemplateTree& before, const TemplateTree& after) {
  std::vector<const SyntaxNode*> c1, c2;
  collect_calls(n1, c1);
  collect_calls(n2, c2);
  std::vector<CallPair> pairs;
  if (c1.empty() || c2.empty()) return pairs;
  std::vector<std::vector<double>> cost(c1.size(), std::vector<double>(c2.size()));
  for (size_t i = 0; i < c1.size(); ++i) {
    for (size_t j = 0; j < c2.size(); ++j) {
      std::string a = callee_name(*c1[i], before);
      std::string b = callee_name(*c2[j], after);
      if (!a.empty() && a == b)
        cost[i][j] = 0.0;
      else
        cost[i][j] = 1.0 - token_jaccard(args_text(*c1[i], before), args_text(*c2[j], after));
    }
  }
  auto assign = min_cost_assignment(cost);
  for (size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] < 0) continue;
    double c = cost[i][static_cast<size_t>(assign[i])];
    if (c >= 0.9) continue;
    pairs.push_back({c1[i], c2[static_cast<size_t>(assign[i])], c});
  }
  return pairs;
}

namespace {

struct ArgItem {
  std::string text;   // collapsed sentinel form
  bool is_keyword = false;
  bool is_args_hole = false;  // a lone Args-kind sentinel
};

std::vector<ArgItem> arg_items(const SyntaxNode& call, const TemplateTree& t) {
  std::vector<ArgItem> out;
  for (size_t i = 1; i < call.children.size(); ++i) {
    const SyntaxNode& a = call.children[i];
    ArgItem item;
    item.text = node_text(a, t);
    item.is_keyword = a.kind == NodeKind::Keyword;
    auto s = t.sentinels.find(item.text);
    item.is_args_hole = s != t.sentinels.end() && s->second.kind == HoleKind::Args;
    out.push_back(std::move(item));
  }
  return out;
}

// Longest common subsequence of equal texts; returns aligned (i, j) pairs.
std::vector<std::pair<size_t, size_t>> lcs_align(const std::vector<ArgItem>& a,
                                                 const std::vector<ArgItem>& b) {
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      dp[i][j] = a[i].text == b[j].text ? dp[i + 1][j + 1] + 1
                                        : std::max(dp[i + 1][j], dp[i][j + 1]);
  std::vector<std::pair<size_t, size_t>> out;
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i].text == b[j].text) {
      out.emplace_back(i, j);
      ++i;
      ++j;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

std::string render_call(const std::string& callee, const std::vector<std::string>& args) {
  std::string out = callee + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i];
  }
  out += ")";
  return out;
}

}  // namespace

ArgGeneralization generalize_arguments(const CallPair& pair, TemplateTree& before,
                                       TemplateTree& after, int& gen_counter) {
  ArgGeneralization out;
  const SyntaxNode& c1 = *pair.before_call;
  const SyntaxNode& c2 = *pair.after_call;
  auto a1 = arg_items(c1, before);
  auto a2 = arg_items(c2, after);
  auto aligned = lcs_align(a1, a2);

  // Maximal runs of consecutively aligned identical arguments.
  struct Run {
    size_t i0, j0, len;
  };
  std::vector<Run> runs;
  for (size_t k = 0; k < aligned.size();) {
    size_t start = k;
    while (k + 1 < aligned.size() && aligned[k + 1].first == aligned[k].first + 1 &&
           aligned[k + 1].second == aligned[k].second + 1)
      ++k;
    ++k;
    size_t len = k - start;
    if (len >= 2) runs.push_back({aligned[start].first, aligned[start].second, len});
  }

  std::map<size_t, std::pair<size_t, std::string>> run_at_1, run_at_2;  // start -> (len, hole)
  for (const auto& r : runs) {
    Hole h;
    h.name = "gen_args_" + std::to_string(gen_counter++);
    h.kind = HoleKind::Args;
    std::string s1 = before.sentinel_for(h);
    std::string s2 = after.sentinel_for(h);
    run_at_1[r.i0] = {r.len, s1};
    run_at_2[r.j0] = {r.len, s2};
  }

  struct Rendered {
    std::string text;
    bool is_keyword = false;
  };
  auto build = [](const std::vector<ArgItem>& items,
                  const std::map<size_t, std::pair<size_t, std::string>>& run_at) {
    std::vector<Rendered> out;
    for (size_t i = 0; i < items.size();) {
      auto it = run_at.find(i);
      if (it != run_at.end()) {
        out.push_back({it->second.second, false});
        i += it->second.first;
      } else {
        out.push_back({items[i].text, items[i].is_keyword});
        ++i;
      }
    }
    return out;
  };
  auto r1 = build(a1, run_at_1);
  auto r2 = build(a2, run_at_2);
  // Keyword arguments go to the end of the rewrite call, order preserved.
  std::stable_partition(r2.begin(), r2.end(), [](const Rendered& r) { return !r.is_keyword; });

  auto texts = [](const std::vector<Rendered>& rs) {
    std::vector<std::string> out;
    for (const auto& r : rs) out.push_back(r.text);
    return out;
  };
  std::string callee1 = c1.children.empty() ? "" : node_text(c1.children[0], before);
  std::string callee2 = c2.children.empty() ? "" : node_text(c2.children[0], after);
  out.before_call_text = render_call(callee1, texts(r1));
  out.after_call_text = render_call(callee2, texts(r2));
  out.changed = !runs.empty() || out.before_call_text != node_text(c1, before) ||
                out.after_call_text != node_text(c2, after);
  return out;
}

namespace {

struct Splice {
  size_t begin, end;
  std::string text;
};

// Splice positions are absolute into the tree's rendered string; `base` is
// its slice starting at `offset`.
std::string apply_splices(std::string_view base, size_t offset, std::vector<Splice> splices) {
  std::sort(splices.begin(), splices.end(),
            [](const Splice& a, const Splice& b) { return a.begin < b.begin; });
  // Drop splices nested inside another (the outer replacement wins).
  std::vector<Splice> kept;
  for (const auto& s : splices) {
    bool nested = false;
    for (const auto& k : splices)
      if (&k != &s && k.begin <= s.begin && s.end <= k.end &&
          (k.begin != s.begin || k.end != s.end))
        nested = true;
    if (!nested) kept.push_back(s);
  }
  std::string out;
  size_t pos = 0;
  for (const auto& s : kept) {
    if (s.begin < offset || s.end > offset + base.size()) continue;
    size_t rb = s.begin - offset, re = s.end - offset;
    if (rb < pos) continue;
    out += base.substr(pos, rb - pos);
    out += s.text;
    pos = re;
  }
  out += base.substr(pos);
  return out;
}

std::set<std::string> hole_names(const Template& t) {
  std::set<std::string> out;
  for (const auto& h : t.holes()) out.insert(h.name);
  return out;
}

}  // namespace

Rule generalize(const Rule& rule) {
  TemplateTree before, after;
  try {
    before = template_to_tree(rule.match);
    after = template_to_tree(rule.rewrite);
  } catch (const ParseError&) {
    Rule out = rule;
    out.provenance.warnings.push_back("generalize: template not re-parseable, rule unchanged");
    return out;
  }

  auto [n1, n2] = remove_common_context(before, after);
  auto pairs = get_call_pairs(n1, n2, before, after);

  int gen_counter = 0;
  std::vector<Splice> splices1, splices2;
  for (const auto& p : pairs) {
    ArgGeneralization g = generalize_arguments(p, before, after, gen_counter);
    if (!g.changed) continue;
    splices1.push_back({p.before_call->begin, p.before_call->end, g.before_call_text});
    splices2.push_back({p.after_call->begin, p.after_call->end, g.after_call_text});
  }

  std::string text1 = apply_splices(
      std::string_view(before.rendered).substr(n1->begin, n1->end - n1->begin), n1->begin,
      std::move(splices1));
  std::string text2 = apply_splices(
      std::string_view(after.rendered).substr(n2->begin, n2->end - n2->begin), n2->begin,
      std::move(splices2));

  Rule out = rule;
  try {
    out.match = tree_text_to_template(text1, before.sentinels);
    out.rewrite = tree_text_to_template(text2, after.sentinels);
  } catch (const ParseError&) {
    Rule fallback = rule;
    fallback.provenance.warnings.push_back("generalize: result not re-parseable, rule unchanged");
    return fallback;
  }
  auto surviving = hole_names(out.match);
  out.constraints.clear();
  for (const auto& c : rule.constraints)
    if (surviving.count(c.hole_name)) out.constraints.push_back(c);
  if (!out.provenance.has_stage("generalized")) out.provenance.stages.push_back("generalized");
  return out;
}

std::vector<Rule> variants(const Rule& rule) {
  std::vector<Rule> out;
  TemplateTree before, after;
  try {
    before = template_to_tree(rule.match);
    after = template_to_tree(rule.rewrite);
  } catch (const ParseError&) {
    return out;
  }
  auto pairs = get_call_pairs(&before.root, &after.root, before, after);

  std::set<std::string> used_names;
  for (const auto& h : rule.match.holes()) used_names.insert(h.name);
  for (const auto& h : rule.rewrite.holes()) used_names.insert(h.name);
  int next_args = 0;
  auto fresh_args_hole = [&]() {
    std::string name;
    do {
      name = "args" + std::to_string(next_args++);
    } while (used_names.count(name));
    used_names.insert(name);
    return Hole{name, HoleKind::Args};
  };

  for (const auto& p : pairs) {
    const SyntaxNode& c1 = *p.before_call;
    auto items1 = arg_items(c1, before);
    for (size_t k = 0; k < items1.size(); ++k) {
      if (!items1[k].is_keyword) continue;
      bool insert_before = k == 0 || !items1[k - 1].is_args_hole;
      bool insert_after = k + 1 >= items1.size() || !items1[k + 1].is_args_hole;
      if (!insert_before && !insert_after) continue;

      TemplateTree vb = before, va = after;
      std::vector<std::string> mirror_holes;  // sentinels to add to the rewrite call
      std::vector<std::string> args1;
      for (size_t i = 0; i < items1.size(); ++i) {
        if (i == k && insert_before) {
          Hole h = fresh_args_hole();
          args1.push_back(vb.sentinel_for(h));
          mirror_holes.push_back(va.sentinel_for(h));
        }
        args1.push_back(items1[i].text);
        if (i == k && insert_after) {
          Hole h = fresh_args_hole();
          args1.push_back(vb.sentinel_for(h));
          mirror_holes.push_back(va.sentinel_for(h));
        }
      }
      std::string callee1 = c1.children.empty() ? "" : node_text(c1.children[0], vb);
      Splice s1{c1.begin, c1.end, render_call(callee1, args1)};

      // Mirror the new holes into the paired rewrite call, before keywords.
      const SyntaxNode& c2 = *p.after_call;
      auto items2 = arg_items(c2, va);
      std::vector<std::string> args2;
      size_t insert_pos = items2.size();
      for (size_t i = 0; i < items2.size(); ++i)
        if (items2[i].is_keyword) {
          insert_pos = i;
          break;
        }
      for (size_t i = 0; i < items2.size(); ++i) {
        if (i == insert_pos)
          for (const auto& nh : mirror_holes) args2.push_back(nh);
        args2.push_back(items2[i].text);
      }
      if (insert_pos == items2.size())
        for (const auto& nh : mirror_holes) args2.push_back(nh);
      std::string callee2 = c2.children.empty() ? "" : node_text(c2.children[0], va);
      Splice s2{c2.begin, c2.end, render_call(callee2, args2)};

      std::string text1 = apply_splices(vb.rendered, 0, {s1});
      std::string text2 = apply_splices(va.rendered, 0, {s2});
      Rule v = rule;
      try {
        v.match = tree_text_to_template(text1, vb.sentinels);
        v.rewrite = tree_text_to_template(text2, va.sentinels);
      } catch (const ParseError&) {
        continue;
      }
      if (!v.provenance.has_stage("variant")) v.provenance.stages.push_back("variant");
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace apimig
