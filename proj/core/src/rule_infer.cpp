#include "apimig/rule_infer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "apimig/text.hpp"

namespace apimig {

namespace {

enum class Role { Target, Value, PositionalArg, KwValue, Element, AttrRoot };

bool uppercase_initial(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

struct Seg {
  bool is_hole = false;
  std::string text;  // literal, whitespace-collapsed
  int hole_id = -1;
  const SyntaxNode* node = nullptr;  // occurrence node for holes
};

struct HoleInfo {
  std::string key;  // collapsed source text
  HoleKind kind = HoleKind::Balanced;
};

class Inference {
 public:
  explicit Inference(const ChangePair& pair) : pair_(pair) {}

  std::optional<Rule> run(const TypeOracle& oracle) {
    if (normalize_ws(pair_.before_text) == normalize_ws(pair_.after_text)) return std::nullopt;
    if (pair_.before.kind == NodeKind::Other && pair_.after.kind == NodeKind::Other)
      return std::nullopt;

    const SyntaxNode* roots[2] = {&pair_.before, &pair_.after};
    // Identical statement wrappers with no abstractable content of their own
    // start the decomposition at the expression level.
    if (roots[0]->kind == NodeKind::Return && roots[1]->kind == NodeKind::Return &&
        roots[0]->children.size() == 1 && roots[1]->children.size() == 1) {
      roots[0] = &roots[0]->children[0];
      roots[1] = &roots[1]->children[0];
    }
    emit_structure(*roots[0], 0, sides_[0]);
    emit_structure(*roots[1], 1, sides_[1]);
    refine();
    return build(oracle);
  }

 private:
  std::string_view src(int side) const { return side == 0 ? pair_.before_text : pair_.after_text; }

  void lit(std::vector<Seg>& out, std::string text) {
    if (text.empty()) return;
    if (!out.empty() && !out.back().is_hole) {
      out.back().text += text;
      return;
    }
    Seg s;
    s.text = std::move(text);
    out.push_back(std::move(s));
  }

  bool abstractable(const SyntaxNode& node, int side) const {
    switch (node.kind) {
      case NodeKind::Name:
        return !uppercase_initial(node.text(src(side)));
      case NodeKind::Literal:
      case NodeKind::Call:
      case NodeKind::Attribute:
      case NodeKind::Subscript:
      case NodeKind::Tuple:
      case NodeKind::ListExpr:
      case NodeKind::DictExpr:
      case NodeKind::Other:
        return true;
      default:
        return false;
    }
  }

  HoleKind kind_for(const SyntaxNode& node, Role role, int side) const {
    std::string text = collapse_ws(node.text(src(side)));
    if (node.kind == NodeKind::Name)
      return role == Role::KwValue ? HoleKind::Balanced : HoleKind::Alnum;
    if (node.kind == NodeKind::Literal &&
        std::all_of(text.begin(), text.end(), is_word_char) && !text.empty())
      return HoleKind::Alnum;
    return HoleKind::Balanced;
  }

  void emit_child(const SyntaxNode& node, Role role, int side, std::vector<Seg>& out) {
    if (!abstractable(node, side)) {
      emit_structure(node, side, out);
      return;
    }
    std::string key = collapse_ws(node.text(src(side)));
    auto it = by_text_.find(key);
    int id;
    if (it == by_text_.end()) {
      id = static_cast<int>(holes_.size());
      holes_.push_back({key, kind_for(node, role, side)});
      by_text_[key] = id;
    } else {
      id = it->second;
    }
    Seg s;
    s.is_hole = true;
    s.hole_id = id;
    s.node = &node;
    out.push_back(std::move(s));
  }

  void emit_callee(const SyntaxNode& callee, int side, std::vector<Seg>& out) {
    std::string_view s = src(side);
    if (callee.kind == NodeKind::Attribute && callee.children.size() == 1) {
      const SyntaxNode& value = callee.children[0];
      if (value.kind == NodeKind::Attribute)
        emit_callee(value, side, out);
      else
        emit_child(value, Role::AttrRoot, side, out);
      lit(out, collapse_ws(s.substr(value.end, callee.end - value.end)));
      return;
    }
    if (callee.kind == NodeKind::Name) {
      lit(out, std::string(callee.text(s)));
      return;
    }
    emit_child(callee, Role::AttrRoot, side, out);
  }

  void emit_structure(const SyntaxNode& node, int side, std::vector<Seg>& out) {
    std::string_view s = src(side);
    if (node.children.empty()) {
      lit(out, collapse_ws(node.text(s)));
      return;
    }
    size_t pos = node.begin;
    for (size_t i = 0; i < node.children.size(); ++i) {
      const SyntaxNode& c = node.children[i];
      lit(out, collapse_ws(s.substr(pos, c.begin - pos)));
      dispatch(node, i, c, side, out);
      pos = c.end;
    }
    lit(out, collapse_ws(s.substr(pos, node.end - pos)));
  }

  void dispatch(const SyntaxNode& parent, size_t idx, const SyntaxNode& child, int side,
                std::vector<Seg>& out) {
    switch (parent.kind) {
      case NodeKind::Call:
        if (idx == 0)
          emit_callee(child, side, out);
        else if (child.kind == NodeKind::Keyword)
          emit_structure(child, side, out);  // keyword name stays in the gap
        else
          emit_child(child, Role::PositionalArg, side, out);
        return;
      case NodeKind::Keyword:
        emit_child(child, Role::KwValue, side, out);
        return;
      case NodeKind::Attribute:
        emit_child(child, Role::AttrRoot, side, out);
        return;
      case NodeKind::Subscript:
        emit_child(child, idx == 0 ? Role::AttrRoot : Role::Element, side, out);
        return;
      case NodeKind::Assign:
        emit_child(child, idx == 0 ? Role::Target : Role::Value, side, out);
        return;
      case NodeKind::Tuple:
      case NodeKind::ListExpr:
      case NodeKind::DictExpr:
      case NodeKind::Other:
        emit_child(child, Role::Element, side, out);
        return;
      case NodeKind::Return:
      case NodeKind::Assert:
      case NodeKind::ExprStmt:
        emit_child(child, Role::Value, side, out);
        return;
      case NodeKind::If:
        if (idx == 0)
          emit_child(child, Role::Value, side, out);
        else
          emit_structure(child, side, out);
        return;
      default:  // def/class/module bodies stay structural
        emit_structure(child, side, out);
        return;
    }
  }

  // Sides on which hole `id` currently occurs: bit 0 = before, bit 1 = after.
  int presence(int id) const {
    int mask = 0;
    for (int side = 0; side < 2; ++side)
      for (const auto& seg : sides_[side])
        if (seg.is_hole && seg.hole_id == id) mask |= 1 << side;
    return mask;
  }

  void replace_hole(int id, int side, bool decompose) {
    std::vector<Seg> next;
    for (auto& seg : sides_[side]) {
      if (!seg.is_hole || seg.hole_id != id) {
        if (!seg.is_hole)
          lit(next, seg.text);
        else
          next.push_back(seg);
        continue;
      }
      if (decompose) {
        std::vector<Seg> sub;
        emit_structure(*seg.node, side, sub);
        for (auto& s : sub) {
          if (!s.is_hole)
            lit(next, s.text);
          else
            next.push_back(s);
        }
      } else {
        lit(next, collapse_ws(seg.node->text(src(side))));
      }
    }
    sides_[side] = std::move(next);
  }

  void refine() {
    // Phase 1: decompose one-sided holes with structure, so subtrees shared
    // across sides can still meet. Restart after each change.
    bool changed = true;
    while (changed) {
      changed = false;
      for (int id = 0; id < static_cast<int>(holes_.size()) && !changed; ++id) {
        int mask = presence(id);
        if (mask != 1 && mask != 2) continue;
        int side = mask == 1 ? 0 : 1;
        const Seg* occurrence = nullptr;
        for (const auto& seg : sides_[side])
          if (seg.is_hole && seg.hole_id == id) {
            occurrence = &seg;
            break;
          }
        if (occurrence && !occurrence->node->children.empty()) {
          replace_hole(id, side, /*decompose=*/true);
          changed = true;
        }
      }
    }
    // Phase 2: revert what stayed one-sided.
    for (int id = 0; id < static_cast<int>(holes_.size()); ++id) {
      int mask = presence(id);
      if (mask == 1 || mask == 2) replace_hole(id, mask == 1 ? 0 : 1, /*decompose=*/false);
    }
  }

  std::optional<Rule> build(const TypeOracle& oracle) {
    std::map<int, std::string> names;
    int counter = 0;
    for (int side = 0; side < 2; ++side)
      for (const auto& seg : sides_[side])
        if (seg.is_hole && !names.count(seg.hole_id))
          names[seg.hole_id] = "x" + std::to_string(counter++);

    Rule r;
    for (int side = 0; side < 2; ++side) {
      Template& t = side == 0 ? r.match : r.rewrite;
      for (const auto& seg : sides_[side]) {
        if (seg.is_hole)
          t.push_hole({names.at(seg.hole_id), holes_[seg.hole_id].kind});
        else
          t.push_literal(seg.text);
      }
    }

    // Type guards for Alnum holes resolvable at their before-side site.
    FileContext ctx;
    ctx.path = pair_.file;
    ctx.source = pair_.before_file.empty() ? std::string_view(pair_.before_text)
                                           : std::string_view(pair_.before_file);
    size_t offset = pair_.before_file.empty() ? 0 : pair_.before_offset;
    std::set<int> constrained;
    for (const auto& seg : sides_[0]) {
      if (!seg.is_hole || holes_[seg.hole_id].kind != HoleKind::Alnum) continue;
      if (constrained.count(seg.hole_id)) continue;
      constrained.insert(seg.hole_id);
      auto type = oracle.resolve(ctx, offset + seg.node->begin, offset + seg.node->end);
      if (!type) continue;
      Constraint c;
      c.hole_name = names.at(seg.hole_id);
      c.kind = ConstraintKind::TypeEquals;
      c.type_name = *type;
      r.constraints.push_back(std::move(c));
    }

    r.provenance.pr_id = pair_.pr_id;
    r.provenance.stages = {pair_.example_id.empty() ? "inferred" : "llm-derived"};
    if (!pair_.example_id.empty()) r.provenance.example_ids = {pair_.example_id};
    r.provenance.before_text = pair_.before_text;
    r.provenance.after_text = pair_.after_text;
    return r;
  }

  const ChangePair& pair_;
  std::map<std::string, int> by_text_;
  std::vector<HoleInfo> holes_;
  std::vector<Seg> sides_[2];
};

}  // namespace

std::optional<Rule> infer_rule(const ChangePair& pair, const TypeOracle& oracle) {
  Inference inf(pair);
  return inf.run(oracle);
}

}  // namespace apimig
