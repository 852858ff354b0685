#include "apimig/template_lang.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "apimig/text.hpp"

namespace apimig {

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool valid_hole_name(std::string_view name) {
  if (name.empty() || !is_ident_start(name[0])) return false;
  return std::all_of(name.begin(), name.end(), is_word_char);
}

std::string escape_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\')
      out += "\\\\";
    else if (c == '\n')
      out += "\\n";
    else
      out.push_back(c);
  }
  return out;
}

std::string unescape_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char n = s[i + 1];
      if (n == 'n') {
        out.push_back('\n');
        ++i;
        continue;
      }
      if (n == '\\') {
        out.push_back('\\');
        ++i;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace

bool is_args_hole_name(std::string_view name) {
  auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (name.substr(0, 4) == "args" && all_digits(name.substr(4))) return true;
  if (name.substr(0, 9) == "gen_args_" && name.size() > 9 && all_digits(name.substr(9)))
    return true;
  return false;
}

std::vector<Hole> Template::holes() const {
  std::vector<Hole> out;
  for (const auto& p : parts) {
    if (!p.is_hole) continue;
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const Hole& h) { return h.name == p.hole.name; });
    if (!seen) out.push_back(p.hole);
  }
  return out;
}

std::optional<Hole> Template::find_hole(std::string_view name) const {
  for (const auto& p : parts)
    if (p.is_hole && p.hole.name == name) return p.hole;
  return std::nullopt;
}

void Template::push_literal(std::string_view text) {
  if (text.empty()) return;
  if (!parts.empty() && !parts.back().is_hole) {
    parts.back().text += text;
    return;
  }
  Part p;
  p.is_hole = false;
  p.text = std::string(text);
  parts.push_back(std::move(p));
}

void Template::push_hole(const Hole& h) {
  if (!parts.empty() && parts.back().is_hole)
    throw ParseError("adjacent holes :[" + parts.back().hole.name + "] and :[" + h.name + "]", 0);
  for (const auto& p : parts) {
    if (p.is_hole && p.hole.name == h.name && p.hole.kind != h.kind)
      throw ParseError("hole `" + h.name + "` used with two different kinds", 0);
  }
  Part p;
  p.is_hole = true;
  p.hole = h;
  parts.push_back(std::move(p));
}

bool Provenance::has_stage(std::string_view s) const {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

std::string Provenance::stage_string() const {
  std::string out;
  for (const auto& s : stages) {
    if (!out.empty()) out += "+";
    out += s;
  }
  return out;
}

Template parse_template(std::string_view text) {
  Template t;
  size_t i = 0;
  size_t lit_begin = 0;
  while (i < text.size()) {
    if (text[i] == ':' && i + 1 < text.size() && text[i + 1] == '[') {
      size_t hole_at = i;
      t.push_literal(text.substr(lit_begin, i - lit_begin));
      bool alnum = i + 2 < text.size() && text[i + 2] == '[';
      size_t name_begin = i + (alnum ? 3 : 2);
      std::string_view closer = alnum ? "]]" : "]";
      size_t name_end = text.find(closer, name_begin);
      if (name_end == std::string_view::npos)
        throw ParseError("unterminated hole", hole_at);
      std::string_view name = text.substr(name_begin, name_end - name_begin);
      if (name.empty()) throw ParseError("empty hole name", hole_at);
      if (!valid_hole_name(name))
        throw ParseError("invalid hole name `" + std::string(name) + "`", hole_at);
      Hole h;
      h.name = std::string(name);
      if (alnum)
        h.kind = HoleKind::Alnum;
      else
        h.kind = is_args_hole_name(name) ? HoleKind::Args : HoleKind::Balanced;
      try {
        t.push_hole(h);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), hole_at);
      }
      i = name_end + closer.size();
      lit_begin = i;
    } else {
      ++i;
    }
  }
  t.push_literal(text.substr(lit_begin));
  return t;
}

std::string print_hole(const Hole& h) {
  if (h.kind == HoleKind::Alnum) return ":[[" + h.name + "]]";
  return ":[" + h.name + "]";
}

std::string print_template(const Template& t) {
  std::string out;
  for (const auto& p : t.parts) out += p.is_hole ? print_hole(p.hole) : p.text;
  return out;
}

std::optional<std::string> check_rule(const Rule& r) {
  std::map<std::string, HoleKind> kinds;
  for (const Template* t : {&r.match, &r.rewrite}) {
    for (const auto& p : t->parts) {
      if (!p.is_hole) continue;
      auto it = kinds.find(p.hole.name);
      if (it == kinds.end())
        kinds[p.hole.name] = p.hole.kind;
      else if (it->second != p.hole.kind)
        return "hole `" + p.hole.name + "` used with two different kinds";
    }
  }
  for (const auto& c : r.constraints) {
    if (!r.match.find_hole(c.hole_name))
      return "constraint on hole `" + c.hole_name + "` absent from match template";
  }
  return std::nullopt;
}

Rule parse_rule(std::string_view text) {
  Rule r;
  bool saw_match = false, saw_rewrite = false;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    ++line_no;
    size_t next = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    auto starts = [&](std::string_view key) { return line.substr(0, key.size()) == key; };
    if (line.empty() || line[0] == '#') {
      // comment / blank, ignored (provenance lives here)
    } else if (starts("match:")) {
      r.match = parse_template(unescape_line(trim(line.substr(6))));
      saw_match = true;
    } else if (starts("rewrite:")) {
      r.rewrite = parse_template(unescape_line(trim(line.substr(8))));
      saw_rewrite = true;
    } else if (starts("where:")) {
      std::string body = normalize_ws(line.substr(6));
      // <hole>.type == <dotted-name>; hole written as :[[x]], :[x], or bare x
      size_t t = body.find(".type");
      size_t eq = body.find("==");
      if (t == std::string::npos || eq == std::string::npos || eq < t)
        throw ParseError("malformed where clause on line " + std::to_string(line_no), pos);
      std::string hole_text = normalize_ws(body.substr(0, t));
      std::string type_name = normalize_ws(body.substr(eq + 2));
      if (type_name.empty())
        throw ParseError("missing type name in where clause on line " + std::to_string(line_no), pos);
      std::string hole_name = hole_text;
      if (hole_text.size() >= 2 && hole_text[0] == ':' && hole_text[1] == '[') {
        Template h = parse_template(hole_text);
        if (h.parts.size() != 1 || !h.parts[0].is_hole)
          throw ParseError("malformed hole in where clause on line " + std::to_string(line_no), pos);
        hole_name = h.parts[0].hole.name;
      }
      Constraint c;
      c.hole_name = hole_name;
      c.kind = ConstraintKind::TypeEquals;
      c.type_name = type_name;
      r.constraints.push_back(std::move(c));
    } else if (!normalize_ws(line).empty()) {
      throw ParseError("unrecognized rule line " + std::to_string(line_no), pos);
    }
    pos = next;
  }
  if (!saw_match || !saw_rewrite) throw ParseError("rule needs match: and rewrite: lines", 0);
  if (auto err = check_rule(r)) throw ParseError(*err, 0);
  return r;
}

std::string print_rule(const Rule& r) {
  std::ostringstream out;
  out << "match: " << escape_line(print_template(r.match)) << "\n";
  out << "rewrite: " << escape_line(print_template(r.rewrite)) << "\n";
  for (const auto& c : r.constraints) {
    Hole h = r.match.find_hole(c.hole_name).value_or(Hole{c.hole_name, HoleKind::Alnum});
    out << "where: " << print_hole(h) << ".type == " << c.type_name << "\n";
  }
  return out.str();
}

namespace {

std::map<std::string, std::string> canonical_renaming(const Rule& r) {
  std::map<std::string, std::string> ren;
  int plain = 0, args = 0;
  for (const Template* t : {&r.match, &r.rewrite}) {
    for (const auto& p : t->parts) {
      if (!p.is_hole || ren.count(p.hole.name)) continue;
      if (p.hole.kind == HoleKind::Args)
        ren[p.hole.name] = "args" + std::to_string(args++);
      else
        ren[p.hole.name] = "x" + std::to_string(plain++);
    }
  }
  return ren;
}

Template rename_template(const Template& t, const std::map<std::string, std::string>& ren) {
  Template out = t;
  for (auto& p : out.parts)
    if (p.is_hole) p.hole.name = ren.at(p.hole.name);
  return out;
}

bool templates_alpha_equal(const Template& a, const Template& b,
                           std::map<std::string, std::string>& fwd,
                           std::map<std::string, std::string>& bwd, bool loose) {
  auto norm_parts = [&](const Template& t) {
    std::vector<Template::Part> ps;
    for (size_t i = 0; i < t.parts.size(); ++i) {
      Template::Part p = t.parts[i];
      if (!p.is_hole && loose) {
        std::string s = collapse_ws(p.text);
        bool prev_hole = i > 0 && t.parts[i - 1].is_hole;
        bool next_hole = i + 1 < t.parts.size() && t.parts[i + 1].is_hole;
        if ((prev_hole || i == 0) && !s.empty() && s.front() == ' ') s.erase(s.begin());
        if ((next_hole || i + 1 == t.parts.size()) && !s.empty() && s.back() == ' ') s.pop_back();
        p.text = s;
        if (p.text.empty()) continue;
      }
      ps.push_back(p);
    }
    return ps;
  };
  auto pa = norm_parts(a);
  auto pb = norm_parts(b);
  if (pa.size() != pb.size()) return false;
  for (size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].is_hole != pb[i].is_hole) return false;
    if (!pa[i].is_hole) {
      if (pa[i].text != pb[i].text) return false;
      continue;
    }
    if (pa[i].hole.kind != pb[i].hole.kind) return false;
    const std::string& na = pa[i].hole.name;
    const std::string& nb = pb[i].hole.name;
    auto f = fwd.find(na);
    auto g = bwd.find(nb);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[na] = nb;
      bwd[nb] = na;
    } else if (f == fwd.end() || g == bwd.end() || f->second != nb || g->second != na) {
      return false;
    }
  }
  return true;
}

bool alpha_equivalent_impl(const Rule& a, const Rule& b, bool loose) {
  std::map<std::string, std::string> fwd, bwd;
  if (!templates_alpha_equal(a.match, b.match, fwd, bwd, loose)) return false;
  if (!templates_alpha_equal(a.rewrite, b.rewrite, fwd, bwd, loose)) return false;
  auto canon = [&](const Rule& r, const std::map<std::string, std::string>& ren, bool apply) {
    std::multiset<std::string> out;
    for (const auto& c : r.constraints) {
      std::string name = c.hole_name;
      if (apply) {
        auto it = ren.find(name);
        if (it != ren.end()) name = it->second;
      }
      out.insert(name + "|" + c.type_name);
    }
    return out;
  };
  return canon(a, fwd, true) == canon(b, fwd, false);
}

}  // namespace

Rule alpha_normalize(const Rule& r) {
  auto ren = canonical_renaming(r);
  Rule out = r;
  out.match = rename_template(r.match, ren);
  out.rewrite = rename_template(r.rewrite, ren);
  for (auto& c : out.constraints) {
    auto it = ren.find(c.hole_name);
    if (it != ren.end()) c.hole_name = it->second;
  }
  std::sort(out.constraints.begin(), out.constraints.end(),
            [](const Constraint& a, const Constraint& b) {
              return std::tie(a.hole_name, a.type_name) < std::tie(b.hole_name, b.type_name);
            });
  return out;
}

bool alpha_equivalent(const Rule& a, const Rule& b) { return alpha_equivalent_impl(a, b, false); }

bool alpha_equivalent_loose(const Rule& a, const Rule& b) {
  return alpha_equivalent_impl(a, b, true);
}

}  // namespace apimig
