#include "apimig/type_oracle.hpp"

#include <algorithm>

#include <json.hpp>

#include "apimig/srcparse.hpp"
#include "apimig/text.hpp"

namespace apimig {

namespace {

// Return types of well-known constructors and factory calls, keyed by the
// dotted name after import resolution.
const std::map<std::string, std::string>& signature_table() {
  static const std::map<std::string, std::string> table = {
      {"pandas.read_csv", "pandas.DataFrame"},
      {"pandas.read_table", "pandas.DataFrame"},
      {"pandas.read_json", "pandas.DataFrame"},
      {"pandas.concat", "pandas.DataFrame"},
      {"pandas.DataFrame", "pandas.DataFrame"},
      {"pandas.Series", "pandas.Series"},
      {"pandas.Index", "pandas.Index"},
      {"numpy.array", "numpy.ndarray"},
      {"numpy.zeros", "numpy.ndarray"},
      {"numpy.ones", "numpy.ndarray"},
      {"numpy.arange", "numpy.ndarray"},
  };
  return table;
}

// Dotted name of an attribute chain / bare name, or empty if not a chain.
std::string dotted_name(const SyntaxNode& n, std::string_view src) {
  if (n.kind == NodeKind::Name) return std::string(n.text(src));
  if (n.kind == NodeKind::Attribute && n.children.size() == 1) {
    std::string base = dotted_name(n.children[0], src);
    if (base.empty()) return "";
    return base + "." + n.name;
  }
  return "";
}

// import/assignment environment of one file.
struct FileEnv {
  std::map<std::string, std::string> names;  // imported identifier -> module path
  struct Assigned {
    std::string name;
    std::string type;
    size_t defined_end;  // propagated type applies to later occurrences only
  };
  std::vector<Assigned> assigns;
};

void scan_imports(std::string_view line, FileEnv& env) {
  std::string text = normalize_ws(line);
  if (text.rfind("import ", 0) == 0) {
    // import a.b as c  |  import a.b  (possibly comma separated)
    std::string rest = text.substr(7);
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string item = normalize_ws(rest.substr(pos, (comma == std::string::npos ? rest.size() : comma) - pos));
      if (!item.empty()) {
        size_t as = item.find(" as ");
        if (as != std::string::npos) {
          env.names[normalize_ws(item.substr(as + 4))] = normalize_ws(item.substr(0, as));
        } else {
          std::string head = item.substr(0, item.find('.'));
          env.names[head] = head;
        }
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } else if (text.rfind("from ", 0) == 0) {
    size_t imp = text.find(" import ");
    if (imp == std::string::npos) return;
    std::string module = normalize_ws(text.substr(5, imp - 5));
    std::string rest = text.substr(imp + 8);
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string item = normalize_ws(rest.substr(pos, (comma == std::string::npos ? rest.size() : comma) - pos));
      if (!item.empty() && item != "*") {
        size_t as = item.find(" as ");
        std::string name = as == std::string::npos ? item : normalize_ws(item.substr(as + 4));
        std::string target = as == std::string::npos ? item : normalize_ws(item.substr(0, as));
        env.names[name] = module + "." + target;
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
}

FileEnv build_env(std::string_view source) {
  FileEnv env;
  std::vector<LogicalLine> lines;
  try {
    lines = logical_lines(source);
  } catch (const ParseError&) {
    return env;
  }
  for (const auto& line : lines) {
    std::string_view text = source.substr(line.begin, line.end - line.begin);
    if (text.rfind("import", 0) == 0 || text.rfind("from", 0) == 0) scan_imports(text, env);
  }
  // Propagate call results through assignments, in file order.
  SyntaxNode mod;
  try {
    mod = parse_module(source);
  } catch (const ParseError&) {
    return env;
  }
  std::vector<const SyntaxNode*> stack = {&mod};
  std::vector<const SyntaxNode*> assigns;
  while (!stack.empty()) {
    const SyntaxNode* n = stack.back();
    stack.pop_back();
    if (n->kind == NodeKind::Assign) assigns.push_back(n);
    for (const auto& c : n->children) stack.push_back(&c);
  }
  std::sort(assigns.begin(), assigns.end(),
            [](const SyntaxNode* a, const SyntaxNode* b) { return a->begin < b->begin; });
  for (const SyntaxNode* a : assigns) {
    if (a->children.size() != 2) continue;
    const SyntaxNode& target = a->children[0];
    const SyntaxNode& value = a->children[1];
    if (target.kind != NodeKind::Name || value.kind != NodeKind::Call || value.children.empty())
      continue;
    std::string callee = dotted_name(value.children[0], source);
    if (callee.empty()) continue;
    size_t dot = callee.find('.');
    std::string head = callee.substr(0, dot);
    auto it = env.names.find(head);
    if (it == env.names.end()) continue;
    std::string resolved = it->second + (dot == std::string::npos ? "" : callee.substr(dot));
    auto sig = signature_table().find(resolved);
    if (sig != signature_table().end())
      env.assigns.push_back({std::string(target.text(source)), sig->second, a->end});
  }
  return env;
}

}  // namespace

struct TypeOracle::Impl {
  enum class Backend { AlwaysUnknown, AnnotationMap, ImportHeuristic, Composite };
  Backend backend = Backend::AlwaysUnknown;
  std::map<std::string, std::map<std::string, std::string>> table;
  std::vector<TypeOracle> children;
};

TypeOracle::TypeOracle() : impl_(std::make_shared<Impl>()) {}

TypeOracle TypeOracle::always_unknown() { return TypeOracle(); }

TypeOracle TypeOracle::annotation_map(
    std::map<std::string, std::map<std::string, std::string>> table) {
  TypeOracle o;
  auto impl = std::make_shared<Impl>();
  impl->backend = Impl::Backend::AnnotationMap;
  impl->table = std::move(table);
  o.impl_ = impl;
  return o;
}

TypeOracle TypeOracle::annotation_map_from_json(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text);
  std::map<std::string, std::map<std::string, std::string>> table;
  for (auto& [path, entries] : j.items())
    for (auto& [name, type] : entries.items()) table[path][name] = type.get<std::string>();
  return annotation_map(std::move(table));
}

TypeOracle TypeOracle::import_heuristic() {
  TypeOracle o;
  auto impl = std::make_shared<Impl>();
  impl->backend = Impl::Backend::ImportHeuristic;
  o.impl_ = impl;
  return o;
}

TypeOracle TypeOracle::composite(std::vector<TypeOracle> backends) {
  TypeOracle o;
  auto impl = std::make_shared<Impl>();
  impl->backend = Impl::Backend::Composite;
  impl->children = std::move(backends);
  o.impl_ = impl;
  return o;
}

std::optional<std::string> TypeOracle::resolve(const FileContext& ctx, size_t begin,
                                               size_t end) const {
  if (begin >= end || end > ctx.source.size()) return std::nullopt;
  std::string token(ctx.source.substr(begin, end - begin));
  switch (impl_->backend) {
    case Impl::Backend::AlwaysUnknown:
      return std::nullopt;
    case Impl::Backend::AnnotationMap: {
      for (const std::string& key : {ctx.path, std::string("*")}) {
        auto it = impl_->table.find(key);
        if (it == impl_->table.end()) continue;
        auto e = it->second.find(token);
        if (e != it->second.end()) return e->second;
      }
      return std::nullopt;
    }
    case Impl::Backend::ImportHeuristic: {
      FileEnv env = build_env(ctx.source);
      // Latest call-result assignment completed before this occurrence.
      std::optional<std::string> assigned;
      for (const auto& a : env.assigns)
        if (a.name == token && a.defined_end <= begin) assigned = a.type;
      if (assigned) return assigned;
      auto it = env.names.find(token);
      if (it != env.names.end()) return it->second;
      return std::nullopt;
    }
    case Impl::Backend::Composite: {
      for (const auto& child : impl_->children) {
        auto r = child.resolve(ctx, begin, end);
        if (r) return r;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace apimig
