#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apimig {

/// File being analyzed: path (for table lookups) plus full source text.
struct FileContext {
  std::string path;
  std::string_view source;
};

/// Pluggable type resolution for type-guard attachment and checking.
/// Deterministic and read-only after construction; unknown is a value,
/// not an error.
class TypeOracle {
 public:
  TypeOracle();  // AlwaysUnknown

  static TypeOracle always_unknown();
  /// Exact (path, identifier) -> dotted type table. Entries under path "*"
  /// apply to every file.
  static TypeOracle annotation_map(std::map<std::string, std::map<std::string, std::string>> table);
  static TypeOracle annotation_map_from_json(std::string_view json_text);
  /// Tracks `import M as A` / `from M import N` bindings and propagates
  /// assignment results through a small built-in call-signature table
  /// (e.g. pandas.read_csv -> pandas.DataFrame).
  static TypeOracle import_heuristic();
  static TypeOracle composite(std::vector<TypeOracle> backends);

  /// Resolves source[begin, end) to a dotted type name, or nullopt.
  std::optional<std::string> resolve(const FileContext& ctx, size_t begin, size_t end) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace apimig
