#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace apimig {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
  size_t offset;
};

/// Hole kinds. Alnum holes render as `:[[name]]` and bind identifier-like
/// tokens; Balanced holes render as `:[name]` and bind delimiter-balanced
/// spans. An Args hole is a Balanced hole flagged as an argument-sequence
/// hole: it may bind empty and participates in comma normalization.
enum class HoleKind { Alnum, Balanced, Args };

struct Hole {
  std::string name;
  HoleKind kind = HoleKind::Balanced;

  bool operator==(const Hole&) const = default;
};

/// Whether `name` follows the argument-sequence naming convention
/// (`args`, `args<digits>`, `gen_args_<digits>`).
bool is_args_hole_name(std::string_view name);

struct Template {
  struct Part {
    bool is_hole = false;
    std::string text;  // literal text when !is_hole
    Hole hole;         // valid when is_hole

    bool operator==(const Part&) const = default;
  };

  std::vector<Part> parts;

  bool operator==(const Template&) const = default;

  /// All holes in order of first occurrence.
  std::vector<Hole> holes() const;
  std::optional<Hole> find_hole(std::string_view name) const;
  bool empty() const { return parts.empty(); }

  /// Appends a literal, merging with a preceding literal part.
  void push_literal(std::string_view text);
  /// Appends a hole reference. Throws ParseError on an adjacent hole or a
  /// kind conflict with an earlier hole of the same name.
  void push_hole(const Hole& h);
};

enum class ConstraintKind { TypeEquals };

struct Constraint {
  std::string hole_name;
  ConstraintKind kind = ConstraintKind::TypeEquals;
  std::string type_name;  // dotted name, e.g. `pandas.DataFrame` or `pandas`

  bool operator==(const Constraint&) const = default;
};

/// Origin record carried along the pipeline and persisted in catalogs.
struct Provenance {
  std::string pr_id;
  std::string pr_url;
  std::vector<std::string> stages;       // inferred, generalized, variant, llm-derived
  std::vector<std::string> example_ids;
  std::string before_text;  // originating pair, when known
  std::string after_text;
  std::vector<std::string> warnings;

  bool has_stage(std::string_view s) const;
  std::string stage_string() const;  // stages joined with '+'
};

struct Rule {
  std::string id;
  Template match;
  Template rewrite;
  std::vector<Constraint> constraints;
  Provenance provenance;
};

/// Parses the textual template form. Hole syntax `:[[x]]` is Alnum and
/// `:[x]` is Balanced; Balanced holes named by the args convention are
/// flagged Args. Adjacent literals are merged and empty literals dropped.
Template parse_template(std::string_view text);

/// Inverse of parse_template: parse_template(print_template(t)) == t.
std::string print_template(const Template& t);

/// Renders one hole reference (`:[[x]]` / `:[x]`).
std::string print_hole(const Hole& h);

/// Parses the rule file format:
///   match: <template, one logical line, newlines escaped as \n>
///   rewrite: <template, same escaping>
///   where: <hole>.type == <dotted-name>    (zero or more)
///   # <comment, ignored>
Rule parse_rule(std::string_view text);
std::string print_rule(const Rule& r);

/// Renames holes to a canonical scheme (x0, x1, ... in match-template order,
/// args holes to args0, args1, ...), preserving kinds. Constraints follow
/// the renaming and are sorted.
Rule alpha_normalize(const Rule& r);

/// Structural equality modulo hole renaming. Hole kinds and literals must
/// match exactly; constraints compare as unordered sets after renaming.
bool alpha_equivalent(const Rule& a, const Rule& b);

/// Like alpha_equivalent, but literals compare modulo elastic whitespace:
/// whitespace runs collapse, and whitespace adjacent to a hole reference
/// (which matches zero-or-more source whitespace) is ignored.
bool alpha_equivalent_loose(const Rule& a, const Rule& b);

/// Validation used at parse time and by the filter: every constraint must
/// reference a hole of the match template, and a name may not denote two
/// kinds. Returns an error message or nullopt.
std::optional<std::string> check_rule(const Rule& r);

}  // namespace apimig
