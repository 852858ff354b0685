#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apimig/template_lang.hpp"
#include "apimig/type_oracle.hpp"

namespace apimig {

/// String/comment syntax of the matched language. The built-in profile
/// covers the target corpus: hash comments, single/double/triple quotes.
struct LangProfile {
  std::string line_comment = "#";
  bool triple_quotes = true;
  static const LangProfile& python();
};

/// Per-byte classification of a source buffer. token[i] is 0 for code and a
/// positive token id for bytes of a string literal or comment (delimiters
/// included). Hole and match boundaries may sit at token edges but never
/// strictly inside one; delimiter balance is counted over code bytes only.
class SourceScan {
 public:
  SourceScan() = default;
  SourceScan(std::string_view source, const LangProfile& profile);

  bool boundary_ok(size_t pos) const {
    return pos == 0 || pos >= token_.size() || token_[pos] == 0 || token_[pos] != token_[pos - 1];
  }
  bool is_code(size_t pos) const { return pos >= token_.size() || token_[pos] == 0; }
  size_t size() const { return token_.size(); }

 private:
  std::vector<uint32_t> token_;
};

struct MatchOptions {
  bool strict_whitespace = false;
};

struct Binding {
  std::string text;
  size_t begin = 0;
  size_t end = 0;
};

struct MatchResult {
  size_t begin = 0;
  size_t end = 0;
  std::map<std::string, Binding> bindings;
};

/// All non-overlapping matches, scanning left to right. Holes bind lazily
/// (shortest first); whitespace runs in the template match nonempty runs in
/// the source, or possibly-empty runs when adjacent to a hole; holes skip
/// leading source whitespace. Repeated hole names must bind byte-identical
/// text. Balanced and Args bindings keep (), [], {} counts equal over code
/// bytes; Args holes may bind empty.
std::vector<MatchResult> match_all(const Template& t, std::string_view source,
                                   const LangProfile& profile = LangProfile::python(),
                                   const MatchOptions& opts = {});

enum class ConstraintOutcome { Pass, Fail, Unknown };

/// Pass iff every constraint's resolved type equals the constraint's type
/// name or has it as a dotted prefix or suffix. Unknown (site not rewritten)
/// as soon as the oracle cannot resolve some constrained binding.
ConstraintOutcome check_constraints(const MatchResult& m, const std::vector<Constraint>& cs,
                                    const TypeOracle& oracle, const FileContext& ctx);

/// Substitutes bindings into a rewrite template. Empty Args bindings are
/// followed by comma normalization: dangling `(,`, `,)`, `,,` collapse.
/// Throws std::runtime_error naming the first unbound hole.
std::string substitute(const Template& rewrite, const std::map<std::string, Binding>& bindings);

struct Edit {
  size_t begin = 0;
  size_t end = 0;
  std::string replacement;
  std::string rule_id;
};

enum class SkipReason { UnknownType, ConstraintFailed };
const char* skip_reason_name(SkipReason r);

struct Skip {
  size_t begin = 0;
  size_t end = 0;
  SkipReason reason = SkipReason::UnknownType;
};

struct RewriteOutcome {
  std::string new_source;
  std::vector<Edit> edits;    // non-overlapping, sorted by begin
  std::vector<Skip> skipped;
};

struct ApplyRuleOptions {
  MatchOptions match;
  /// Permissive mode treats Unknown constraint outcomes as Pass; used for
  /// round-trip validation where no external type source exists.
  bool permissive_constraints = false;
};

/// Single-pass rule application: matches computed left to right on the
/// input, constraint-gated, edits applied in one pass. `path` feeds the
/// oracle's per-file lookups.
RewriteOutcome apply_rule(const Rule& rule, std::string_view source, const TypeOracle& oracle,
                          const std::string& path = "",
                          const LangProfile& profile = LangProfile::python(),
                          const ApplyRuleOptions& opts = {});

}  // namespace apimig
