#pragma once

#include <optional>

#include "apimig/pr_ingest.hpp"
#include "apimig/template_lang.hpp"
#include "apimig/type_oracle.hpp"

namespace apimig {

/// Anti-unifies a before/after statement pair into a single rule.
///
/// Equal-text subtrees on the two sides share one hole; holes left on a
/// single side are decomposed further and ultimately reverted to their
/// concrete text. Callee names, class names (uppercase-initial), and
/// keyword-argument names stay concrete. Type guards are attached to Alnum
/// holes the oracle can resolve in the before-file context.
///
/// Returns nullopt when the pair is textually equal (modulo whitespace) or
/// both sides parse to Other nodes.
std::optional<Rule> infer_rule(const ChangePair& pair, const TypeOracle& oracle);

}  // namespace apimig
