#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "apimig/srcparse.hpp"
#include "apimig/template_lang.hpp"

namespace apimig {

/// A template re-parsed as a syntax tree, with holes lexed as opaque
/// identifier sentinels (`__h0__`, ...).
struct TemplateTree {
  std::string rendered;                    // sentinel form of the template
  SyntaxNode root;                         // parse of `rendered`
  std::map<std::string, Hole> sentinels;   // sentinel name -> original hole
  std::map<std::string, std::string> by_hole;  // hole name -> sentinel

  std::string sentinel_for(const Hole& h);  // registers new holes as needed
};

/// Renders a template in sentinel form and parses it. Throws ParseError
/// when the rendered form is not parseable as one statement.
TemplateTree template_to_tree(const Template& t);

/// Converts a sentinel-form string back into a template.
Template tree_text_to_template(std::string_view text,
                               const std::map<std::string, Hole>& sentinels);

/// Strips identical statement wrappers from both sides: unwraps returns,
/// conditionals and asserts with identical wrapper text, and assignment
/// targets that are identical and unused in the remaining expressions.
/// Applies the first possible unwrapping repeatedly.
std::pair<const SyntaxNode*, const SyntaxNode*> remove_common_context(const TemplateTree& before,
                                                                      const TemplateTree& after);

struct CallPair {
  const SyntaxNode* before_call = nullptr;
  const SyntaxNode* after_call = nullptr;
  double cost = 0.0;
};

/// Optimal (Hungarian) pairing of call nodes under cost 0 for equal callee
/// names, else 1 - token-Jaccard of the argument texts. Pairs costing >= 0.9
/// are discarded.
std::vector<CallPair> get_call_pairs(const SyntaxNode* n1, const SyntaxNode* n2,
                                     const TemplateTree& before, const TemplateTree& after);

struct ArgGeneralization {
  bool changed = false;
  std::string before_call_text;  // sentinel form
  std::string after_call_text;
};

/// Replaces maximal runs (length >= 2) of arguments whose template text is
/// identical across the pair by one fresh Args hole per run, and reorders
/// rewrite-side keyword arguments to the end.
ArgGeneralization generalize_arguments(const CallPair& pair, TemplateTree& before,
                                       TemplateTree& after, int& gen_counter);

/// Full generalization pipeline. On re-parse failure the input rule is
/// returned unchanged with a provenance warning.
Rule generalize(const Rule& rule);

/// Variant rules inserting Args holes around each concrete keyword argument
/// of the match template's calls (opt-in; stage tag `variant`).
std::vector<Rule> variants(const Rule& rule);

}  // namespace apimig
