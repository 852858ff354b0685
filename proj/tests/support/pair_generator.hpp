#pragma once

// Random before/after statement pairs for the inference round-trip
// property. Pairs are realistic single-statement API edits: renamed
// callees, added/removed/renamed keyword arguments, changed receivers,
// wrapped results.

#include <random>
#include <string>

#include "apimig/pr_ingest.hpp"
#include "apimig/srcparse.hpp"

namespace gen {

struct StatementPair {
  std::string before;
  std::string after;
};

inline std::string pick(std::mt19937& rng, std::initializer_list<const char*> xs) {
  auto it = xs.begin();
  std::advance(it, static_cast<long>(rng() % xs.size()));
  return *it;
}

inline StatementPair random_pair(std::mt19937& rng) {
  std::string recv = pick(rng, {"df", "obj", "series", "frame", "data"});
  std::string method = pick(rng, {"append", "read_csv", "set_index", "apply", "fit"});
  std::string arg0 = pick(rng, {"x", "path", "42", "'name'", "values"});
  std::string kw_name = pick(rng, {"axis", "inplace", "sep", "dtype"});
  std::string kw_val = pick(rng, {"0", "True", "'t'", "col"});

  std::string call = recv + "." + method + "(" + arg0 + ", " + kw_name + "=" + kw_val + ")";
  std::string wrapper = pick(rng, {"assign", "return", "expr", "assert"});
  auto wrap = [&](const std::string& c) {
    if (wrapper == "assign") return "out = " + c;
    if (wrapper == "return") return "return " + c;
    if (wrapper == "assert") return "assert " + c;
    return c;
  };

  std::string mutated;
  switch (rng() % 6) {
    case 0:  // rename the method
      mutated = recv + "." + pick(rng, {"concat", "read_table", "reindex", "transform"}) + "(" +
                arg0 + ", " + kw_name + "=" + kw_val + ")";
      break;
    case 1:  // drop the keyword
      mutated = recv + "." + method + "(" + arg0 + ")";
      break;
    case 2:  // add a keyword
      mutated = recv + "." + method + "(" + arg0 + ", " + kw_name + "=" + kw_val +
                ", copy=False)";
      break;
    case 3:  // change the keyword value
      mutated = recv + "." + method + "(" + arg0 + ", " + kw_name + "=other)";
      break;
    case 4:  // change the receiver
      mutated = "pd." + method + "(" + arg0 + ", " + kw_name + "=" + kw_val + ")";
      break;
    default:  // wrap in a module-level helper
      mutated = "lib.wrap(" + call + ")";
      break;
  }

  StatementPair p;
  p.before = wrap(call);
  p.after = wrap(mutated);
  return p;
}

inline apimig::ChangePair to_change_pair(const StatementPair& p, const std::string& pr_id) {
  apimig::ChangePair pair;
  pair.before_text = p.before;
  pair.after_text = p.after;
  pair.before = apimig::parse_statement(pair.before_text);
  pair.after = apimig::parse_statement(pair.after_text);
  pair.pr_id = pr_id;
  return pair;
}

}  // namespace gen
