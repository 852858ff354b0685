#include <doctest.h>

#include "apimig/text.hpp"

using namespace apimig;

TEST_CASE("collapse and normalize whitespace") {
  CHECK(collapse_ws("a  b\n\tc") == "a b c");
  CHECK(normalize_ws("  a  b  ") == "a b");
  CHECK(normalize_ws("\n\t") == "");
}

TEST_CASE("word tokens and jaccard") {
  auto toks = word_tokens("pd.read_csv(f, squeeze=True)");
  CHECK(toks == std::vector<std::string>{"pd", "read_csv", "f", "squeeze", "True"});
  CHECK(token_jaccard("a b c", "a b c") == doctest::Approx(1.0));
  CHECK(token_jaccard("a b", "c d") == doctest::Approx(0.0));
  CHECK(token_jaccard("a b", "b c") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("whole-token containment") {
  CHECK(contains_word("x = read_csv(f)", "read_csv"));
  CHECK_FALSE(contains_word("x = read_csv_chunked(f)", "read_csv"));
  CHECK_FALSE(contains_word("", "read_csv"));
}
