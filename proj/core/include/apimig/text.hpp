#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace apimig {

bool is_word_char(char c);
bool is_space_char(char c);

/// Collapses every whitespace run to a single space. Does not trim.
std::string collapse_ws(std::string_view s);

/// Collapses whitespace runs and trims leading/trailing whitespace.
/// The comparison form used wherever "modulo elastic whitespace" applies.
std::string normalize_ws(std::string_view s);

/// Trims leading/trailing whitespace only.
std::string trim(std::string_view s);

/// Word tokens ([A-Za-z0-9_]+ runs) of `s`, in order.
std::vector<std::string> word_tokens(std::string_view s);

/// Jaccard similarity of the word-token sets of two strings.
double token_jaccard(std::string_view a, std::string_view b);

/// Whether `token` occurs in `s` as a whole word (not inside a larger word).
bool contains_word(std::string_view s, std::string_view token);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace apimig
