#include "apimig/text.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace apimig {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_space_char(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (is_space_char(s[i])) {
      out.push_back(' ');
      while (i < s.size() && is_space_char(s[i])) ++i;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::string normalize_ws(std::string_view s) {
  std::string c = collapse_ws(s);
  size_t b = c.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  size_t e = c.find_last_not_of(' ');
  return c.substr(b, e - b + 1);
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space_char(s[b])) ++b;
  while (e > b && is_space_char(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    if (is_word_char(s[i])) {
      size_t b = i;
      while (i < s.size() && is_word_char(s[i])) ++i;
      out.emplace_back(s.substr(b, i - b));
    } else {
      ++i;
    }
  }
  return out;
}

double token_jaccard(std::string_view a, std::string_view b) {
  auto ta = word_tokens(a);
  auto tb = word_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  size_t inter = 0;
  for (const auto& t : sa)
    if (sb.count(t)) ++inter;
  size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool contains_word(std::string_view s, std::string_view token) {
  if (token.empty()) return false;
  size_t pos = 0;
  while ((pos = s.find(token, pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || !is_word_char(s[pos - 1]);
    size_t end = pos + token.size();
    bool right_ok = end == s.size() || !is_word_char(s[end]);
    if (left_ok && right_ok) return true;
    pos += 1;
  }
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace apimig
