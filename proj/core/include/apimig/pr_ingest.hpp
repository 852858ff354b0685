#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apimig/srcparse.hpp"

namespace apimig {

struct FileChange {
  std::string path;
  std::optional<std::string> old_content;
  std::optional<std::string> new_content;
  std::string patch;  // unified diff hunks
};

struct PullRequest {
  std::string id;
  std::string url;
  std::string title;
  std::string description;
  std::vector<std::string> discussion;
  std::vector<FileChange> files;
};

PullRequest load_pr_json(std::string_view json_text);
PullRequest load_pr_file(const std::string& path);

struct Hunk {
  size_t old_start = 0;  // 1-based
  size_t old_count = 0;
  size_t new_start = 0;
  size_t new_count = 0;
  struct Line {
    char tag = ' ';  // ' ', '-', '+'
    std::string text;
  };
  std::vector<Line> lines;
};

/// Parses unified-diff hunks. File headers (`--- a/x`, `+++ b/x`,
/// `diff --git ...`) are skipped. Throws ParseError (offset = line number)
/// on a malformed hunk header.
std::vector<Hunk> parse_unified_diff(std::string_view text);

/// Applies hunks to old content, producing the new content. Context lines
/// are trusted over line numbers when they drift by whitespace only.
std::string apply_hunks(std::string_view old_content, const std::vector<Hunk>& hunks);

/// Old/new content of a file change, reconstructing the missing side from
/// the patch when possible. Returns nullopt when neither reconstruction is
/// possible.
std::optional<std::pair<std::string, std::string>> file_contents(const FileChange& fc);

/// An aligned before/after statement pair extracted from a diff.
struct ChangePair {
  SyntaxNode before;  // spans into before_text
  SyntaxNode after;   // spans into after_text
  std::string before_text;
  std::string after_text;
  std::string file;
  std::string pr_id;
  std::string example_id;          // set for llm-derived pairs
  std::string before_file;         // full before-side file, when available
  size_t before_offset = 0;        // offset of before_text within before_file
};

/// Public API names affected by the PR: enclosing function names of changed
/// lines, excluding test functions and private namespaces.
std::set<std::string> affected_apis(const PullRequest& pr);

/// Aligns removed/added logical statements per hunk (index-wise when counts
/// match, else greedy by token overlap) and keeps pairs whose call names
/// intersect `apis`.
std::vector<ChangePair> relevant_change_pairs(const PullRequest& pr,
                                              const std::set<std::string>& apis);

/// Alignment heuristic shared with transition-example ingestion: pairs of
/// (before index, after index).
std::vector<std::pair<size_t, size_t>> align_statements(const std::vector<std::string>& before,
                                                        const std::vector<std::string>& after);

}  // namespace apimig
