#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vudetect/vulnerability.hpp"

namespace vudetect {

/// One contiguous change block of a diff, in old-file coordinates.
///
/// For a pure insertion `old_line_count` is 0 and `old_start_line` is the
/// line after which the new lines were inserted (0 = top of file), following
/// the unified-diff convention.
struct DiffHunk {
  std::size_t old_start_line = 0;
  std::size_t old_line_count = 0;
  std::vector<std::string> removed_lines;
  std::vector<std::string> added_lines;

  friend bool operator==(const DiffHunk&, const DiffHunk&) = default;
};

struct FileChange {
  std::string path;
  std::string old_source;
  std::string new_source;
  std::vector<DiffHunk> hunks;

  friend bool operator==(const FileChange&, const FileChange&) = default;
};

struct CommitRecord {
  std::string repo_url;
  std::string commit_sha;
  std::string message;
  /// Unset for raw dump entries that have not been classified yet.
  std::optional<VulnerabilityType> vuln_type;
  std::vector<FileChange> files;

  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

/// Number of lines in `text` (a trailing newline does not start a new line).
std::size_t count_lines(std::string_view text);

/// Byte offset where 1-based `line` starts; lines past the end map to text.size().
std::size_t line_start_offset(std::string_view text, std::size_t line);

/// Repository name (last URL path component) of a repository URL.
std::string repo_name(std::string_view repo_url);

/// Orders by repo_url, then commit_sha.
void sort_records(std::vector<CommitRecord>& records);

// Offline dump / commits.jsonl format: one JSON object per line
// {repo, sha, message, vuln_type, files:[{path, old, new, hunks:[...]}]}.

nlohmann::ordered_json to_json(const CommitRecord& record);
/// Throws DumpFormatError on schema violations.
CommitRecord commit_from_json(const nlohmann::json& j);

std::vector<CommitRecord> load_commits(const std::string& path);
void write_commits(const std::string& path, const std::vector<CommitRecord>& records);

}  // namespace vudetect
