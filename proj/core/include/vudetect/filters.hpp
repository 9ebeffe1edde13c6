#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vudetect/commit.hpp"

namespace vudetect {

struct FilterConfig {
  std::size_t max_file_chars = 10'000;
  std::size_t max_changed_files_per_commit = 5;
  double html_line_fraction_max = 0.2;
  std::vector<std::string> denylist_keywords = {"demo", "example", "exploit",
                                                "ctf",  "hack",    "showcase"};

  /// Throws ConfigError unless thresholds are positive and the fraction is in [0,1].
  void validate() const;
};

enum class RejectReason {
  too_many_files,
  showcase,
  no_files,
  not_python,
  too_long,
  html_heavy,
};

std::string_view to_string(RejectReason reason);

/// Empty optional means "accept".
using FilterVerdict = std::optional<RejectReason>;

FilterVerdict filter_commit(const CommitRecord& commit, const FilterConfig& cfg);
FilterVerdict filter_file(std::string_view path, std::string_view content, const FilterConfig& cfg);

/// Fraction of lines containing an opening or closing tag pattern `<[a-zA-Z/]`.
double html_line_fraction(std::string_view content);

/// Drops files whose normalized old source was already seen for the same
/// vulnerability type (first occurrence wins) and then records left without
/// files. Normalization unifies line endings and trailing whitespace.
std::vector<CommitRecord> dedup_commits(const std::vector<CommitRecord>& records);

std::string normalized_content_hash(std::string_view source);

struct FilterStats {
  std::size_t accepted = 0;
  std::vector<std::pair<std::string, RejectReason>> rejected_commits;  // sha, reason
  std::size_t rejected_files = 0;
};

/// Commit-level rules, then file-level rules; commits left without files
/// are rejected with `no_files`.
std::vector<CommitRecord> apply_filters(const std::vector<CommitRecord>& records,
                                        const FilterConfig& cfg, FilterStats* stats = nullptr);

}  // namespace vudetect
