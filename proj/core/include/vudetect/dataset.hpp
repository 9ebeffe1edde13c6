#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vudetect/commit.hpp"
#include "vudetect/labeler.hpp"

namespace vudetect {

struct SplitPolicy {
  double train = 0.70;
  double validation = 0.15;  // the remainder goes to test
  std::uint64_t seed = 0;
  /// Also emit (clean) snippets from the post-fix sources.
  bool include_new_sources = false;

  void validate() const;
};

struct SplitStats {
  std::size_t files = 0;
  std::size_t snippets = 0;
  std::size_t vulnerable = 0;

  double vulnerable_ratio() const {
    return snippets == 0 ? 0.0 : static_cast<double>(vulnerable) / static_cast<double>(snippets);
  }
};

struct Dataset {
  std::vector<LabeledSnippet> train;
  std::vector<LabeledSnippet> validation;
  std::vector<LabeledSnippet> test;
  SplitStats train_stats;
  SplitStats validation_stats;
  SplitStats test_stats;
  std::size_t skipped_files = 0;  // no tokens or hunks out of bounds
};

/// Labels every file of every record and partitions whole files into
/// train/validation/test. Files are ordered by (repo, sha, path) and shuffled
/// with the policy seed; split sizes are rounded from the ratios by file
/// count. Throws EmptyDataset when no snippet results.
Dataset build_dataset(const std::vector<CommitRecord>& records, const SnippetConfig& cfg,
                      const SplitPolicy& policy);

// Dataset files: one JSON object per line
// {tokens:[...], label:0|1, span:[s,e], repo, sha, path, vuln_type}.
nlohmann::ordered_json to_json(const LabeledSnippet& snippet);
LabeledSnippet snippet_from_json(const nlohmann::json& j);
void write_dataset(const std::string& path, const std::vector<LabeledSnippet>& snippets);
std::vector<LabeledSnippet> load_dataset(const std::string& path);

/// The file identity used for splitting and leakage checks.
std::string file_key(const LabeledSnippet& s);

}  // namespace vudetect
