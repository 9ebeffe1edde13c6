#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vudetect/commit.hpp"
#include "vudetect/live_source.hpp"
#include "vudetect/vulnerability.hpp"

namespace vudetect {

/// Offline mode: a commits.jsonl-style dump (optionally gzipped).
struct DumpSource {
  std::string path;
};

/// Live mode: an API client (which may sit on a cassette transport).
struct LiveSource {
  std::shared_ptr<LiveCommitSource> client;
};

using CommitSource = std::variant<DumpSource, LiveSource>;

/// Records whose message matches a keyword of `type`, tagged with `type`,
/// sorted by (repo_url, sha) and truncated to `limit`.
std::vector<CommitRecord> select_matching(std::vector<CommitRecord> records,
                                          VulnerabilityType type, const KeywordTable& keywords,
                                          std::size_t limit);

std::vector<CommitRecord> search_commits(VulnerabilityType type, const CommitSource& source,
                                         const KeywordTable& keywords, std::size_t limit);

}  // namespace vudetect
