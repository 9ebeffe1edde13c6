#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vudetect/commit.hpp"
#include "vudetect/http.hpp"
#include "vudetect/vulnerability.hpp"

namespace vudetect {

inline constexpr const char* kApiTokenEnv = "VUDETECT_API_TOKEN";

struct LiveConfig {
  std::string api_base = "https://api.github.com";
  /// Bearer token; read from VUDETECT_API_TOKEN by the CLI.
  std::string token;
  std::size_t workers = 4;
  double requests_per_second = 1.0;
  std::size_t burst = 4;
  std::size_t per_page = 100;
  std::size_t max_pages = 10;
  RetryPolicy retry;
};

/// Crawls the repository-hosting REST API: commit search for candidates,
/// commit detail for the changed files and their patches, and file contents
/// at the parent and fixing revisions.
class LiveCommitSource {
 public:
  LiveCommitSource(LiveConfig cfg, std::shared_ptr<HttpTransport> transport,
                   Sleeper sleeper = real_sleeper(),
                   WallClock wall_clock = &std::chrono::system_clock::now,
                   SteadyClock steady_clock = &std::chrono::steady_clock::now);

  /// Records whose commit message matches one of the type's keywords, sorted
  /// by (repo_url, sha) and truncated to `limit`.
  std::vector<CommitRecord> search(VulnerabilityType type, const KeywordTable& keywords,
                                   std::size_t limit);

  /// GET with rate limiting, rate-limit header handling and exponential
  /// backoff on transport failures and 5xx responses. Throws NetworkError once
  /// retries are exhausted or on a non-retryable status.
  HttpResponse fetch(const std::string& url, bool raw_content = false);

 private:
  struct Candidate {
    std::string full_name;
    std::string repo_url;
    std::string sha;
    std::string message;
  };

  std::vector<Candidate> search_candidates(const std::string& keyword);
  std::optional<CommitRecord> assemble(const Candidate& c, VulnerabilityType type);

  LiveConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
  WallClock wall_clock_;
  RateLimiter limiter_;
};

/// Extracts the rel="next" target from an RFC 8288 Link header.
std::string next_link(const std::string& link_header);

}  // namespace vudetect
