#include "vudetect/live_source.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>

#include "vudetect/diff.hpp"
#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"
#include "vudetect/parallel.hpp"

namespace vudetect {

namespace {

std::string encode_path(std::string_view path) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (!out.empty() || pos > 0) out.push_back('/');
    out += url_encode(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return out;
}

nlohmann::json parse_body(const HttpResponse& r, const std::string& url) {
  try {
    return nlohmann::json::parse(r.body);
  } catch (const nlohmann::json::exception& e) {
    throw NetworkError("malformed JSON from " + url + ": " + e.what());
  }
}

std::optional<long long> parse_ll(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string next_link(const std::string& link_header) {
  // <https://api...&page=2>; rel="next", <https://...>; rel="last"
  std::size_t pos = 0;
  while (pos < link_header.size()) {
    const auto open = link_header.find('<', pos);
    if (open == std::string::npos) break;
    const auto close = link_header.find('>', open);
    if (close == std::string::npos) break;
    auto end = link_header.find(',', close);
    if (end == std::string::npos) end = link_header.size();
    const std::string params = link_header.substr(close + 1, end - close - 1);
    if (params.find("rel=\"next\"") != std::string::npos) {
      return link_header.substr(open + 1, close - open - 1);
    }
    pos = end + 1;
  }
  return {};
}

LiveCommitSource::LiveCommitSource(LiveConfig cfg, std::shared_ptr<HttpTransport> transport,
                                   Sleeper sleeper, WallClock wall_clock,
                                   SteadyClock steady_clock)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      sleeper_(sleeper),
      wall_clock_(std::move(wall_clock)),
      limiter_(cfg_.requests_per_second, cfg_.burst, sleeper, std::move(steady_clock)) {
  while (!cfg_.api_base.empty() && cfg_.api_base.back() == '/') cfg_.api_base.pop_back();
}

HttpResponse LiveCommitSource::fetch(const std::string& url, bool raw_content) {
  HeaderList headers = {
      {"Accept", raw_content ? "application/vnd.github.raw" : "application/vnd.github+json"},
      {"User-Agent", "vudetect-miner"},
      {"X-GitHub-Api-Version", "2022-11-28"},
  };
  if (!cfg_.token.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.token);

  std::string last_error = "no attempts made";
  for (int attempt = 0; attempt < cfg_.retry.max_attempts; ++attempt) {
    limiter_.acquire();
    HttpResponse r;
    try {
      r = transport_->get(url, headers);
    } catch (const NetworkError& e) {
      last_error = e.what();
      spdlog::warn("GET {} failed ({}), attempt {}", url, e.what(), attempt + 1);
      sleeper_(cfg_.retry.delay_for(attempt));
      continue;
    }

    const auto remaining = parse_ll(r.header("x-ratelimit-remaining"));
    const auto reset = parse_ll(r.header("x-ratelimit-reset"));
    std::optional<std::chrono::milliseconds> reset_wait;
    if (remaining && *remaining == 0 && reset) {
      const auto reset_at = std::chrono::system_clock::time_point(std::chrono::seconds(*reset));
      reset_wait = std::max(std::chrono::milliseconds(0),
                            std::chrono::ceil<std::chrono::milliseconds>(reset_at - wall_clock_()));
      limiter_.pause_for(*reset_wait);
    }

    if (r.status >= 200 && r.status < 300) return r;
    if (r.status == 403 || r.status == 429) {
      if (auto after = parse_ll(r.header("retry-after"))) {
        limiter_.pause_for(std::chrono::seconds(*after));
      } else if (!reset_wait) {
        throw NetworkError("HTTP " + std::to_string(r.status) + " for " + url);
      }
      last_error = "rate limited";
      continue;
    }
    if (r.status >= 500) {
      last_error = "HTTP " + std::to_string(r.status);
      sleeper_(cfg_.retry.delay_for(attempt));
      continue;
    }
    return r;  // other client errors are the caller's to interpret
  }
  throw NetworkError("giving up on " + url + ": " + last_error);
}

std::vector<LiveCommitSource::Candidate> LiveCommitSource::search_candidates(
    const std::string& keyword) {
  std::vector<Candidate> out;
  std::string url = cfg_.api_base + "/search/commits?q=" + url_encode("\"" + keyword + "\"") +
                    "&per_page=" + std::to_string(cfg_.per_page) + "&page=1";
  for (std::size_t page = 0; page < cfg_.max_pages && !url.empty(); ++page) {
    const HttpResponse r = fetch(url);
    if (r.status != 200) throw NetworkError("HTTP " + std::to_string(r.status) + " for " + url);
    const auto body = parse_body(r, url);
    for (const auto& item : body.value("items", nlohmann::json::array())) {
      Candidate c;
      c.sha = item.value("sha", "");
      c.message = item.contains("commit") ? item["commit"].value("message", "") : "";
      if (item.contains("repository")) {
        c.full_name = item["repository"].value("full_name", "");
        c.repo_url = item["repository"].value("html_url", "");
      }
      if (!c.sha.empty() && !c.full_name.empty()) out.push_back(std::move(c));
    }
    url = next_link(r.header("link"));
  }
  return out;
}

std::optional<CommitRecord> LiveCommitSource::assemble(const Candidate& c, VulnerabilityType type) {
  const std::string repo_api = cfg_.api_base + "/repos/" + c.full_name;
  const std::string detail_url = repo_api + "/commits/" + c.sha;
  const HttpResponse detail = fetch(detail_url);
  if (detail.status != 200) {
    throw NetworkError("HTTP " + std::to_string(detail.status) + " for " + detail_url);
  }
  const auto body = parse_body(detail, detail_url);
  const auto parents = body.value("parents", nlohmann::json::array());
  if (parents.empty()) return std::nullopt;
  const std::string parent_sha = parents[0].value("sha", "");

  auto content = [&](const std::string& path, const std::string& ref) -> std::optional<std::string> {
    const HttpResponse r = fetch(repo_api + "/contents/" + encode_path(path) + "?ref=" + ref, true);
    if (r.status == 404) return std::nullopt;
    if (r.status != 200) throw NetworkError("HTTP " + std::to_string(r.status) + " for " + path);
    return r.body;
  };

  CommitRecord rec;
  rec.repo_url = c.repo_url;
  rec.commit_sha = c.sha;
  rec.message = body.contains("commit") ? body["commit"].value("message", c.message) : c.message;
  rec.vuln_type = type;
  for (const auto& f : body.value("files", nlohmann::json::array())) {
    const std::string path = f.value("filename", "");
    const std::string status = f.value("status", "");
    const std::string patch = f.value("patch", "");
    if (!ends_with(path, ".py") || patch.empty()) continue;
    if (status == "added" || status == "removed") continue;
    const std::string old_path = f.value("previous_filename", path);
    auto old_src = content(old_path, parent_sha);
    auto new_src = content(path, c.sha);
    if (!old_src || !new_src) {
      spdlog::warn("skipping {}@{}: content unavailable", path, c.sha);
      continue;
    }
    FileChange fc;
    fc.path = path;
    fc.old_source = std::move(*old_src);
    fc.new_source = std::move(*new_src);
    fc.hunks = parse_unified_patch(patch);
    rec.files.push_back(std::move(fc));
  }
  if (rec.files.empty()) return std::nullopt;
  return rec;
}

std::vector<CommitRecord> LiveCommitSource::search(VulnerabilityType type,
                                                   const KeywordTable& keywords,
                                                   std::size_t limit) {
  if (limit == 0) return {};
  std::map<std::pair<std::string, std::string>, Candidate> unique;
  for (const auto& kw : keywords.keywords(type)) {
    for (auto& c : search_candidates(kw)) {
      if (!keywords.matches(type, c.message)) continue;
      auto key = std::make_pair(c.repo_url, c.sha);
      unique.try_emplace(std::move(key), std::move(c));
    }
  }
  std::vector<Candidate> ordered;
  for (auto& [_, c] : unique) ordered.push_back(std::move(c));

  // Assemble in sorted order, a chunk at a time, until `limit` records exist.
  std::vector<CommitRecord> out;
  const std::size_t chunk = std::max<std::size_t>(1, cfg_.workers) * 2;
  for (std::size_t begin = 0; begin < ordered.size() && out.size() < limit; begin += chunk) {
    const std::size_t end = std::min(ordered.size(), begin + chunk);
    std::vector<std::optional<CommitRecord>> results(end - begin);
    parallel_for(results.size(), cfg_.workers,
                 [&](std::size_t i) { results[i] = assemble(ordered[begin + i], type); });
    for (auto& r : results) {
      if (r && out.size() < limit) out.push_back(std::move(*r));
    }
  }
  sort_records(out);
  return out;
}

}  // namespace vudetect
