#include "vudetect/search.hpp"

#include "vudetect/error.hpp"

namespace vudetect {

std::vector<CommitRecord> select_matching(std::vector<CommitRecord> records,
                                          VulnerabilityType type, const KeywordTable& keywords,
                                          std::size_t limit) {
  std::vector<CommitRecord> out;
  if (limit == 0) return out;
  for (auto& r : records) {
    if (!keywords.matches(type, r.message)) continue;
    r.vuln_type = type;
    out.push_back(std::move(r));
  }
  sort_records(out);
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::vector<CommitRecord> search_commits(VulnerabilityType type, const CommitSource& source,
                                         const KeywordTable& keywords, std::size_t limit) {
  if (limit == 0) return {};
  if (const auto* dump = std::get_if<DumpSource>(&source)) {
    return select_matching(load_commits(dump->path), type, keywords, limit);
  }
  const auto& live = std::get<LiveSource>(source);
  if (!live.client) throw ConfigError("live source without a client");
  return live.client->search(type, keywords, limit);
}

}  // namespace vudetect
