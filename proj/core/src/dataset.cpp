#include "vudetect/dataset.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <span>
#include <tuple>

#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"
#include "vudetect/random.hpp"

namespace vudetect {

void SplitPolicy::validate() const {
  if (!(train >= 0.0 && validation >= 0.0 && train + validation <= 1.0)) {
    throw ConfigError("split ratios must be non-negative and sum to at most 1");
  }
}

namespace {

struct FileUnit {
  const CommitRecord* record;
  const FileChange* file;
};

void add_snippets(std::vector<LabeledSnippet>& dst, SplitStats& stats, const FileUnit& u,
                  const SnippetConfig& cfg, bool include_new) {
  auto emit = [&](std::string_view source, const std::vector<VulnerableRange>& ranges) {
    auto snippets = make_snippets(source, ranges, cfg);
    for (auto& s : snippets) {
      s.repo = u.record->repo_url;
      s.sha = u.record->commit_sha;
      s.path = u.file->path;
      s.vuln_type = u.record->vuln_type;
      stats.vulnerable += s.vulnerable ? 1 : 0;
      dst.push_back(std::move(s));
    }
    stats.snippets += snippets.size();
  };
  const std::string old_text = strip_comments(u.file->old_source);
  emit(old_text, extract_vulnerable_ranges(*u.file, u.record->commit_sha));
  if (include_new) {
    const std::string new_text = strip_comments(u.file->new_source);
    if (!tokenize(new_text).tokens.empty()) emit(new_text, {});
  }
  ++stats.files;
}

}  // namespace

Dataset build_dataset(const std::vector<CommitRecord>& records, const SnippetConfig& cfg,
                      const SplitPolicy& policy) {
  cfg.validate();
  policy.validate();
  std::vector<FileUnit> units;
  for (const auto& r : records) {
    for (const auto& f : r.files) units.push_back({&r, &f});
  }
  std::sort(units.begin(), units.end(), [](const FileUnit& a, const FileUnit& b) {
    return std::tie(a.record->repo_url, a.record->commit_sha, a.file->path) <
           std::tie(b.record->repo_url, b.record->commit_sha, b.file->path);
  });
  Rng rng(policy.seed);
  rng.shuffle(std::span<FileUnit>(units));

  const double total = static_cast<double>(units.size());
  const auto n_train = std::min(units.size(), static_cast<std::size_t>(std::floor(policy.train * total + 0.5)));
  const auto n_val = std::min(units.size() - n_train,
                              static_cast<std::size_t>(std::floor(policy.validation * total + 0.5)));

  Dataset ds;
  for (std::size_t i = 0; i < units.size(); ++i) {
    auto& dst = i < n_train ? ds.train : i < n_train + n_val ? ds.validation : ds.test;
    auto& stats = i < n_train ? ds.train_stats
                  : i < n_train + n_val ? ds.validation_stats
                                        : ds.test_stats;
    try {
      add_snippets(dst, stats, units[i], cfg, policy.include_new_sources);
    } catch (const SourceTooShort&) {
      ++ds.skipped_files;
    } catch (const HunkOutOfBounds& e) {
      spdlog::warn("skipping {}@{}: {}", units[i].file->path, units[i].record->commit_sha,
                   e.what());
      ++ds.skipped_files;
    } catch (const LexError& e) {
      spdlog::warn("skipping {}: {}", units[i].file->path, e.what());
      ++ds.skipped_files;
    }
  }
  if (ds.train.empty() && ds.validation.empty() && ds.test.empty()) {
    throw EmptyDataset("no snippets could be built from the records");
  }
  return ds;
}

nlohmann::ordered_json to_json(const LabeledSnippet& s) {
  nlohmann::ordered_json j;
  j["tokens"] = s.tokens;
  j["label"] = s.vulnerable ? 1 : 0;
  j["span"] = {s.span.start, s.span.end};
  j["repo"] = s.repo;
  j["sha"] = s.sha;
  j["path"] = s.path;
  j["vuln_type"] = s.vuln_type ? nlohmann::ordered_json(std::string(to_string(*s.vuln_type)))
                               : nlohmann::ordered_json(nullptr);
  return j;
}

LabeledSnippet snippet_from_json(const nlohmann::json& j) {
  LabeledSnippet s;
  try {
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    const int label = j.at("label").get<int>();
    if (label != 0 && label != 1) throw DumpFormatError("label must be 0 or 1");
    s.vulnerable = label == 1;
    const auto& span = j.at("span");
    if (!span.is_array() || span.size() != 2) throw DumpFormatError("span must be [start, end]");
    s.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    if (s.span.start > s.span.end) throw DumpFormatError("span start after end");
    s.focus_span = s.span;
    s.repo = j.value("repo", "");
    s.sha = j.value("sha", "");
    s.path = j.value("path", "");
    if (j.contains("vuln_type") && !j["vuln_type"].is_null()) {
      s.vuln_type = parse_vulnerability_type(j["vuln_type"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DumpFormatError(std::string("dataset record: ") + e.what());
  } catch (const ConfigError& e) {
    throw DumpFormatError(std::string("dataset record: ") + e.what());
  }
  return s;
}

void write_dataset(const std::string& path, const std::vector<LabeledSnippet>& snippets) {
  std::vector<std::string> lines;
  lines.reserve(snippets.size());
  for (const auto& s : snippets) {
    lines.push_back(to_json(s).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace));
  }
  write_lines(path, lines);
}

std::vector<LabeledSnippet> load_dataset(const std::string& path) {
  std::vector<LabeledSnippet> out;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    try {
      out.push_back(snippet_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DumpFormatError(path + ":" + std::to_string(no) + ": " + e.what());
    } catch (const DumpFormatError& e) {
      throw DumpFormatError(path + ":" + std::to_string(no) + ": " + e.what());
    }
  });
  return out;
}

std::string file_key(const LabeledSnippet& s) {
  return s.repo + '\n' + s.sha + '\n' + s.path;
}

}  // namespace vudetect
