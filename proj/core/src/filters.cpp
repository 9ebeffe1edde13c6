#include "vudetect/filters.hpp"

#include <cctype>
#include <set>
#include <tuple>

#include "vudetect/error.hpp"
#include "vudetect/hash.hpp"
#include "vudetect/jsonl.hpp"
#include "vudetect/lexer.hpp"

namespace vudetect {

void FilterConfig::validate() const {
  if (max_file_chars == 0) throw ConfigError("max_file_chars must be positive");
  if (max_changed_files_per_commit == 0) {
    throw ConfigError("max_changed_files_per_commit must be positive");
  }
  if (!(html_line_fraction_max >= 0.0 && html_line_fraction_max <= 1.0)) {
    throw ConfigError("html_line_fraction_max must lie in [0,1]");
  }
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::too_many_files: return "too_many_files";
    case RejectReason::showcase: return "showcase";
    case RejectReason::no_files: return "no_files";
    case RejectReason::not_python: return "not_python";
    case RejectReason::too_long: return "too_long";
    case RejectReason::html_heavy: return "html_heavy";
  }
  return "unknown";
}

FilterVerdict filter_commit(const CommitRecord& commit, const FilterConfig& cfg) {
  if (commit.files.empty()) return RejectReason::no_files;
  std::size_t python_files = 0;
  for (const auto& f : commit.files) {
    if (ends_with(f.path, ".py")) ++python_files;
  }
  if (python_files > cfg.max_changed_files_per_commit) return RejectReason::too_many_files;
  const std::string name = repo_name(commit.repo_url);
  for (const auto& word : cfg.denylist_keywords) {
    if (word.empty()) continue;
    const std::string w = to_lower(word);
    if (to_lower(name).find(w) != std::string::npos ||
        to_lower(commit.message).find(w) != std::string::npos) {
      return RejectReason::showcase;
    }
  }
  return std::nullopt;
}

double html_line_fraction(std::string_view content) {
  std::size_t lines = 0;
  std::size_t html = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const std::string_view line = content.substr(pos, nl - pos);
    ++lines;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const char next = line[i + 1];
      if (line[i] == '<' && (std::isalpha(static_cast<unsigned char>(next)) || next == '/')) {
        ++html;
        break;
      }
    }
    pos = nl + 1;
  }
  return lines == 0 ? 0.0 : static_cast<double>(html) / static_cast<double>(lines);
}

FilterVerdict filter_file(std::string_view path, std::string_view content, const FilterConfig& cfg) {
  if (!ends_with(path, ".py")) return RejectReason::not_python;
  if (utf8_length(content) > cfg.max_file_chars) return RejectReason::too_long;
  if (html_line_fraction(content) > cfg.html_line_fraction_max) return RejectReason::html_heavy;
  return std::nullopt;
}

std::string normalized_content_hash(std::string_view source) {
  std::string norm;
  norm.reserve(source.size());
  std::size_t pos = 0;
  while (pos < source.size()) {
    std::size_t nl = source.find('\n', pos);
    if (nl == std::string_view::npos) nl = source.size();
    std::string_view line = source.substr(pos, nl - pos);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    norm.append(line);
    norm.push_back('\n');
    pos = nl + 1;
  }
  while (!norm.empty() && norm.back() == '\n') norm.pop_back();
  return sha256_hex(norm);
}

std::vector<CommitRecord> dedup_commits(const std::vector<CommitRecord>& records) {
  std::set<std::pair<std::string, int>> seen;
  std::vector<CommitRecord> out;
  for (const auto& r : records) {
    const int type_key = r.vuln_type ? static_cast<int>(*r.vuln_type) : -1;
    CommitRecord kept = r;
    kept.files.clear();
    for (const auto& f : r.files) {
      if (seen.insert({normalized_content_hash(f.old_source), type_key}).second) {
        kept.files.push_back(f);
      }
    }
    if (!kept.files.empty()) out.push_back(std::move(kept));
  }
  return out;
}

std::vector<CommitRecord> apply_filters(const std::vector<CommitRecord>& records,
                                        const FilterConfig& cfg, FilterStats* stats) {
  cfg.validate();
  std::vector<CommitRecord> out;
  for (const auto& r : records) {
    if (auto reason = filter_commit(r, cfg)) {
      if (stats) stats->rejected_commits.emplace_back(r.commit_sha, *reason);
      continue;
    }
    CommitRecord kept = r;
    kept.files.clear();
    for (const auto& f : r.files) {
      if (filter_file(f.path, f.old_source, cfg)) {
        if (stats) ++stats->rejected_files;
      } else {
        kept.files.push_back(f);
      }
    }
    if (kept.files.empty()) {
      if (stats) stats->rejected_commits.emplace_back(r.commit_sha, RejectReason::no_files);
      continue;
    }
    if (stats) ++stats->accepted;
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace vudetect
