#include "vudetect/commit.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <tuple>

#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"

namespace vudetect {

std::size_t count_lines(std::string_view text) {
  if (text.empty()) return 0;
  const auto newlines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  return text.back() == '\n' ? newlines : newlines + 1;
}

std::size_t line_start_offset(std::string_view text, std::size_t line) {
  if (line <= 1) return 0;
  std::size_t seen = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n' && ++seen == line) return i + 1;
  }
  return text.size();
}

std::string repo_name(std::string_view repo_url) {
  while (!repo_url.empty() && repo_url.back() == '/') repo_url.remove_suffix(1);
  const auto slash = repo_url.rfind('/');
  return std::string(slash == std::string_view::npos ? repo_url : repo_url.substr(slash + 1));
}

void sort_records(std::vector<CommitRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.repo_url, a.commit_sha) < std::tie(b.repo_url, b.commit_sha);
  });
}

nlohmann::ordered_json to_json(const CommitRecord& record) {
  nlohmann::ordered_json j;
  j["repo"] = record.repo_url;
  j["sha"] = record.commit_sha;
  j["message"] = record.message;
  j["vuln_type"] = record.vuln_type ? nlohmann::ordered_json(std::string(to_string(*record.vuln_type)))
                                    : nlohmann::ordered_json(nullptr);
  auto& files = j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : record.files) {
    nlohmann::ordered_json jf;
    jf["path"] = f.path;
    jf["old"] = f.old_source;
    jf["new"] = f.new_source;
    auto& hunks = jf["hunks"] = nlohmann::ordered_json::array();
    for (const auto& h : f.hunks) {
      nlohmann::ordered_json jh;
      jh["old_start"] = h.old_start_line;
      jh["old_count"] = h.old_line_count;
      jh["removed"] = h.removed_lines;
      jh["added"] = h.added_lines;
      hunks.push_back(std::move(jh));
    }
    files.push_back(std::move(jf));
  }
  return j;
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw DumpFormatError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DumpFormatError(std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace

CommitRecord commit_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DumpFormatError("record is not an object");
  CommitRecord r;
  r.repo_url = field<std::string>(j, "repo");
  r.commit_sha = field<std::string>(j, "sha");
  r.message = field<std::string>(j, "message");
  if (j.contains("vuln_type") && !j["vuln_type"].is_null()) {
    const auto name = field<std::string>(j, "vuln_type");
    r.vuln_type = try_parse_vulnerability_type(name);
    if (!r.vuln_type) throw DumpFormatError("unknown vuln_type '" + name + "'");
  }
  if (!j.contains("files") || !j["files"].is_array()) throw DumpFormatError("missing files array");
  for (const auto& jf : j["files"]) {
    if (!jf.is_object()) throw DumpFormatError("file entry is not an object");
    FileChange f;
    f.path = field<std::string>(jf, "path");
    f.old_source = field<std::string>(jf, "old");
    f.new_source = field<std::string>(jf, "new");
    if (jf.contains("hunks")) {
      if (!jf["hunks"].is_array()) throw DumpFormatError("hunks is not an array");
      for (const auto& jh : jf["hunks"]) {
        DiffHunk h;
        h.old_start_line = field<std::size_t>(jh, "old_start");
        h.old_line_count = field<std::size_t>(jh, "old_count");
        h.removed_lines = field<std::vector<std::string>>(jh, "removed");
        h.added_lines = field<std::vector<std::string>>(jh, "added");
        f.hunks.push_back(std::move(h));
      }
    }
    r.files.push_back(std::move(f));
  }
  return r;
}

std::vector<CommitRecord> load_commits(const std::string& path) {
  std::vector<CommitRecord> out;
  for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    try {
      out.push_back(commit_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw DumpFormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DumpFormatError& e) {
      throw DumpFormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

void write_commits(const std::string& path, const std::vector<CommitRecord>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    lines.push_back(to_json(r).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace));
  }
  write_lines(path, lines);
}

}  // namespace vudetect
