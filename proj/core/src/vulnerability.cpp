#include "vudetect/vulnerability.hpp"

#include <cctype>
#include <nlohmann/json.hpp>

#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"

namespace vudetect {

std::string_view to_string(VulnerabilityType type) {
  switch (type) {
    case VulnerabilityType::sql_injection: return "sql_injection";
    case VulnerabilityType::xss: return "xss";
    case VulnerabilityType::command_injection: return "command_injection";
    case VulnerabilityType::xsrf: return "xsrf";
    case VulnerabilityType::remote_code_execution: return "remote_code_execution";
    case VulnerabilityType::path_disclosure: return "path_disclosure";
    case VulnerabilityType::open_redirect: return "open_redirect";
  }
  return "unknown";
}

std::optional<VulnerabilityType> try_parse_vulnerability_type(std::string_view name) {
  for (auto t : kAllVulnerabilityTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

VulnerabilityType parse_vulnerability_type(std::string_view name) {
  if (auto t = try_parse_vulnerability_type(name)) return *t;
  throw ConfigError("unknown vulnerability type '" + std::string(name) + "'");
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_phrase(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  const std::string h = to_lower(haystack);
  const std::string n = to_lower(needle);
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t pos = h.find(n); pos != std::string::npos; pos = h.find(n, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word(h[pos - 1]) || !is_word(n.front());
    const std::size_t after = pos + n.size();
    const bool right_ok = after >= h.size() || !is_word(h[after]) || !is_word(n.back());
    if (left_ok && right_ok) return true;
  }
  return false;
}

KeywordTable KeywordTable::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("keyword table: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("keyword table must be a JSON object");
  KeywordTable table;
  for (auto t : kAllVulnerabilityTypes) {
    const std::string key(to_string(t));
    if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
      throw ConfigError("keyword table: missing or empty list for " + key);
    }
    auto& list = table.table_[t];
    for (const auto& kw : j[key]) {
      if (!kw.is_string() || kw.get<std::string>().empty()) {
        throw ConfigError("keyword table: keywords for " + key + " must be non-empty strings");
      }
      list.push_back(kw.get<std::string>());
    }
  }
  for (const auto& [key, _] : j.items()) {
    if (!try_parse_vulnerability_type(key)) {
      throw ConfigError("keyword table: unknown vulnerability type " + key);
    }
  }
  return table;
}

KeywordTable KeywordTable::load(const std::string& path) {
  try {
    return from_json_text(read_text_file(path));
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<std::string>& KeywordTable::keywords(VulnerabilityType type) const {
  return table_.at(type);
}

bool KeywordTable::matches(VulnerabilityType type, std::string_view message) const {
  for (const auto& kw : keywords(type)) {
    if (contains_phrase(message, kw)) return true;
  }
  return false;
}

}  // namespace vudetect
