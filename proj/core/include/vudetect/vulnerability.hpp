#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vudetect {

enum class VulnerabilityType {
  sql_injection,
  xss,
  command_injection,
  xsrf,
  remote_code_execution,
  path_disclosure,
  open_redirect,
};

inline constexpr std::array<VulnerabilityType, 7> kAllVulnerabilityTypes = {
    VulnerabilityType::sql_injection,        VulnerabilityType::xss,
    VulnerabilityType::command_injection,    VulnerabilityType::xsrf,
    VulnerabilityType::remote_code_execution, VulnerabilityType::path_disclosure,
    VulnerabilityType::open_redirect};

std::string_view to_string(VulnerabilityType type);

/// Parses the snake_case name; throws ConfigError on anything else.
VulnerabilityType parse_vulnerability_type(std::string_view name);
std::optional<VulnerabilityType> try_parse_vulnerability_type(std::string_view name);

/// Search keywords per vulnerability type, loaded from a JSON config file of
/// the form {"sql_injection": ["sql injection", "sqli", ...], ...}.
class KeywordTable {
 public:
  /// Throws ConfigError unless all seven types are present with non-empty lists.
  static KeywordTable load(const std::string& path);
  static KeywordTable from_json_text(std::string_view text);

  const std::vector<std::string>& keywords(VulnerabilityType type) const;

  /// Case-insensitive keyword match on word boundaries, so "sqli" does not
  /// fire inside "sqlite".
  bool matches(VulnerabilityType type, std::string_view message) const;

 private:
  std::map<VulnerabilityType, std::vector<std::string>> table_;
};

/// Case-insensitive whole-word(s) search of `needle` in `haystack`.
bool contains_phrase(std::string_view haystack, std::string_view needle);

std::string to_lower(std::string_view s);

}  // namespace vudetect
