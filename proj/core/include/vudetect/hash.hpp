#pragma once

#include <string>
#include <string_view>

namespace vudetect {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes; throws IoError when unreadable.
std::string sha256_file(const std::string& path);

}  // namespace vudetect
