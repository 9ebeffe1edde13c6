#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace vudetect {

// Line-delimited text IO shared by the dump, dataset and report formats.
// Reading transparently accepts gzip-compressed input; writing compresses
// when the target path ends in ".gz".

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

/// Calls `on_line(line, line_number)` for each non-empty line (1-based numbers).
void for_each_line(const std::string& path,
                   const std::function<void(std::string_view, std::size_t)>& on_line);

void write_lines(const std::string& path, const std::vector<std::string>& lines);

bool ends_with(std::string_view s, std::string_view suffix);

}  // namespace vudetect
