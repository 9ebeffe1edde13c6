#include "vudetect/diff.hpp"

#include <charconv>
#include <optional>

#include "vudetect/error.hpp"

namespace vudetect {

namespace {

struct Range {
  std::size_t start = 0;
  std::size_t count = 1;
};

std::optional<Range> parse_range(std::string_view s) {
  Range r;
  const auto comma = s.find(',');
  const std::string_view a = s.substr(0, comma);
  if (std::from_chars(a.data(), a.data() + a.size(), r.start).ec != std::errc{} || a.empty()) {
    return std::nullopt;
  }
  if (comma != std::string_view::npos) {
    const std::string_view b = s.substr(comma + 1);
    auto [p, ec] = std::from_chars(b.data(), b.data() + b.size(), r.count);
    if (ec != std::errc{} || p != b.data() + b.size()) return std::nullopt;
  }
  return r;
}

// "@@ -12,7 +12,8 @@ optional section heading"
std::optional<std::pair<Range, Range>> parse_header(std::string_view line) {
  if (!line.starts_with("@@ -")) return std::nullopt;
  const auto plus = line.find(" +", 4);
  if (plus == std::string_view::npos) return std::nullopt;
  const auto close = line.find(" @@", plus + 2);
  if (close == std::string_view::npos) return std::nullopt;
  auto old_r = parse_range(line.substr(4, plus - 4));
  auto new_r = parse_range(line.substr(plus + 2, close - plus - 2));
  if (!old_r || !new_r) return std::nullopt;
  return std::make_pair(*old_r, *new_r);
}

}  // namespace

std::vector<DiffHunk> parse_unified_patch(std::string_view patch) {
  std::vector<DiffHunk> out;
  std::optional<DiffHunk> block;
  std::size_t old_line = 0;  // number of the last old-file line consumed
  bool in_section = false;

  auto flush = [&] {
    if (block) {
      out.push_back(std::move(*block));
      block.reset();
    }
  };

  std::size_t pos = 0;
  while (pos <= patch.size()) {
    std::size_t nl = patch.find('\n', pos);
    if (nl == std::string_view::npos) nl = patch.size();
    std::string_view line = patch.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.starts_with("@@")) {
      flush();
      auto header = parse_header(line);
      if (!header) throw DumpFormatError("malformed hunk header: " + std::string(line));
      // A zero-length old range names the line *after* which text is inserted.
      old_line = header->first.count == 0 ? header->first.start : header->first.start - 1;
      in_section = true;
      continue;
    }
    if (!in_section || line.starts_with("\\")) continue;  // "\ No newline at end of file"
    if (line.empty() && pos > patch.size()) break;

    const char tag = line.empty() ? ' ' : line.front();
    const std::string_view body = line.empty() ? line : line.substr(1);
    if (tag == '-') {
      if (!block) block = DiffHunk{old_line + 1, 0, {}, {}};
      if (!block->added_lines.empty()) {
        // A removal after additions starts a new block.
        flush();
        block = DiffHunk{old_line + 1, 0, {}, {}};
      }
      block->removed_lines.emplace_back(body);
      ++block->old_line_count;
      ++old_line;
    } else if (tag == '+') {
      if (!block) block = DiffHunk{old_line, 0, {}, {}};
      block->added_lines.emplace_back(body);
    } else {
      flush();
      ++old_line;
    }
  }
  flush();
  return out;
}

}  // namespace vudetect
