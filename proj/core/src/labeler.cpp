#include "vudetect/labeler.hpp"

#include <algorithm>

#include "vudetect/error.hpp"

namespace vudetect {

void SnippetConfig::validate() const {
  if (n == 0 || n >= m) throw ConfigError("snippet config requires 0 < n < m");
}

std::size_t snap_forward(std::string_view text, std::size_t pos) {
  pos = std::min(pos, text.size());
  while (pos < text.size() && !is_boundary_char(text[pos])) ++pos;
  return pos;
}

std::size_t snap_backward(std::string_view text, std::size_t pos) {
  pos = std::min(pos, text.size());
  while (pos > 0 && !is_boundary_char(text[pos - 1])) --pos;
  return pos;
}

std::vector<Window> plan_windows(std::string_view text, const SnippetConfig& cfg) {
  cfg.validate();
  const std::size_t len = text.size();
  std::vector<Window> out;
  out.reserve(len / cfg.n + 1);
  std::size_t f = 0;
  while (f < len) {
    const std::size_t fe = snap_forward(text, f + cfg.n);
    const std::size_t centre = f + (fe - f) / 2;
    std::size_t s = centre > cfg.m / 2 ? centre - cfg.m / 2 : 0;
    s = len > cfg.m ? std::min(s, len - cfg.m) : 0;
    s = snap_backward(text, std::min(s, f));
    const std::size_t e = snap_forward(text, std::min(len, std::max(s + cfg.m, fe)));
    out.push_back({{f, fe}, {s, e}});
    f = fe;
  }
  return out;
}

std::vector<VulnerableRange> extract_vulnerable_ranges(const FileChange& fc,
                                                       const std::string& origin_sha) {
  const std::string text = strip_comments(fc.old_source);
  const std::size_t lines = count_lines(text);

  struct LineRange {
    std::size_t first;
    std::size_t last;
    std::size_t hunk;
  };
  std::vector<LineRange> line_ranges;
  for (std::size_t h = 0; h < fc.hunks.size(); ++h) {
    const DiffHunk& hunk = fc.hunks[h];
    std::size_t first = 0;
    std::size_t last = 0;
    if (hunk.old_line_count == 0) {
      if (hunk.old_start_line > lines) {
        throw HunkOutOfBounds(fc.path + ": insertion after line " +
                              std::to_string(hunk.old_start_line) + " of " +
                              std::to_string(lines));
      }
      first = hunk.old_start_line > 2 ? hunk.old_start_line - 2 : 1;
      last = hunk.old_start_line + 3;
    } else {
      const std::size_t end_line = hunk.old_start_line + hunk.old_line_count - 1;
      if (hunk.old_start_line == 0 || end_line > lines) {
        throw HunkOutOfBounds(fc.path + ": lines " + std::to_string(hunk.old_start_line) + "-" +
                              std::to_string(end_line) + " of " + std::to_string(lines));
      }
      first = hunk.old_start_line > 3 ? hunk.old_start_line - 3 : 1;
      last = end_line + 3;
    }
    last = std::min(last, lines);
    if (first <= last) line_ranges.push_back({first, last, h});
  }
  std::sort(line_ranges.begin(), line_ranges.end(),
            [](const LineRange& a, const LineRange& b) { return a.first < b.first; });

  std::vector<VulnerableRange> out;
  for (const auto& lr : line_ranges) {
    const CharSpan span{line_start_offset(text, lr.first), line_start_offset(text, lr.last + 1)};
    if (span.start >= span.end) continue;
    if (!out.empty() && span.start <= out.back().span.end) {
      auto& back = out.back();
      back.span.end = std::max(back.span.end, span.end);
      back.hunk_index = std::min(back.hunk_index, lr.hunk);
    } else {
      out.push_back({span, origin_sha, lr.hunk});
    }
  }
  return out;
}

std::vector<std::string> tokens_within(const TokenStream& stream, CharSpan span) {
  std::vector<std::string> out;
  auto it = std::lower_bound(stream.tokens.begin(), stream.tokens.end(), span.start,
                             [](const Token& t, std::size_t pos) { return t.start < pos; });
  for (; it != stream.tokens.end() && it->end <= span.end; ++it) out.push_back(it->text);
  return out;
}

std::vector<LabeledSnippet> make_snippets(std::string_view source,
                                          const std::vector<VulnerableRange>& ranges,
                                          const SnippetConfig& cfg) {
  return make_snippets(source, tokenize(source), ranges, cfg);
}

std::vector<LabeledSnippet> make_snippets(std::string_view source, const TokenStream& stream,
                                          const std::vector<VulnerableRange>& ranges,
                                          const SnippetConfig& cfg) {
  if (stream.tokens.empty()) throw SourceTooShort("source has no tokens");
  std::vector<CharSpan> spans;
  spans.reserve(ranges.size());
  for (const auto& r : ranges) spans.push_back(r.span);
  std::sort(spans.begin(), spans.end());

  std::vector<LabeledSnippet> out;
  for (const Window& w : plan_windows(source, cfg)) {
    LabeledSnippet s;
    s.tokens = tokens_within(stream, w.context);
    s.span = w.context;
    s.focus_span = w.focus;
    for (auto it = spans.begin(); it != spans.end() && it->start < w.context.end; ++it) {
      if (it->overlaps(w.context)) {
        s.vulnerable = true;
        break;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vudetect
