#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vudetect/commit.hpp"
#include "vudetect/lexer.hpp"
#include "vudetect/vulnerability.hpp"

namespace vudetect {

struct SnippetConfig {
  std::size_t n = 5;    // focus step, characters
  std::size_t m = 200;  // context length, characters

  /// Throws ConfigError unless 0 < n < m.
  void validate() const;
};

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - start; }
  bool overlaps(const CharSpan& o) const { return start < o.end && o.start < end; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

struct VulnerableRange {
  CharSpan span;  // comment-stripped old source coordinates
  std::string origin_sha;
  std::size_t hunk_index = 0;  // first contributing hunk
  friend bool operator==(const VulnerableRange&, const VulnerableRange&) = default;
};

struct LabeledSnippet {
  std::vector<std::string> tokens;
  CharSpan span;        // context window
  CharSpan focus_span;  // not persisted; equals span after loading from disk
  bool vulnerable = false;
  std::string repo;
  std::string sha;
  std::string path;
  std::optional<VulnerabilityType> vuln_type;
  friend bool operator==(const LabeledSnippet&, const LabeledSnippet&) = default;
};

/// One focus window with the context window around it.
struct Window {
  CharSpan focus;
  CharSpan context;
  friend bool operator==(const Window&, const Window&) = default;
};

/// Smallest q >= pos with q == size or is_boundary_char(text[q]).
std::size_t snap_forward(std::string_view text, std::size_t pos);
/// Largest q <= pos with q == 0 or is_boundary_char(text[q - 1]).
std::size_t snap_backward(std::string_view text, std::size_t pos);

/// Focus windows tile the text: each starts where the previous ended and
/// ends at the first boundary at or after start + n. The context is about m
/// characters centred on the focus, shifted inward near the file edges and
/// widened to boundary characters on both sides.
std::vector<Window> plan_windows(std::string_view text, const SnippetConfig& cfg);

/// Changed or deleted lines of every hunk, widened by three lines on each
/// side, as merged character ranges of the comment-stripped old source.
/// A pure insertion after line l covers lines l-2 .. l+3. Throws
/// HunkOutOfBounds for hunks outside the old file.
std::vector<VulnerableRange> extract_vulnerable_ranges(const FileChange& fc,
                                                       const std::string& origin_sha = {});

/// Overlapping labeled snippets of comment-stripped `source`. A snippet holds
/// the tokens lying entirely inside its context window and is vulnerable iff
/// the window overlaps a range. Throws SourceTooShort if there are no tokens.
std::vector<LabeledSnippet> make_snippets(std::string_view source,
                                          const std::vector<VulnerableRange>& ranges,
                                          const SnippetConfig& cfg);
std::vector<LabeledSnippet> make_snippets(std::string_view source, const TokenStream& stream,
                                          const std::vector<VulnerableRange>& ranges,
                                          const SnippetConfig& cfg);

/// Token texts of `stream` lying fully inside `span` (tokens sorted by start).
std::vector<std::string> tokens_within(const TokenStream& stream, CharSpan span);

}  // namespace vudetect
