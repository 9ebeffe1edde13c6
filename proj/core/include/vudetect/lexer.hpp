#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vudetect {

// Delimiter-driven lexical scanning of Python source.
//
// All offsets are byte offsets into UTF-8 text. Every delimiter is ASCII, so
// token and window boundaries never split a multi-byte sequence.

enum class TokenKind {
  keyword,
  identifier,
  op,
  delimiter,
  number_literal,
  string_literal,
  newline,
  indentation,
};

std::string_view to_string(TokenKind kind);

struct Token {
  std::string text;
  TokenKind kind;
  std::size_t start;  // inclusive
  std::size_t end;    // exclusive

  friend bool operator==(const Token&, const Token&) = default;
};

struct LexWarning {
  std::size_t offset;
  std::string message;

  friend bool operator==(const LexWarning&, const LexWarning&) = default;
};

struct TokenStream {
  std::vector<Token> tokens;
  std::size_t source_len = 0;
  std::vector<LexWarning> warnings;
};

/// True for whitespace and `:;,.()[]{}+-*/%<>=!&|^~@"'`.
bool is_boundary_char(char c);

bool is_python_keyword(std::string_view word);

/// Comment-stripped text plus the mapping back to the original offsets.
struct StrippedSource {
  std::string text;
  std::vector<LexWarning> warnings;
  /// Removed comment bodies as [start, end) in original coordinates, ascending.
  std::vector<std::pair<std::size_t, std::size_t>> removed;

  /// Original offset of the character at `offset` in `text`; `text.size()`
  /// maps to the original length.
  std::size_t to_original(std::size_t offset) const;
};

/// Removes `#` comments up to (not including) the end of line. String
/// literals, including ones that contain `#`, are left untouched.
StrippedSource strip_comments_mapped(std::string_view source);
std::string strip_comments(std::string_view source);

/// Splits comment-stripped source into tokens. Throws LexError on invalid
/// UTF-8; anything else yields a best-effort stream with warnings.
TokenStream tokenize(std::string_view source);

bool is_valid_utf8(std::string_view text);

/// Number of UTF-8 code points (assumes valid UTF-8).
std::size_t utf8_length(std::string_view text);

/// True if `text` is a string-literal token (optional prefix then a quote).
bool looks_like_string_literal(std::string_view text);

}  // namespace vudetect
