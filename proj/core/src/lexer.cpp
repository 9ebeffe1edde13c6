#include "vudetect/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "vudetect/error.hpp"

namespace vudetect {

namespace {

constexpr std::string_view kBoundaryPunct = ":;,.()[]{}+-*/%<>=!&|^~@\"'";

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",     "True",  "and",    "as",       "assert", "async",
    "await", "break",    "class", "continue", "def",    "del",    "elif",
    "else",  "except",   "finally", "for",  "from",     "global", "if",
    "import", "in",      "is",    "lambda", "nonlocal", "not",    "or",
    "pass",  "raise",    "return", "try",   "while",    "with",   "yield"};

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":="};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_quote(char c) { return c == '"' || c == '\''; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Python delimiters (as opposed to operators) among the punctuation tokens.
bool is_delimiter_text(std::string_view t) {
  static constexpr std::array<std::string_view, 23> kDelims = {
      "(", ")", "[", "]", "{", "}", ",", ":", ";", ".", "=", "->",
      "...", "+=", "-=", "*=", "/=", "//=", "%=", "&=", "|=", "^=", ">>="};
  if (t == "<<=" || t == "**=" || t == "@=") return true;
  return std::find(kDelims.begin(), kDelims.end(), t) != kDelims.end();
}

bool is_string_prefix(std::string_view word) {
  if (word.empty() || word.size() > 2) return false;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" ||
         lower == "rb" || lower == "fr" || lower == "rf";
}

struct StringScan {
  std::size_t end;
  bool terminated;
};

// Scans a string literal whose opening quote is at `pos`. An unterminated
// single-quoted literal ends before the newline; an unterminated
// triple-quoted literal runs to the end of input.
StringScan scan_string(std::string_view src, std::size_t pos) {
  const char q = src[pos];
  const bool triple = pos + 2 < src.size() && src[pos + 1] == q && src[pos + 2] == q;
  std::size_t i = pos + (triple ? 3 : 1);
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (triple) {
      if (c == q && i + 2 < src.size() && src[i + 1] == q && src[i + 2] == q) {
        return {i + 3, true};
      }
    } else {
      if (c == q) return {i + 1, true};
      if (c == '\n') return {i, false};
    }
    ++i;
  }
  return {src.size(), false};
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::op: return "operator";
    case TokenKind::delimiter: return "delimiter";
    case TokenKind::number_literal: return "number-literal";
    case TokenKind::string_literal: return "string-literal";
    case TokenKind::newline: return "newline";
    case TokenKind::indentation: return "indentation";
  }
  return "unknown";
}

bool is_boundary_char(char c) {
  return is_space(c) || kBoundaryPunct.find(c) != std::string_view::npos;
}

bool is_python_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::size_t StrippedSource::to_original(std::size_t offset) const {
  std::size_t shift = 0;
  for (const auto& [start, end] : removed) {
    // The stripped character that follows a removed comment sits at start - shift.
    if (offset >= start - shift) {
      shift += end - start;
    } else {
      break;
    }
  }
  return offset + shift;
}

StrippedSource strip_comments_mapped(std::string_view source) {
  StrippedSource out;
  out.text.reserve(source.size());
  std::size_t i = 0;
  while (i < source.size()) {
    const char c = source[i];
    if (is_quote(c)) {
      const StringScan s = scan_string(source, i);
      if (!s.terminated) out.warnings.push_back({i, "unterminated string literal"});
      out.text.append(source.substr(i, s.end - i));
      i = s.end;
    } else if (c == '#') {
      std::size_t nl = source.find('\n', i);
      if (nl == std::string_view::npos) nl = source.size();
      // Keep a CR of a CRLF ending so line structure is unchanged.
      std::size_t stop = nl;
      if (stop > i && source[stop - 1] == '\r') --stop;
      out.removed.emplace_back(i, stop);
      i = stop;
    } else {
      out.text.push_back(c);
      ++i;
    }
  }
  return out;
}

std::string strip_comments(std::string_view source) {
  return strip_comments_mapped(source).text;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool looks_like_string_literal(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && i < 2 && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  if (i >= text.size() || !is_quote(text[i])) return false;
  return i == 0 || is_string_prefix(text.substr(0, i));
}

TokenStream tokenize(std::string_view src) {
  if (!is_valid_utf8(src)) throw LexError("source is not valid UTF-8");

  TokenStream out;
  out.source_len = src.size();
  auto emit = [&](std::size_t start, std::size_t end, TokenKind kind) {
    out.tokens.push_back({std::string(src.substr(start, end - start)), kind, start, end});
  };

  const std::size_t n = src.size();
  std::size_t pos = 0;
  bool line_start = true;
  int depth = 0;

  while (pos < n) {
    const char c = src[pos];

    if (line_start) {
      line_start = false;
      std::size_t ws = pos;
      while (ws < n && (src[ws] == ' ' || src[ws] == '\t' || src[ws] == '\f')) ++ws;
      const bool blank = ws >= n || src[ws] == '\n' || src[ws] == '\r';
      if (ws > pos && !blank && depth == 0) emit(pos, ws, TokenKind::indentation);
      pos = ws;
      continue;
    }

    if (c == '\n') {
      emit(pos, pos + 1, TokenKind::newline);
      ++pos;
      line_start = true;
      continue;
    }
    if (c == '\\' && pos + 1 < n &&
        (src[pos + 1] == '\n' || (src[pos + 1] == '\r' && pos + 2 < n && src[pos + 2] == '\n'))) {
      pos += src[pos + 1] == '\n' ? 2 : 3;
      continue;
    }
    if (is_space(c)) {
      ++pos;
      continue;
    }

    if (is_quote(c)) {
      const StringScan s = scan_string(src, pos);
      if (!s.terminated) out.warnings.push_back({pos, "unterminated string literal"});
      emit(pos, s.end, TokenKind::string_literal);
      pos = s.end;
      continue;
    }

    if (is_digit(c) || (c == '.' && pos + 1 < n && is_digit(src[pos + 1]))) {
      const bool hex = c == '0' && pos + 1 < n && (src[pos + 1] == 'x' || src[pos + 1] == 'X');
      std::size_t e = pos + 1;
      while (e < n) {
        const char d = src[e];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          ++e;
        } else if ((d == '+' || d == '-') && !hex && (src[e - 1] == 'e' || src[e - 1] == 'E')) {
          ++e;
        } else {
          break;
        }
      }
      emit(pos, e, TokenKind::number_literal);
      pos = e;
      continue;
    }

    if (kBoundaryPunct.find(c) != std::string_view::npos) {
      std::size_t len = 1;
      const std::string_view rest = src.substr(pos);
      if (std::any_of(kOps3.begin(), kOps3.end(), [&](auto op) { return rest.starts_with(op); })) {
        len = 3;
      } else if (std::any_of(kOps2.begin(), kOps2.end(),
                             [&](auto op) { return rest.starts_with(op); })) {
        len = 2;
      }
      const std::string_view text = src.substr(pos, len);
      if (text == "(" || text == "[" || text == "{") ++depth;
      if ((text == ")" || text == "]" || text == "}") && depth > 0) --depth;
      emit(pos, pos + len, is_delimiter_text(text) ? TokenKind::delimiter : TokenKind::op);
      pos += len;
      continue;
    }

    std::size_t e = pos;
    while (e < n && !is_boundary_char(src[e])) ++e;
    const std::string_view word = src.substr(pos, e - pos);
    if (e < n && is_quote(src[e]) && is_string_prefix(word)) {
      const StringScan s = scan_string(src, e);
      if (!s.terminated) out.warnings.push_back({e, "unterminated string literal"});
      emit(pos, s.end, TokenKind::string_literal);
      pos = s.end;
      continue;
    }
    emit(pos, e, is_python_keyword(word) ? TokenKind::keyword : TokenKind::identifier);
    pos = e;
  }
  return out;
}

}  // namespace vudetect
