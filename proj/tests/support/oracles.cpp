#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace vudetect::testkit {

std::string naive_strip_comments(std::string_view src) {
  enum class State { code, single, triple };
  State state = State::code;
  char quote = 0;
  std::string out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const char c = src[i];
    switch (state) {
      case State::code:
        if (c == '#') {
          std::size_t j = i;
          while (j < src.size() && src[j] != '\n') ++j;
          if (src[j - 1] == '\r') out.push_back('\r');  // CRLF keeps its CR
          i = j - 1;
          break;
        }
        out.push_back(c);
        if (c == '"' || c == '\'') {
          quote = c;
          if (i + 2 < src.size() && src[i + 1] == c && src[i + 2] == c) {
            out.push_back(c);
            out.push_back(c);
            i += 2;
            state = State::triple;
          } else {
            state = State::single;
          }
        }
        break;
      case State::single:
        out.push_back(c);
        if (c == '\\') {
          if (i + 1 < src.size()) out.push_back(src[++i]);
        } else if (c == quote || c == '\n') {
          state = State::code;
        }
        break;
      case State::triple:
        out.push_back(c);
        if (c == '\\') {
          if (i + 1 < src.size()) out.push_back(src[++i]);
        } else if (c == quote && i + 2 < src.size() && src[i + 1] == quote && src[i + 2] == quote) {
          out.push_back(quote);
          out.push_back(quote);
          i += 2;
          state = State::code;
        }
        break;
    }
  }
  return out;
}

bool naive_overlaps_any(const CharSpan& span, const std::vector<VulnerableRange>& ranges) {
  for (std::size_t c = span.start; c < span.end; ++c) {
    for (const auto& r : ranges) {
      if (c >= r.span.start && c < r.span.end) return true;
    }
  }
  return false;
}

std::set<std::size_t> naive_vulnerable_lines(const FileChange& fc) {
  const std::size_t total = count_lines(strip_comments(fc.old_source));
  std::set<std::size_t> lines;
  auto add = [&](long long lo, long long hi) {
    for (long long l = lo; l <= hi; ++l) {
      if (l >= 1 && l <= static_cast<long long>(total)) lines.insert(static_cast<std::size_t>(l));
    }
  };
  for (const auto& h : fc.hunks) {
    const auto start = static_cast<long long>(h.old_start_line);
    if (h.old_line_count == 0) {
      add(start - 2, start + 3);
    } else {
      add(start - 3, start + static_cast<long long>(h.old_line_count) - 1 + 3);
    }
  }
  return lines;
}

std::vector<CharSpan> line_runs_to_spans(std::string_view text, const std::set<std::size_t>& lines) {
  // Line l occupies [begin[l-1], begin[l]).
  std::vector<std::size_t> begin = {0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') begin.push_back(i + 1);
  }
  if (begin.back() != text.size()) begin.push_back(text.size());
  std::vector<CharSpan> out;
  for (std::size_t l : lines) {
    const CharSpan s{begin[l - 1], begin[l]};
    if (!out.empty() && out.back().end == s.start) {
      out.back().end = s.end;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

NaiveMetrics naive_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
  NaiveMetrics m{};
  const double n = static_cast<double>(tp + fp + tn + fn);
  m.accuracy = n > 0 ? (static_cast<double>(tp) + static_cast<double>(tn)) / n : 0.0;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

double naive_html_fraction(std::string_view content) {
  std::size_t lines = 0, hits = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const std::string_view line = content.substr(pos, nl - pos);
    ++lines;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      if (line[i] == '<' && (std::isalpha(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '/')) {
        ++hits;
        break;
      }
    }
    pos = nl + 1;
  }
  return lines == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(lines);
}

bool html_tags_balanced(std::string_view html) {
  static const std::set<std::string> kVoid = {"meta", "br", "hr", "img", "link", "input", "col"};
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = html.find('<', pos)) != std::string_view::npos) {
    const std::size_t close = html.find('>', pos);
    if (close == std::string_view::npos) return false;
    std::string_view tag = html.substr(pos + 1, close - pos - 1);
    pos = close + 1;
    if (tag.empty()) return false;
    if (tag[0] == '!') continue;  // doctype
    const bool closing = tag[0] == '/';
    if (closing) tag.remove_prefix(1);
    std::size_t e = 0;
    while (e < tag.size() && std::isalnum(static_cast<unsigned char>(tag[e]))) ++e;
    std::string name(tag.substr(0, e));
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    if (name.empty()) return false;
    if (kVoid.count(name) || (!tag.empty() && tag.back() == '/')) continue;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::string strip_ansi(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\x1b' && i + 1 < text.size() && text[i + 1] == '[') {
      std::size_t j = i + 2;
      while (j < text.size() && text[j] != 'm') ++j;
      i = j;
      continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;  // a constant series has no trend
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace vudetect::testkit
