#pragma once

// Deliberately naive reimplementations used to cross-check the library.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vudetect/commit.hpp"
#include "vudetect/labeler.hpp"
#include "vudetect/metrics.hpp"

namespace vudetect::testkit {

// Character state machine: code, single-quoted string, triple-quoted string.
std::string naive_strip_comments(std::string_view source);

// Per-character membership test, no interval arithmetic.
bool naive_overlaps_any(const CharSpan& span, const std::vector<VulnerableRange>& ranges);

// Set of 1-based old-file line numbers a file's hunks mark vulnerable.
std::set<std::size_t> naive_vulnerable_lines(const FileChange& fc);

// Character ranges of maximal runs of consecutive lines, on the given text.
std::vector<CharSpan> line_runs_to_spans(std::string_view text, const std::set<std::size_t>& lines);

struct NaiveMetrics {
  double accuracy, precision, recall, f1;
};

// Straight from the definitions, every ratio guarded separately.
NaiveMetrics naive_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn);

// Counts lines containing '<' followed by a letter or '/', one line at a time.
double naive_html_fraction(std::string_view content);

// Checks that every opened tag is closed in order; void elements are skipped.
bool html_tags_balanced(std::string_view html);

// Removes ANSI SGR escape sequences.
std::string strip_ansi(std::string_view text);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vudetect::testkit
