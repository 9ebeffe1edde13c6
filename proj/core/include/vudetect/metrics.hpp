#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vudetect/dataset.hpp"

namespace vudetect {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(bool predicted, bool actual);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
  /// Set when some ratio had a zero denominator and was reported as 0.
  bool degenerate = false;
};

/// precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2PR/(P+R),
/// accuracy = (TP+TN)/total. Throws EmptyEvaluation on zero total.
Metrics compute_metrics(const ConfusionCounts& counts);

/// Harmonic mean of precision and recall (0 when both are 0).
double f1_score(double precision, double recall);

/// A prediction is positive iff probability >= threshold.
ConfusionCounts count_predictions(std::span<const double> probabilities,
                                  std::span<const double> labels, double threshold);

using SnippetProbability = std::function<double(const LabeledSnippet&)>;

/// Scores every test snippet; throws LeakageDetected if any test snippet
/// comes from a file in `training_files` (see file_key).
Metrics evaluate(const SnippetProbability& score, const std::vector<LabeledSnippet>& test,
                 double threshold, const std::set<std::string>& training_files = {});

std::set<std::string> file_keys(const std::vector<LabeledSnippet>& snippets);

}  // namespace vudetect
