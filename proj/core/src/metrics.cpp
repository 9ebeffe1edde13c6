#include "vudetect/metrics.hpp"

#include "vudetect/error.hpp"

namespace vudetect {

void ConfusionCounts::add(bool predicted, bool actual) {
  if (predicted) {
    ++(actual ? tp : fp);
  } else {
    ++(actual ? fn : tn);
  }
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

Metrics compute_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyEvaluation("no samples evaluated");
  Metrics m;
  m.counts = c;
  const auto ratio = [&](std::uint64_t num, std::uint64_t den) {
    if (den == 0) {
      m.degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  if (m.precision + m.recall == 0.0) m.degenerate = true;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

ConfusionCounts count_predictions(std::span<const double> probabilities,
                                  std::span<const double> labels, double threshold) {
  if (probabilities.size() != labels.size()) {
    throw ShapeMismatch("probabilities and labels differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    c.add(probabilities[i] >= threshold, labels[i] > 0.5);
  }
  return c;
}

std::set<std::string> file_keys(const std::vector<LabeledSnippet>& snippets) {
  std::set<std::string> keys;
  for (const auto& s : snippets) keys.insert(file_key(s));
  return keys;
}

Metrics evaluate(const SnippetProbability& score, const std::vector<LabeledSnippet>& test,
                 double threshold, const std::set<std::string>& training_files) {
  for (const auto& s : test) {
    if (training_files.count(file_key(s))) {
      throw LeakageDetected("test snippet from training file " + s.repo + " " + s.sha + " " +
                            s.path);
    }
  }
  ConfusionCounts c;
  for (const auto& s : test) c.add(score(s) >= threshold, s.vulnerable);
  return compute_metrics(c);
}

}  // namespace vudetect
