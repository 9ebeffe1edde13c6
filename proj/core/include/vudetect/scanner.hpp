#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vudetect/embedding.hpp"
#include "vudetect/labeler.hpp"
#include "vudetect/trainer.hpp"
#include "vudetect/vulnerability.hpp"

namespace vudetect {

enum class ConfidenceBucket { very_low, low, medium, high, very_high };

/// Cut points 0.2, 0.4, 0.6, 0.8, each belonging to the bucket above it.
ConfidenceBucket bucketize(double probability);
std::string_view to_string(ConfidenceBucket bucket);
ConfidenceBucket parse_bucket(std::string_view name);

struct Finding {
  CharSpan span;  // original source coordinates
  double probability = 0.0;  // maximum over the span
  ConfidenceBucket bucket = ConfidenceBucket::very_low;
  std::optional<VulnerabilityType> vuln_type;
  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ScoredWindow {
  CharSpan focus;    // comment-stripped coordinates
  CharSpan context;  // comment-stripped coordinates
  double probability = 0.0;
  friend bool operator==(const ScoredWindow&, const ScoredWindow&) = default;
};

struct Fingerprints {
  std::string model;
  std::string embedding;
  std::string config;
  friend bool operator==(const Fingerprints&, const Fingerprints&) = default;
};

struct ScanReport {
  std::string path;
  std::string source;  // original text, comments included
  std::optional<VulnerabilityType> vuln_type;
  SnippetConfig snippet;
  double threshold = 0.5;
  std::vector<ScoredWindow> windows;
  std::vector<double> profile;  // one value per byte of `source`
  std::vector<Finding> findings;  // sorted by start
  Fingerprints fingerprints;
  friend bool operator==(const ScanReport& a, const ScanReport& b) {
    return a.path == b.path && a.source == b.source && a.vuln_type == b.vuln_type &&
           a.snippet.n == b.snippet.n && a.snippet.m == b.snippet.m &&
           a.threshold == b.threshold && a.windows == b.windows && a.profile == b.profile &&
           a.findings == b.findings && a.fingerprints == b.fingerprints;
  }
};

/// Probability that a context window's tokens are vulnerable.
class SnippetScorer {
 public:
  virtual ~SnippetScorer() = default;
  virtual std::vector<double> score(const std::vector<std::vector<std::string>>& windows) const = 0;
  virtual std::string model_fingerprint() const { return {}; }
  virtual std::string embedding_fingerprint() const { return {}; }
};

/// Embedding + classifier; windows without known tokens score 0.
class ModelScorer final : public SnippetScorer {
 public:
  ModelScorer(Checkpoint checkpoint, EmbeddingModel embedding);
  std::vector<double> score(const std::vector<std::vector<std::string>>& windows) const override;
  std::string model_fingerprint() const override { return model_fp_; }
  std::string embedding_fingerprint() const override { return embedding_fp_; }

 private:
  Checkpoint checkpoint_;
  EmbeddingModel embedding_;
  std::shared_ptr<const Eigen::MatrixXd> table_;
  std::string model_fp_;
  std::string embedding_fp_;
};

struct ScanOptions {
  SnippetConfig snippet;
  double threshold = 0.5;
  std::optional<VulnerabilityType> vuln_type;
};

/// Windows the comment-stripped source exactly like the labeler, scores each
/// context, and gives every character of a focus window that window's
/// probability (maximum where several cover it). Findings are the maximal
/// runs at or above the threshold in original coordinates. Throws EmptyFile.
ScanReport scan_file(std::string_view source, const SnippetScorer& scorer,
                     const ScanOptions& options, const std::string& path = {});

std::string config_fingerprint(const ScanOptions& options);

enum class ReportFormat { ansi, html, structured };

/// Throws UnknownFormat.
ReportFormat parse_report_format(std::string_view name);
std::string_view file_extension(ReportFormat format);

std::string render_report(const ScanReport& report, ReportFormat format);

/// Inverse of the structured rendering. Throws DumpFormatError.
ScanReport load_structured_report(std::string_view text);

}  // namespace vudetect
