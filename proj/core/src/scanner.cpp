#include "vudetect/scanner.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "vudetect/error.hpp"
#include "vudetect/hash.hpp"
#include "vudetect/lexer.hpp"

namespace vudetect {

ModelScorer::ModelScorer(Checkpoint checkpoint, EmbeddingModel embedding)
    : checkpoint_(std::move(checkpoint)), embedding_(std::move(embedding)) {
  if (embedding_.dim() != checkpoint_.model.input_dim()) {
    throw ShapeMismatch("embedding dim " + std::to_string(embedding_.dim()) +
                        " does not match classifier input dim " +
                        std::to_string(checkpoint_.model.input_dim()));
  }
  table_ = embedding_table(embedding_);
  model_fp_ = sha256_hex(serialize_checkpoint(checkpoint_));
  embedding_fp_ = sha256_hex(serialize_embedding(embedding_));
}

std::vector<double> ModelScorer::score(const std::vector<std::vector<std::string>>& windows) const {
  std::vector<LabeledSnippet> snippets(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) snippets[i].tokens = windows[i];
  const EncodedSet set =
      encode_snippets(embedding_, snippets, checkpoint_.config.max_seq_len, table_);
  return predict_probabilities(checkpoint_.model, set);
}

std::string config_fingerprint(const ScanOptions& o) {
  nlohmann::ordered_json j;
  j["n"] = o.snippet.n;
  j["m"] = o.snippet.m;
  j["threshold"] = o.threshold;
  j["vuln_type"] = o.vuln_type ? nlohmann::ordered_json(std::string(to_string(*o.vuln_type)))
                               : nlohmann::ordered_json(nullptr);
  return sha256_hex(j.dump());
}

ScanReport scan_file(std::string_view source, const SnippetScorer& scorer,
                     const ScanOptions& options, const std::string& path) {
  if (source.empty()) throw EmptyFile(path.empty() ? "empty source" : path + ": empty file");
  options.snippet.validate();

  ScanReport report;
  report.path = path;
  report.source = std::string(source);
  report.vuln_type = options.vuln_type;
  report.snippet = options.snippet;
  report.threshold = options.threshold;
  report.fingerprints = {scorer.model_fingerprint(), scorer.embedding_fingerprint(),
                         config_fingerprint(options)};

  const StrippedSource stripped = strip_comments_mapped(source);
  const TokenStream stream = tokenize(stripped.text);
  const std::vector<Window> windows = plan_windows(stripped.text, options.snippet);

  std::vector<std::vector<std::string>> contexts;
  contexts.reserve(windows.size());
  for (const auto& w : windows) contexts.push_back(tokens_within(stream, w.context));
  const std::vector<double> probs = scorer.score(contexts);
  if (probs.size() != windows.size()) throw ShapeMismatch("scorer returned wrong count");

  std::vector<double> stripped_profile(stripped.text.size(), 0.0);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    report.windows.push_back({windows[i].focus, windows[i].context, probs[i]});
    for (std::size_t c = windows[i].focus.start; c < windows[i].focus.end; ++c) {
      stripped_profile[c] = std::max(stripped_profile[c], probs[i]);
    }
  }

  report.profile.assign(source.size(), 0.0);
  for (std::size_t c = 0; c < stripped_profile.size(); ++c) {
    report.profile[stripped.to_original(c)] = stripped_profile[c];
  }

  for (std::size_t c = 0; c < report.profile.size();) {
    if (report.profile[c] < options.threshold) {
      ++c;
      continue;
    }
    Finding f;
    f.span.start = c;
    f.vuln_type = options.vuln_type;
    while (c < report.profile.size() && report.profile[c] >= options.threshold) {
      f.probability = std::max(f.probability, report.profile[c]);
      ++c;
    }
    f.span.end = c;
    f.bucket = bucketize(f.probability);
    report.findings.push_back(f);
  }
  return report;
}

}  // namespace vudetect
