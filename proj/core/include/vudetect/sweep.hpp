#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vudetect/commit.hpp"
#include "vudetect/dataset.hpp"
#include "vudetect/embedding.hpp"
#include "vudetect/labeler.hpp"
#include "vudetect/metrics.hpp"
#include "vudetect/trainer.hpp"

namespace vudetect {

/// Every knob of one dataset -> embedding -> classifier run.
struct PipelineSettings {
  SnippetConfig snippet;
  SplitPolicy split;
  EmbeddingConfig embedding;
  TrainConfig training;
};

/// Reference point for one-at-a-time sweeps: n=5, m=200, 30 neurons,
/// 10 epochs, dropout 0.2, batch 200, adam.
PipelineSettings baseline_settings();

/// Sets a named knob from its text form. Names: n, m, dim, min_count,
/// iterations, window, negatives, replace_strings, neurons, epochs, dropout,
/// recurrent_dropout, batch_size, optimizer, learning_rate, max_seq_len.
/// Throws ConfigError for unknown names or unparsable values.
void apply_parameter(PipelineSettings& settings, const std::string& name, const std::string& value);

enum class EvalSplit { validation, test };

/// Embedding corpus: token streams of the comment-stripped old and new
/// sources of every file, one sentence per file.
Corpus build_corpus(const std::vector<CommitRecord>& records);

struct PipelineOutcome {
  Dataset dataset;
  EmbeddingModel embedding;
  TrainResult training;
  Metrics metrics;  // on the requested split
};

/// Builds the dataset and embedding from `records`, trains, and evaluates.
PipelineOutcome run_pipeline(const std::vector<CommitRecord>& records,
                             const PipelineSettings& settings, EvalSplit split);

struct SweepSpec {
  std::string parameter;
  std::vector<std::string> values;
  PipelineSettings base = baseline_settings();
  EvalSplit split = EvalSplit::validation;
  std::size_t workers = 1;
};

struct SweepRow {
  std::string value;
  Metrics metrics;
  double wall_seconds = 0.0;
};

/// One full pipeline run per grid value with the base seed; rows in grid
/// order. Throws ConfigError on an empty grid.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<CommitRecord>& records);

/// CSV with header value,accuracy,precision,recall,f1,wall_seconds.
std::string sweep_table_csv(const std::vector<SweepRow>& rows);

}  // namespace vudetect
