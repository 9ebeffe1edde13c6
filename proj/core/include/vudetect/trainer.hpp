#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vudetect/embedding.hpp"
#include "vudetect/labeler.hpp"
#include "vudetect/lstm.hpp"
#include "vudetect/metrics.hpp"
#include "vudetect/optimizer.hpp"

namespace vudetect {

struct TrainConfig {
  std::size_t neurons = 100;
  std::size_t epochs = 100;
  double dropout = 0.2;
  double recurrent_dropout = 0.2;
  std::size_t batch_size = 128;
  OptimizerKind optimizer = OptimizerKind::adam;
  /// 0 selects the optimizer's conventional default.
  double learning_rate = 0.0;
  std::size_t max_seq_len = 64;
  double threshold = 0.5;
  std::uint64_t seed = 1;
  LossKind loss = LossKind::soft_f1;
  double positive_weight = 1.0;
  /// Stop once validation F1 reaches this value.
  std::optional<double> target_f1;

  void validate() const;
  double effective_learning_rate() const;
};

nlohmann::ordered_json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Snippets as embedding-row indices (OOV dropped, truncated at the end to
/// max_seq_len) sharing one embedding table.
struct EncodedSet {
  std::shared_ptr<const Eigen::MatrixXd> table;
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<double> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t dim() const { return table ? static_cast<std::size_t>(table->cols()) : 0; }
  /// len x dim matrix of sample i.
  Eigen::MatrixXd sequence(std::size_t i) const;
};

std::shared_ptr<const Eigen::MatrixXd> embedding_table(const EmbeddingModel& embedding);

EncodedSet encode_snippets(const EmbeddingModel& embedding,
                           const std::vector<LabeledSnippet>& snippets, std::size_t max_seq_len,
                           std::shared_ptr<const Eigen::MatrixXd> table = nullptr);

/// embed_tokens, truncated to the first max_seq_len rows.
Eigen::MatrixXd encode_tokens(const EmbeddingModel& embedding,
                              const std::vector<std::string>& tokens, std::size_t max_seq_len);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  Metrics validation;
  double seconds = 0.0;
};

struct TrainResult {
  SequenceClassifier model;
  std::vector<EpochRecord> epochs;
};

SequenceClassifier make_classifier(std::size_t input_dim, const TrainConfig& cfg);

/// Mini-batch training; empty training sequences are skipped. Validation
/// metrics are recorded after every epoch. Throws EmptyDataset or
/// ShapeMismatch.
TrainResult train(SequenceClassifier model, const EncodedSet& train_set,
                  const EncodedSet& validation_set, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Probabilities for every sample; empty sequences score 0.
std::vector<double> predict_probabilities(const SequenceClassifier& model, const EncodedSet& set,
                                          std::size_t batch_size = 256);

struct Prediction {
  bool vulnerable = false;
  double probability = 0.0;
};

/// vulnerable iff probability >= threshold. Throws EmptySequence.
Prediction predict(const SequenceClassifier& model, const Eigen::MatrixXd& sequence,
                   double threshold);

struct Checkpoint {
  SequenceClassifier model;
  TrainConfig config;
};

// Checkpoint file: a JSON header line {magic, version, dims, config}, then
// W_x, W_h, b, dense w, dense b as little-endian float32 (column-major).
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vudetect
