#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vudetect {

/// Replaces string-literal tokens; real string tokens keep their quotes, so
/// this cannot collide with lexed text.
inline constexpr std::string_view kGenericString = "genericstring";

struct EmbeddingConfig {
  std::size_t dim = 200;
  std::size_t min_count = 10;
  std::size_t iterations = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  bool replace_strings = false;
  std::uint64_t seed = 1;
  /// More than one worker trains lock-free and is not reproducible.
  std::size_t workers = 1;
  double start_lr = 0.025;
  double end_lr = 0.0001;

  void validate() const;
};

nlohmann::ordered_json to_json(const EmbeddingConfig& cfg);
EmbeddingConfig embedding_config_from_json(const nlohmann::json& j);

/// A sentence is any token sequence (typically one file); windows never
/// cross sentences.
using Corpus = std::vector<std::vector<std::string>>;

/// Ordered by frequency descending, ties lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::size_t> find(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws EmptyVocab when no token reaches min_count.
Vocabulary build_vocab(const Corpus& corpus, const EmbeddingConfig& cfg);

std::vector<std::string> replace_strings(std::vector<std::string> tokens);

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EmbeddingModel {
  Vocabulary vocab;
  RowMatrixF vectors;  // vocab.size() x dim
  EmbeddingConfig config;

  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
};

struct EmbeddingTrainLog {
  /// Mean negative-sampling loss per (input, target) pair after each
  /// iteration, on a fixed sample of pairs. Computing it costs an extra pass.
  std::vector<double> epoch_loss;
};

/// Skip-gram with negative sampling. Bit-reproducible for a fixed seed when
/// cfg.workers == 1. Throws EmptyVocab.
EmbeddingModel train_embedding(const Corpus& corpus, const EmbeddingConfig& cfg,
                               EmbeddingTrainLog* log = nullptr);

/// One row per in-vocabulary token, OOV tokens skipped. String literals are
/// replaced first when the model was trained that way.
Eigen::MatrixXd embed_tokens(const EmbeddingModel& model, const std::vector<std::string>& tokens);

double cosine_similarity(const EmbeddingModel& model, std::size_t a, std::size_t b);

/// Top-k by cosine similarity, self excluded, ties broken lexicographically.
/// Throws UnknownToken.
std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingModel& model,
                                                              std::string_view token,
                                                              std::size_t k);

// Model file: a JSON header line {magic, version, dim, vocab_size, config},
// then per token: u32 byte length, token bytes, u64 frequency and dim
// little-endian float32 values.
std::string serialize_embedding(const EmbeddingModel& model);
EmbeddingModel deserialize_embedding(std::string_view bytes);
void save_embedding(const std::string& path, const EmbeddingModel& model);
EmbeddingModel load_embedding(const std::string& path);

}  // namespace vudetect
