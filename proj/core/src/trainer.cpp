#include "vudetect/trainer.hpp"

#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "binary_io.hpp"
#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"
#include "vudetect/random.hpp"

namespace vudetect {

void TrainConfig::validate() const {
  if (neurons == 0) throw ConfigError("neurons must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
  if (!(recurrent_dropout >= 0.0 && recurrent_dropout < 1.0)) {
    throw ConfigError("recurrent_dropout must lie in [0,1)");
  }
  if (max_seq_len == 0) throw ConfigError("max_seq_len must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0,1]");
  if (learning_rate < 0.0) throw ConfigError("learning_rate must be non-negative");
  if (positive_weight <= 0.0) throw ConfigError("positive_weight must be positive");
}

double TrainConfig::effective_learning_rate() const {
  return learning_rate > 0.0 ? learning_rate : default_learning_rate(optimizer);
}

nlohmann::ordered_json to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["neurons"] = cfg.neurons;
  j["epochs"] = cfg.epochs;
  j["dropout"] = cfg.dropout;
  j["recurrent_dropout"] = cfg.recurrent_dropout;
  j["batch_size"] = cfg.batch_size;
  j["optimizer"] = std::string(to_string(cfg.optimizer));
  j["learning_rate"] = cfg.learning_rate;
  j["max_seq_len"] = cfg.max_seq_len;
  j["threshold"] = cfg.threshold;
  j["seed"] = cfg.seed;
  j["loss"] = cfg.loss == LossKind::soft_f1 ? "soft_f1" : "weighted_bce";
  j["positive_weight"] = cfg.positive_weight;
  j["target_f1"] = cfg.target_f1 ? nlohmann::ordered_json(*cfg.target_f1) : nlohmann::ordered_json(nullptr);
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.neurons = j.value("neurons", cfg.neurons);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.dropout = j.value("dropout", cfg.dropout);
  cfg.recurrent_dropout = j.value("recurrent_dropout", cfg.recurrent_dropout);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.optimizer = parse_optimizer(j.value("optimizer", std::string("adam")));
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.max_seq_len = j.value("max_seq_len", cfg.max_seq_len);
  cfg.threshold = j.value("threshold", cfg.threshold);
  cfg.seed = j.value("seed", cfg.seed);
  const std::string loss = j.value("loss", std::string("soft_f1"));
  if (loss == "soft_f1") {
    cfg.loss = LossKind::soft_f1;
  } else if (loss == "weighted_bce") {
    cfg.loss = LossKind::weighted_bce;
  } else {
    throw ConfigError("unknown loss: " + loss);
  }
  cfg.positive_weight = j.value("positive_weight", cfg.positive_weight);
  if (j.contains("target_f1") && !j["target_f1"].is_null()) {
    cfg.target_f1 = j["target_f1"].get<double>();
  }
  return cfg;
}

Eigen::MatrixXd EncodedSet::sequence(std::size_t i) const {
  const auto& ids = rows[i];
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), table->cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = table->row(ids[r]);
  }
  return out;
}

std::shared_ptr<const Eigen::MatrixXd> embedding_table(const EmbeddingModel& embedding) {
  return std::make_shared<const Eigen::MatrixXd>(embedding.vectors.cast<double>());
}

EncodedSet encode_snippets(const EmbeddingModel& embedding,
                           const std::vector<LabeledSnippet>& snippets, std::size_t max_seq_len,
                           std::shared_ptr<const Eigen::MatrixXd> table) {
  EncodedSet set;
  set.table = table ? std::move(table) : embedding_table(embedding);
  set.rows.reserve(snippets.size());
  set.labels.reserve(snippets.size());
  const bool generic = embedding.config.replace_strings;
  for (const auto& s : snippets) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : s.tokens) {
      if (ids.size() >= max_seq_len) break;
      const bool is_string = generic && looks_like_string_literal(t);
      if (auto idx = embedding.vocab.find(is_string ? kGenericString : std::string_view(t))) {
        ids.push_back(static_cast<std::uint32_t>(*idx));
      }
    }
    set.rows.push_back(std::move(ids));
    set.labels.push_back(s.vulnerable ? 1.0 : 0.0);
  }
  return set;
}

Eigen::MatrixXd encode_tokens(const EmbeddingModel& embedding,
                              const std::vector<std::string>& tokens, std::size_t max_seq_len) {
  Eigen::MatrixXd m = embed_tokens(embedding, tokens);
  if (static_cast<std::size_t>(m.rows()) > max_seq_len) {
    m.conservativeResize(static_cast<Eigen::Index>(max_seq_len), Eigen::NoChange);
  }
  return m;
}

SequenceClassifier make_classifier(std::size_t input_dim, const TrainConfig& cfg) {
  Rng rng(cfg.seed);
  return SequenceClassifier::initialized(input_dim, cfg.neurons, rng);
}

std::vector<double> predict_probabilities(const SequenceClassifier& model, const EncodedSet& set,
                                          std::size_t batch_size) {
  std::vector<double> out(set.size(), 0.0);
  std::vector<std::size_t> pending;
  std::vector<Eigen::MatrixXd> mats;
  std::vector<const Eigen::MatrixXd*> refs;
  auto flush = [&] {
    if (pending.empty()) return;
    refs.clear();
    for (const auto& m : mats) refs.push_back(&m);
    const auto probs = forward_batch(model, refs);
    for (std::size_t k = 0; k < pending.size(); ++k) out[pending[k]] = probs[k];
    pending.clear();
    mats.clear();
  };
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.rows[i].empty()) continue;
    pending.push_back(i);
    mats.push_back(set.sequence(i));
    if (pending.size() >= std::max<std::size_t>(1, batch_size)) flush();
  }
  flush();
  return out;
}

Prediction predict(const SequenceClassifier& model, const Eigen::MatrixXd& sequence,
                   double threshold) {
  const double p = model.forward(sequence);
  return {p >= threshold, p};
}

TrainResult train(SequenceClassifier model, const EncodedSet& train_set,
                  const EncodedSet& validation_set, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (train_set.size() == 0 || validation_set.size() == 0) {
    throw EmptyDataset("training and validation sets must be non-empty");
  }
  if (train_set.dim() != model.input_dim() || validation_set.dim() != model.input_dim()) {
    throw ShapeMismatch("embedding dim " + std::to_string(train_set.dim()) +
                        " does not match classifier input dim " +
                        std::to_string(model.input_dim()));
  }
  TrainResult result;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    if (!train_set.rows[i].empty()) order.push_back(i);
  }
  if (order.empty() && cfg.epochs > 0) throw EmptyDataset("every training sequence is empty");

  Rng rng(cfg.seed ^ 0x5bd1e995ULL);
  OptimizerSettings opt;
  opt.kind = cfg.optimizer;
  opt.learning_rate = cfg.effective_learning_rate();
  if (cfg.optimizer != OptimizerKind::adam) opt.epsilon = 1e-7;
  OptimizerState state;
  const LossSettings loss{cfg.loss, cfg.positive_weight};
  const DropoutRates dropout{cfg.dropout, cfg.recurrent_dropout};

  Eigen::VectorXd grad;
  std::vector<Eigen::MatrixXd> mats;
  std::vector<const Eigen::MatrixXd*> refs;
  std::vector<double> labels;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      mats.clear();
      labels.clear();
      for (std::size_t k = begin; k < end; ++k) {
        mats.push_back(train_set.sequence(order[k]));
        labels.push_back(train_set.labels[order[k]]);
      }
      refs.clear();
      for (const auto& m : mats) refs.push_back(&m);
      const auto r = forward_backward(model, refs, labels, loss, dropout, &rng, grad);
      optimizer_step(opt, model.params(), grad, state);
      loss_sum += r.loss;
      ++batches;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = batches == 0 ? 0.0 : loss_sum / static_cast<double>(batches);
    const auto probs = predict_probabilities(model, validation_set);
    rec.validation =
        compute_metrics(count_predictions(probs, validation_set.labels, cfg.threshold));
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (cfg.target_f1 && rec.validation.f1 >= *cfg.target_f1) break;
  }
  result.model = std::move(model);
  return result;
}

namespace {
constexpr const char* kMagic = "vudetect-lstm";
constexpr int kVersion = 1;
}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  nlohmann::ordered_json header;
  header["magic"] = kMagic;
  header["version"] = kVersion;
  header["dims"] = {{"input", ck.model.input_dim()}, {"hidden", ck.model.hidden_dim()}};
  header["config"] = to_json(ck.config);
  std::string out = header.dump() + "\n";
  for (Eigen::Index i = 0; i < ck.model.params().size(); ++i) {
    detail::put_f32(out, static_cast<float>(ck.model.params()[i]));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  detail::ByteReader in(bytes);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.line());
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("checkpoint header: ") + e.what());
  }
  if (header.value("magic", "") != kMagic) throw ModelFormatError("not a classifier checkpoint");
  if (header.value("version", 0) != kVersion) throw ModelFormatError("unsupported checkpoint version");
  Checkpoint ck;
  try {
    ck.config = train_config_from_json(header.at("config"));
    const std::size_t d = header.at("dims").at("input").get<std::size_t>();
    const std::size_t h = header.at("dims").at("hidden").get<std::size_t>();
    if (d == 0 || h == 0) throw ModelFormatError("checkpoint dims must be positive");
    if (h != ck.config.neurons) throw ModelFormatError("hidden size disagrees with config");
    ck.model = SequenceClassifier(d, h);
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw ModelFormatError(std::string("checkpoint config: ") + e.what());
  }
  auto& p = ck.model.params();
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = in.f32();
  if (!in.done()) throw ModelFormatError("trailing bytes after checkpoint tensors");
  if (!ck.model.all_finite()) throw ModelFormatError("non-finite parameter in checkpoint");
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  write_text_file(path, serialize_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_text_file(path));
}

}  // namespace vudetect
