#include <cmath>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "vudetect/embedding.hpp"
#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"

namespace vudetect {

namespace {
constexpr const char* kMagic = "vudetect-embedding";
constexpr int kVersion = 1;
}  // namespace

nlohmann::ordered_json to_json(const EmbeddingConfig& cfg) {
  return {{"dim", cfg.dim},
          {"min_count", cfg.min_count},
          {"iterations", cfg.iterations},
          {"window", cfg.window},
          {"negatives", cfg.negatives},
          {"replace_strings", cfg.replace_strings},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"start_lr", cfg.start_lr},
          {"end_lr", cfg.end_lr}};
}

EmbeddingConfig embedding_config_from_json(const nlohmann::json& j) {
  EmbeddingConfig cfg;
  cfg.dim = j.value("dim", cfg.dim);
  cfg.min_count = j.value("min_count", cfg.min_count);
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.window = j.value("window", cfg.window);
  cfg.negatives = j.value("negatives", cfg.negatives);
  cfg.replace_strings = j.value("replace_strings", cfg.replace_strings);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.start_lr = j.value("start_lr", cfg.start_lr);
  cfg.end_lr = j.value("end_lr", cfg.end_lr);
  return cfg;
}

std::string serialize_embedding(const EmbeddingModel& model) {
  nlohmann::ordered_json header;
  header["magic"] = kMagic;
  header["version"] = kVersion;
  header["dim"] = model.dim();
  header["vocab_size"] = model.vocab.size();
  header["config"] = to_json(model.config);
  std::string out = header.dump() + "\n";
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    const std::string& t = model.vocab.token(i);
    detail::put_u32(out, static_cast<std::uint32_t>(t.size()));
    out += t;
    detail::put_u64(out, model.vocab.count(i));
    for (Eigen::Index c = 0; c < model.vectors.cols(); ++c) {
      detail::put_f32(out, model.vectors(static_cast<Eigen::Index>(i), c));
    }
  }
  return out;
}

EmbeddingModel deserialize_embedding(std::string_view bytes) {
  detail::ByteReader in(bytes);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.line());
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("embedding header: ") + e.what());
  }
  if (header.value("magic", "") != kMagic) throw ModelFormatError("not an embedding model file");
  if (header.value("version", 0) != kVersion) throw ModelFormatError("unsupported embedding version");
  const std::size_t dim = header.value("dim", std::size_t{0});
  const std::size_t vocab_size = header.value("vocab_size", std::size_t{0});
  EmbeddingModel model;
  model.config = embedding_config_from_json(header.value("config", nlohmann::json::object()));
  if (dim == 0 || dim != model.config.dim) throw ModelFormatError("embedding dim mismatch");

  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  model.vectors.resize(static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < vocab_size; ++i) {
    const std::uint32_t len = in.u32();
    tokens.emplace_back(in.take(len));
    counts.push_back(in.u64());
    for (std::size_t c = 0; c < dim; ++c) {
      const float v = in.f32();
      if (!std::isfinite(v)) throw ModelFormatError("non-finite embedding value");
      model.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  if (!in.done()) throw ModelFormatError("trailing bytes after embedding records");
  model.vocab = Vocabulary(std::move(tokens), std::move(counts));
  return model;
}

void save_embedding(const std::string& path, const EmbeddingModel& model) {
  write_text_file(path, serialize_embedding(model));
}

EmbeddingModel load_embedding(const std::string& path) {
  return deserialize_embedding(read_text_file(path));
}

}  // namespace vudetect
