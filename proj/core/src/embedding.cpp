#include "vudetect/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "vudetect/error.hpp"
#include "vudetect/lexer.hpp"
#include "vudetect/random.hpp"

namespace vudetect {

void EmbeddingConfig::validate() const {
  if (dim == 0) throw ConfigError("embedding dim must be >= 1");
  if (min_count == 0) throw ConfigError("min_count must be >= 1");
  if (iterations == 0) throw ConfigError("iterations must be >= 1");
  if (window == 0) throw ConfigError("window must be >= 1");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (!(start_lr > 0.0) || !(end_lr >= 0.0)) throw ConfigError("learning rates must be positive");
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts)
    : tokens_(std::move(tokens)), counts_(std::move(counts)) {
  if (tokens_.size() != counts_.size()) throw ModelFormatError("vocabulary size mismatch");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw ModelFormatError("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(const Corpus& corpus, const EmbeddingConfig& cfg) {
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& sentence : corpus) {
    for (const auto& t : sentence) ++freq[t];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [t, c] : freq) {
    if (c >= cfg.min_count) kept.emplace_back(t, c);
  }
  if (kept.empty()) throw EmptyVocab("no token occurs at least min_count times");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  for (auto& [t, c] : kept) {
    tokens.push_back(std::move(t));
    counts.push_back(c);
  }
  return Vocabulary(std::move(tokens), std::move(counts));
}

std::vector<std::string> replace_strings(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (looks_like_string_literal(t)) t = kGenericString;
  }
  return tokens;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SgnsState {
  RowMatrixF& in;
  RowMatrixF& out;
  const std::vector<double>& cumulative;
  const EmbeddingConfig& cfg;
};

// Plain float updates for the single-worker path.
struct DirectAccess {
  static float load(const float& f) { return f; }
  static void store(float& f, float v) { f = v; }
};

// Hogwild: unsynchronized but race-free element access.
struct RelaxedAccess {
  static float load(const float& f) {
    return std::atomic_ref<float>(const_cast<float&>(f)).load(std::memory_order_relaxed);
  }
  static void store(float& f, float v) {
    std::atomic_ref<float>(f).store(v, std::memory_order_relaxed);
  }
};

template <typename Access>
void train_sentence(const std::vector<std::uint32_t>& sent, SgnsState& st, Rng& rng, double lr,
                    std::vector<float>& neu1e) {
  const std::size_t dim = st.cfg.dim;
  const double total_weight = st.cumulative.back();
  for (std::size_t i = 0; i < sent.size(); ++i) {
    const std::size_t reduce = rng.below(st.cfg.window);
    const std::size_t radius = st.cfg.window - reduce;
    const std::size_t lo = i > radius ? i - radius : 0;
    const std::size_t hi = std::min(sent.size() - 1, i + radius);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      float* v = st.in.row(sent[j]).data();
      std::fill(neu1e.begin(), neu1e.end(), 0.0f);
      for (std::size_t d = 0; d <= st.cfg.negatives; ++d) {
        std::size_t target = sent[i];
        double label = 1.0;
        if (d > 0) {
          const double u = rng.uniform() * total_weight;
          target = static_cast<std::size_t>(
              std::upper_bound(st.cumulative.begin(), st.cumulative.end(), u) -
              st.cumulative.begin());
          target = std::min(target, st.cumulative.size() - 1);
          if (target == sent[i]) continue;
          label = 0.0;
        }
        float* o = st.out.row(target).data();
        double f = 0.0;
        if constexpr (std::is_same_v<Access, DirectAccess>) {
          f = Eigen::Map<Eigen::VectorXf>(v, dim).dot(Eigen::Map<Eigen::VectorXf>(o, dim));
        } else {
          float acc = 0.0f;
          for (std::size_t k = 0; k < dim; ++k) acc += Access::load(v[k]) * Access::load(o[k]);
          f = acc;
        }
        const double p = sigmoid(f);
        const float g = static_cast<float>((label - p) * lr);
        if constexpr (std::is_same_v<Access, DirectAccess>) {
          Eigen::Map<Eigen::VectorXf> ov(o, dim);
          Eigen::Map<Eigen::VectorXf>(neu1e.data(), dim) += g * ov;
          ov += g * Eigen::Map<Eigen::VectorXf>(v, dim);
        } else {
          for (std::size_t k = 0; k < dim; ++k) {
            const float ok = Access::load(o[k]);
            neu1e[k] += g * ok;
            Access::store(o[k], ok + g * Access::load(v[k]));
          }
        }
      }
      if constexpr (std::is_same_v<Access, DirectAccess>) {
        Eigen::Map<Eigen::VectorXf>(v, dim) += Eigen::Map<Eigen::VectorXf>(neu1e.data(), dim);
      } else {
        for (std::size_t k = 0; k < dim; ++k) Access::store(v[k], Access::load(v[k]) + neu1e[k]);
      }
    }
  }
}

// Mean objective over a fixed sample of pairs and negatives, no updates.
double sgns_objective(const std::vector<std::vector<std::uint32_t>>& sentences,
                      const SgnsState& st, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t dim = st.cfg.dim;
  const double total_weight = st.cumulative.back();
  double loss = 0.0;
  std::uint64_t pairs = 0;
  for (const auto& sent : sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const std::size_t radius = st.cfg.window - rng.below(st.cfg.window);
      const std::size_t lo = i > radius ? i - radius : 0;
      const std::size_t hi = std::min(sent.size() - 1, i + radius);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const Eigen::Map<const Eigen::VectorXf> v(st.in.row(sent[j]).data(), dim);
        for (std::size_t d = 0; d <= st.cfg.negatives; ++d) {
          std::size_t target = sent[i];
          if (d > 0) {
            const double u = rng.uniform() * total_weight;
            target = std::min<std::size_t>(
                std::upper_bound(st.cumulative.begin(), st.cumulative.end(), u) -
                    st.cumulative.begin(),
                st.cumulative.size() - 1);
            if (target == sent[i]) continue;
          }
          const double p =
              sigmoid(v.dot(Eigen::Map<const Eigen::VectorXf>(st.out.row(target).data(), dim)));
          loss -= std::log(std::max(d == 0 ? p : 1.0 - p, 1e-12));
          ++pairs;
        }
      }
    }
  }
  return pairs == 0 ? 0.0 : loss / static_cast<double>(pairs);
}

}  // namespace

EmbeddingModel train_embedding(const Corpus& corpus, const EmbeddingConfig& cfg,
                               EmbeddingTrainLog* log) {
  cfg.validate();
  Corpus replaced;
  const Corpus* source = &corpus;
  if (cfg.replace_strings) {
    replaced.reserve(corpus.size());
    for (const auto& s : corpus) replaced.push_back(replace_strings(s));
    source = &replaced;
  }

  EmbeddingModel model;
  model.config = cfg;
  model.vocab = build_vocab(*source, cfg);
  const std::size_t vocab_size = model.vocab.size();

  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t total_tokens = 0;
  for (const auto& s : *source) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : s) {
      if (auto idx = model.vocab.find(t)) ids.push_back(static_cast<std::uint32_t>(*idx));
    }
    total_tokens += ids.size();
    if (ids.size() > 1) sentences.push_back(std::move(ids));
  }

  Rng rng(cfg.seed);
  model.vectors.resize(static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(cfg.dim));
  const float scale = 1.0f / static_cast<float>(cfg.dim);
  for (Eigen::Index r = 0; r < model.vectors.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.vectors.cols(); ++c) {
      model.vectors(r, c) = static_cast<float>(rng.uniform() - 0.5) * scale;
    }
  }
  RowMatrixF context = RowMatrixF::Zero(model.vectors.rows(), model.vectors.cols());

  std::vector<double> cumulative(vocab_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    acc += std::pow(static_cast<double>(model.vocab.count(i)), 0.75);
    cumulative[i] = acc;
  }
  SgnsState st{model.vectors, context, cumulative, cfg};

  const double total_work = static_cast<double>(std::max<std::uint64_t>(1, total_tokens)) *
                            static_cast<double>(cfg.iterations);
  auto lr_at = [&](std::uint64_t done) {
    const double progress = std::min(1.0, static_cast<double>(done) / total_work);
    return cfg.start_lr - (cfg.start_lr - cfg.end_lr) * progress;
  };

  std::uint64_t done = 0;
  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(1, sentences.size()));
  std::vector<Rng> worker_rngs;
  for (std::size_t w = 0; w < workers; ++w) worker_rngs.emplace_back(rng.fork());

  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    if (workers == 1) {
      std::vector<float> neu1e(cfg.dim);
      for (const auto& s : sentences) {
        train_sentence<DirectAccess>(s, st, worker_rngs[0], lr_at(done), neu1e);
        done += s.size();
      }
    } else {
      std::atomic<std::uint64_t> shared_done{done};
      {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            std::vector<float> neu1e(cfg.dim);
            for (std::size_t k = w; k < sentences.size(); k += workers) {
              const double lr = lr_at(shared_done.load(std::memory_order_relaxed));
              train_sentence<RelaxedAccess>(sentences[k], st, worker_rngs[w], lr, neu1e);
              shared_done.fetch_add(sentences[k].size(), std::memory_order_relaxed);
            }
          });
        }
      }
      done = shared_done.load();
    }
    // A running average during the pass is flattered by the large early
    // steps, so the objective is re-evaluated on the same sample each time.
    if (log) log->epoch_loss.push_back(sgns_objective(sentences, st, cfg.seed ^ 0x2545f4914f6cdd1dULL));
  }
  return model;
}

Eigen::MatrixXd embed_tokens(const EmbeddingModel& model, const std::vector<std::string>& tokens) {
  std::vector<std::size_t> rows;
  rows.reserve(tokens.size());
  for (const auto& t : tokens) {
    const bool generic = model.config.replace_strings && looks_like_string_literal(t);
    if (auto idx = model.vocab.find(generic ? kGenericString : std::string_view(t))) {
      rows.push_back(*idx);
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), model.vectors.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) =
        model.vectors.row(static_cast<Eigen::Index>(rows[r])).cast<double>();
  }
  return out;
}

double cosine_similarity(const EmbeddingModel& model, std::size_t a, std::size_t b) {
  const auto va = model.vectors.row(static_cast<Eigen::Index>(a)).cast<double>();
  const auto vb = model.vectors.row(static_cast<Eigen::Index>(b)).cast<double>();
  const double denom = va.norm() * vb.norm();
  if (denom == 0.0) return 0.0;
  return std::clamp(va.dot(vb) / denom, -1.0, 1.0);
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingModel& model,
                                                              std::string_view token,
                                                              std::size_t k) {
  const auto self = model.vocab.find(token);
  if (!self) throw UnknownToken("token not in vocabulary: " + std::string(token));
  std::vector<std::pair<std::string, double>> all;
  all.reserve(model.vocab.size());
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    if (i == *self) continue;
    all.emplace_back(model.vocab.token(i), cosine_similarity(model, *self, i));
  }
  k = std::min(k, all.size());
  auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
  all.resize(k);
  return all;
}

}  // namespace vudetect
