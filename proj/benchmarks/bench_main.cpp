#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "vudetect/embedding.hpp"
#include "vudetect/labeler.hpp"
#include "vudetect/lexer.hpp"
#include "vudetect/lstm.hpp"
#include "vudetect/random.hpp"

using namespace vudetect;

namespace {

// Plausible Python of roughly `lines` lines.
std::string synthetic_source(std::size_t lines, std::uint64_t seed) {
  static const char* kLines[] = {
      "import os\n",
      "def handler(request, cursor):\n",
      "    query = \"SELECT * FROM users WHERE id = %s\" % request.args['id']\n",
      "    cursor.execute(query)\n",
      "    # fetch everything\n",
      "    rows = [r for r in cursor.fetchall() if r[0] > 10]\n",
      "    subprocess.call(cmd, shell=True)\n",
      "    return {'rows': rows, 'count': len(rows)}\n",
      "\n",
      "class Store(object):\n",
      "    def __init__(self, path='/tmp/x'):\n",
      "        self.path = path  # keep it\n",
  };
  Rng rng(seed);
  std::string out;
  for (std::size_t i = 0; i < lines; ++i) out += kLines[rng.below(std::size(kLines))];
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string src = synthetic_source(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(src));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Tokenize)->Arg(100)->Arg(1000);

void BM_MakeSnippets(benchmark::State& state) {
  const std::string src = synthetic_source(200, 2);
  const SnippetConfig cfg{static_cast<std::size_t>(state.range(0)), 200};
  const std::vector<VulnerableRange> ranges = {{{src.size() / 3, src.size() / 2}}};
  for (auto _ : state) benchmark::DoNotOptimize(make_snippets(src, ranges, cfg));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_MakeSnippets)->Arg(5)->Arg(30);

struct Batch {
  std::vector<Eigen::MatrixXd> seqs;
  std::vector<const Eigen::MatrixXd*> refs;
  std::vector<double> labels;
};

Batch random_batch(std::size_t count, std::size_t len, std::size_t dim, Rng& rng) {
  Batch b;
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::MatrixXd s(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < s.size(); ++k) s.data()[k] = rng.normal();
    b.seqs.push_back(std::move(s));
    b.labels.push_back(rng.bernoulli(0.2) ? 1.0 : 0.0);
  }
  for (const auto& s : b.seqs) b.refs.push_back(&s);
  return b;
}

void BM_LstmForward(benchmark::State& state) {
  Rng rng(3);
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto model = SequenceClassifier::initialized(32, hidden, rng);
  const Batch b = random_batch(128, 40, 32, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(model, b.refs));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * b.seqs.size()));
}
BENCHMARK(BM_LstmForward)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LstmForwardBackward(benchmark::State& state) {
  Rng rng(4);
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto model = SequenceClassifier::initialized(32, hidden, rng);
  const Batch b = random_batch(128, 40, 32, rng);
  Eigen::VectorXd grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        forward_backward(model, b.refs, b.labels, {}, {0.2, 0.2}, &rng, grad));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * b.seqs.size()));
}
BENCHMARK(BM_LstmForwardBackward)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EmbeddingIteration(benchmark::State& state) {
  Corpus corpus;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto ts = tokenize(synthetic_source(100, 10 + s));
    std::vector<std::string> sentence;
    for (const auto& t : ts.tokens) sentence.push_back(t.text);
    corpus.push_back(std::move(sentence));
  }
  EmbeddingConfig cfg;
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.min_count = 1;
  cfg.iterations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_embedding(corpus, cfg));
}
BENCHMARK(BM_EmbeddingIteration)->Arg(32)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
