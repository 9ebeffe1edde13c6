#include "vudetect/sweep.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "vudetect/error.hpp"
#include "vudetect/lexer.hpp"
#include "vudetect/parallel.hpp"

namespace vudetect {

PipelineSettings baseline_settings() {
  PipelineSettings s;
  s.training.neurons = 30;
  s.training.epochs = 10;
  s.training.dropout = 0.2;
  s.training.recurrent_dropout = 0.2;
  s.training.batch_size = 200;
  s.training.optimizer = OptimizerKind::adam;
  return s;
}

namespace {

std::size_t to_count(const std::string& name, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(name + ": expected a count, got '" + v + "'");
  return static_cast<std::size_t>(out);
}

double to_real(const std::string& name, const std::string& v) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(name + ": expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& name, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(name + ": expected true/false, got '" + v + "'");
}

}  // namespace

void apply_parameter(PipelineSettings& s, const std::string& name, const std::string& value) {
  if (name == "n") {
    s.snippet.n = to_count(name, value);
  } else if (name == "m") {
    s.snippet.m = to_count(name, value);
  } else if (name == "dim") {
    s.embedding.dim = to_count(name, value);
  } else if (name == "min_count") {
    s.embedding.min_count = to_count(name, value);
  } else if (name == "iterations") {
    s.embedding.iterations = to_count(name, value);
  } else if (name == "window") {
    s.embedding.window = to_count(name, value);
  } else if (name == "negatives") {
    s.embedding.negatives = to_count(name, value);
  } else if (name == "replace_strings") {
    s.embedding.replace_strings = to_bool(name, value);
  } else if (name == "neurons") {
    s.training.neurons = to_count(name, value);
  } else if (name == "epochs") {
    s.training.epochs = to_count(name, value);
  } else if (name == "dropout") {
    s.training.dropout = to_real(name, value);
  } else if (name == "recurrent_dropout") {
    s.training.recurrent_dropout = to_real(name, value);
  } else if (name == "batch_size") {
    s.training.batch_size = to_count(name, value);
  } else if (name == "optimizer") {
    try {
      s.training.optimizer = parse_optimizer(value);
    } catch (const UnknownOptimizer& e) {
      throw ConfigError(e.what());
    }
  } else if (name == "learning_rate") {
    s.training.learning_rate = to_real(name, value);
  } else if (name == "max_seq_len") {
    s.training.max_seq_len = to_count(name, value);
  } else {
    throw ConfigError("unknown sweep parameter: " + name);
  }
}

Corpus build_corpus(const std::vector<CommitRecord>& records) {
  Corpus corpus;
  auto add = [&](const std::string& source) {
    try {
      const TokenStream ts = tokenize(strip_comments(source));
      std::vector<std::string> sentence;
      sentence.reserve(ts.tokens.size());
      for (const auto& t : ts.tokens) sentence.push_back(t.text);
      if (!sentence.empty()) corpus.push_back(std::move(sentence));
    } catch (const LexError&) {
      // invalid UTF-8 sources contribute nothing
    }
  };
  for (const auto& r : records) {
    for (const auto& f : r.files) {
      add(f.old_source);
      add(f.new_source);
    }
  }
  return corpus;
}

PipelineOutcome run_pipeline(const std::vector<CommitRecord>& records,
                             const PipelineSettings& settings, EvalSplit split) {
  PipelineOutcome out;
  out.dataset = build_dataset(records, settings.snippet, settings.split);
  out.embedding = train_embedding(build_corpus(records), settings.embedding);
  const auto table = embedding_table(out.embedding);
  const std::size_t len = settings.training.max_seq_len;
  const EncodedSet train_set = encode_snippets(out.embedding, out.dataset.train, len, table);
  const EncodedSet val_set = encode_snippets(out.embedding, out.dataset.validation, len, table);
  SequenceClassifier model = make_classifier(out.embedding.dim(), settings.training);
  out.training = train(std::move(model), train_set, val_set, settings.training);

  const auto& eval_snippets = split == EvalSplit::test ? out.dataset.test : out.dataset.validation;
  const EncodedSet eval_set = encode_snippets(out.embedding, eval_snippets, len, table);
  const auto probs = predict_probabilities(out.training.model, eval_set);
  out.metrics = evaluate(
      [&](const LabeledSnippet& s) {
        return probs[static_cast<std::size_t>(&s - eval_snippets.data())];
      },
      eval_snippets, settings.training.threshold, file_keys(out.dataset.train));
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<CommitRecord>& records) {
  if (spec.values.empty()) throw ConfigError("sweep grid is empty");
  std::vector<PipelineSettings> points;
  for (const auto& v : spec.values) {
    PipelineSettings s = spec.base;
    apply_parameter(s, spec.parameter, v);
    s.snippet.validate();
    s.embedding.validate();
    s.training.validate();
    points.push_back(s);
  }
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), spec.workers, [&](std::size_t i) {
    const auto started = std::chrono::steady_clock::now();
    const PipelineOutcome o = run_pipeline(records, points[i], spec.split);
    rows[i].value = spec.values[i];
    rows[i].metrics = o.metrics;
    rows[i].wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  });
  return rows;
}

std::string sweep_table_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "value,accuracy,precision,recall,f1,wall_seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%.3f\n", r.metrics.accuracy,
                  r.metrics.precision, r.metrics.recall, r.metrics.f1, r.wall_seconds);
    out << r.value << buf;
  }
  return out.str();
}

}  // namespace vudetect
