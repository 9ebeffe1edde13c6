#include "vudetect_cli/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "vudetect/commit.hpp"
#include "vudetect/dataset.hpp"
#include "vudetect/embedding.hpp"
#include "vudetect/error.hpp"
#include "vudetect/filters.hpp"
#include "vudetect/http.hpp"
#include "vudetect/jsonl.hpp"
#include "vudetect/lexer.hpp"
#include "vudetect/live_source.hpp"
#include "vudetect/metrics.hpp"
#include "vudetect/scanner.hpp"
#include "vudetect/search.hpp"
#include "vudetect/sweep.hpp"
#include "vudetect/trainer.hpp"

namespace vudetect::cli {

namespace fs = std::filesystem;

namespace {

struct Global {
  std::uint64_t seed = 1;
  std::string log_level = "info";
};

struct MineOptions {
  std::string source = "dump";
  std::string dump;
  std::string cassette;
  std::string record;
  std::string api_base = LiveConfig{}.api_base;
  std::string vuln_type;
  std::string keywords;
  std::size_t limit = 1000;
  std::size_t workers = 4;
  double requests_per_second = 1.0;
  std::string out = "commits.jsonl";
  FilterConfig filters;
  bool no_filters = false;
};

struct LabelOptions {
  std::string commits;
  std::string out_dir = "dataset";
  SnippetConfig snippet;
  double train_ratio = 0.70;
  double validation_ratio = 0.15;
  bool include_new = false;
  bool gzip = false;
};

struct EmbedOptions {
  std::vector<std::string> commits;
  std::vector<std::string> sources;
  std::string out = "embedding.bin";
  EmbeddingConfig cfg;
};

struct TrainOptions {
  std::string train;
  std::string validation;
  std::string embedding;
  std::string out = "model.ckpt";
  std::string log;
  TrainConfig cfg;
  std::string optimizer = "adam";
  std::string loss = "soft_f1";
  double target_f1 = 0.0;
};

struct SweepOptions {
  std::string commits;
  std::string parameter;
  std::vector<std::string> values;
  std::vector<std::string> overrides;
  std::string split = "validation";
  std::size_t workers = 1;
  std::string out;
};

struct EvalOptions {
  std::string dataset;
  std::string train_dataset;
  std::string model;
  std::string embedding;
  double threshold = -1.0;
};

struct ScanOptionsCli {
  std::vector<std::string> paths;
  std::string model;
  std::string embedding;
  std::string vuln_type;
  std::string format = "ansi";
  double threshold = 0.5;
  std::string out;
  SnippetConfig snippet;
};

struct NeighborOptions {
  std::string embedding;
  std::string token;
  std::size_t k = 10;
};

std::string default_keywords_path() {
  for (const char* p : {VUDETECT_INSTALLED_KEYWORDS, VUDETECT_SOURCE_KEYWORDS}) {
    if (fs::exists(p)) return p;
  }
  throw ConfigError("no keyword file found; pass --keywords");
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is required");
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path);
}

std::vector<LabeledSnippet> load_split(const std::string& path) {
  require_file(path, "dataset");
  return load_dataset(path);
}

int cmd_mine(const MineOptions& o) {
  const VulnerabilityType type = parse_vulnerability_type(o.vuln_type);
  const KeywordTable keywords =
      KeywordTable::load(o.keywords.empty() ? default_keywords_path() : o.keywords);
  o.filters.validate();

  std::vector<CommitRecord> records;
  if (o.source == "dump") {
    require_file(o.dump, "--dump");
    records = search_commits(type, DumpSource{o.dump}, keywords, o.limit);
  } else if (o.source == "live") {
    LiveConfig cfg;
    cfg.api_base = o.api_base;
    cfg.workers = o.workers;
    cfg.requests_per_second = o.requests_per_second;
    if (const char* token = std::getenv(kApiTokenEnv)) cfg.token = token;
    std::shared_ptr<HttpTransport> transport;
    if (!o.cassette.empty()) {
      require_file(o.cassette, "--cassette");
      transport = CassetteTransport::load(o.cassette);
      cfg.requests_per_second = 0.0;
    } else {
      transport = std::make_shared<HttplibTransport>();
    }
    std::shared_ptr<RecordingTransport> recorder;
    if (!o.record.empty()) {
      recorder = std::make_shared<RecordingTransport>(transport);
      transport = recorder;
    }
    auto client = std::make_shared<LiveCommitSource>(cfg, transport);
    records = search_commits(type, LiveSource{client}, keywords, o.limit);
    if (recorder) recorder->save(o.record);
  } else {
    throw ConfigError("--source must be 'dump' or 'live'");
  }
  spdlog::info("{} commits match {}", records.size(), o.vuln_type);

  if (!o.no_filters) {
    FilterStats stats;
    records = apply_filters(records, o.filters, &stats);
    spdlog::info("filters: {} accepted, {} commits and {} files rejected", stats.accepted,
                 stats.rejected_commits.size(), stats.rejected_files);
    const std::size_t before = records.size();
    records = dedup_commits(records);
    spdlog::info("dedup: {} -> {} commits", before, records.size());
  }
  write_commits(o.out, records);
  std::cout << "wrote " << records.size() << " commits to " << o.out << "\n";
  return kExitOk;
}

int cmd_label(const LabelOptions& o, const Global& g) {
  require_file(o.commits, "--commits");
  SplitPolicy policy;
  policy.train = o.train_ratio;
  policy.validation = o.validation_ratio;
  policy.seed = g.seed;
  policy.include_new_sources = o.include_new;
  const Dataset ds = build_dataset(load_commits(o.commits), o.snippet, policy);
  fs::create_directories(o.out_dir);
  const std::string ext = o.gzip ? ".jsonl.gz" : ".jsonl";
  const std::pair<const char*, const std::vector<LabeledSnippet>*> splits[] = {
      {"train", &ds.train}, {"validation", &ds.validation}, {"test", &ds.test}};
  const SplitStats* stats[] = {&ds.train_stats, &ds.validation_stats, &ds.test_stats};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string path = (fs::path(o.out_dir) / (std::string(splits[i].first) + ext)).string();
    write_dataset(path, *splits[i].second);
    std::printf("%-10s files=%zu snippets=%zu vulnerable=%.1f%%\n", splits[i].first,
                stats[i]->files, stats[i]->snippets, 100.0 * stats[i]->vulnerable_ratio());
  }
  if (ds.skipped_files > 0) spdlog::warn("{} files skipped", ds.skipped_files);
  return kExitOk;
}

int cmd_embed(EmbedOptions o, const Global& g) {
  o.cfg.seed = g.seed;
  Corpus corpus;
  for (const auto& path : o.commits) {
    require_file(path, "--commits");
    Corpus part = build_corpus(load_commits(path));
    corpus.insert(corpus.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  for (const auto& path : o.sources) {
    require_file(path, "--source-file");
    const TokenStream ts = tokenize(strip_comments(read_text_file(path)));
    std::vector<std::string> sentence;
    for (const auto& t : ts.tokens) sentence.push_back(t.text);
    corpus.push_back(std::move(sentence));
  }
  if (corpus.empty()) throw ConfigError("no corpus: pass --commits or --source-file");
  EmbeddingTrainLog log;
  const bool trace_loss = spdlog::should_log(spdlog::level::debug);
  const EmbeddingModel model = train_embedding(corpus, o.cfg, trace_loss ? &log : nullptr);
  for (std::size_t i = 0; i < log.epoch_loss.size(); ++i) {
    spdlog::debug("iteration {} loss {:.5f}", i + 1, log.epoch_loss[i]);
  }
  save_embedding(o.out, model);
  std::cout << "vocabulary " << model.vocab.size() << ", dim " << model.dim() << ", wrote "
            << o.out << "\n";
  return kExitOk;
}

int cmd_train(TrainOptions o, const Global& g) {
  o.cfg.seed = g.seed;
  o.cfg.optimizer = parse_optimizer(o.optimizer);
  if (o.loss == "soft_f1") {
    o.cfg.loss = LossKind::soft_f1;
  } else if (o.loss == "weighted_bce") {
    o.cfg.loss = LossKind::weighted_bce;
  } else {
    throw ConfigError("--loss must be soft_f1 or weighted_bce");
  }
  if (o.target_f1 > 0.0) o.cfg.target_f1 = o.target_f1;
  o.cfg.validate();
  require_file(o.embedding, "--embedding");
  const EmbeddingModel embedding = load_embedding(o.embedding);
  const auto table = embedding_table(embedding);
  const EncodedSet train_set =
      encode_snippets(embedding, load_split(o.train), o.cfg.max_seq_len, table);
  const EncodedSet val_set =
      encode_snippets(embedding, load_split(o.validation), o.cfg.max_seq_len, table);

  std::vector<std::string> log_lines = {"epoch,train_loss,accuracy,precision,recall,f1,seconds"};
  const auto on_epoch = [&](const EpochRecord& r) {
    spdlog::info("epoch {:3d} loss {:.4f} val acc {:.4f} prec {:.4f} rec {:.4f} f1 {:.4f}",
                 r.epoch, r.train_loss, r.validation.accuracy, r.validation.precision,
                 r.validation.recall, r.validation.f1);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f", r.epoch, r.train_loss,
                  r.validation.accuracy, r.validation.precision, r.validation.recall,
                  r.validation.f1, r.seconds);
    log_lines.emplace_back(buf);
  };
  TrainResult result =
      train(make_classifier(embedding.dim(), o.cfg), train_set, val_set, o.cfg, on_epoch);
  save_checkpoint(o.out, {std::move(result.model), o.cfg});
  if (!o.log.empty()) write_lines(o.log, log_lines);
  std::cout << "trained " << result.epochs.size() << " epochs, wrote " << o.out << "\n";
  return kExitOk;
}

int cmd_sweep(const SweepOptions& o, const Global& g) {
  require_file(o.commits, "--commits");
  SweepSpec spec;
  spec.parameter = o.parameter;
  spec.values = o.values;
  spec.workers = o.workers;
  spec.base.split.seed = g.seed;
  spec.base.embedding.seed = g.seed;
  spec.base.training.seed = g.seed;
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects name=value: " + kv);
    apply_parameter(spec.base, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.split == "validation") {
    spec.split = EvalSplit::validation;
  } else if (o.split == "test") {
    spec.split = EvalSplit::test;
  } else {
    throw ConfigError("--split must be validation or test");
  }
  const auto rows = run_sweep(spec, load_commits(o.commits));
  const std::string csv = sweep_table_csv(rows);
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(o.out, csv);
    std::cout << "wrote " << rows.size() << " rows to " << o.out << "\n";
  }
  return kExitOk;
}

int cmd_eval(const EvalOptions& o) {
  require_file(o.model, "--model");
  require_file(o.embedding, "--embedding");
  const Checkpoint ck = load_checkpoint(o.model);
  const EmbeddingModel embedding = load_embedding(o.embedding);
  if (embedding.dim() != ck.model.input_dim()) {
    throw ShapeMismatch("embedding dim does not match the model");
  }
  const auto test = load_split(o.dataset);
  std::set<std::string> training_files;
  if (!o.train_dataset.empty()) training_files = file_keys(load_split(o.train_dataset));
  const EncodedSet set = encode_snippets(embedding, test, ck.config.max_seq_len);
  const auto probs = predict_probabilities(ck.model, set);
  const double threshold = o.threshold >= 0.0 ? o.threshold : ck.config.threshold;
  const Metrics m = evaluate(
      [&](const LabeledSnippet& s) { return probs[static_cast<std::size_t>(&s - test.data())]; },
      test, threshold, training_files);
  std::printf("accuracy  %.4f\nprecision %.4f\nrecall    %.4f\nf1        %.4f\n", m.accuracy,
              m.precision, m.recall, m.f1);
  std::printf("tp=%llu fp=%llu tn=%llu fn=%llu%s\n",
              static_cast<unsigned long long>(m.counts.tp),
              static_cast<unsigned long long>(m.counts.fp),
              static_cast<unsigned long long>(m.counts.tn),
              static_cast<unsigned long long>(m.counts.fn), m.degenerate ? " (degenerate)" : "");
  return kExitOk;
}

std::string report_name(const std::string& path, ReportFormat format) {
  std::string name = fs::path(path).relative_path().string();
  for (auto& c : name) {
    if (c == '/' || c == '\\') c = '_';
  }
  return name + std::string(file_extension(format));
}

int cmd_scan(const ScanOptionsCli& o) {
  require_file(o.model, "--model");
  require_file(o.embedding, "--embedding");
  const ReportFormat format = parse_report_format(o.format);
  ScanOptions options;
  options.snippet = o.snippet;
  options.snippet.validate();
  options.threshold = o.threshold;
  if (!o.vuln_type.empty()) options.vuln_type = parse_vulnerability_type(o.vuln_type);
  const ModelScorer scorer(load_checkpoint(o.model), load_embedding(o.embedding));
  if (!o.out.empty()) fs::create_directories(o.out);

  bool failed = false;
  bool findings = false;
  for (const auto& path : o.paths) {
    try {
      const ScanReport report = scan_file(read_text_file(path), scorer, options, path);
      findings = findings || !report.findings.empty();
      const std::string text = render_report(report, format);
      if (o.out.empty()) {
        std::cout << text;
        if (format == ReportFormat::ansi && !text.empty() && text.back() != '\n') std::cout << '\n';
      } else {
        write_text_file((fs::path(o.out) / report_name(path, format)).string(), text);
      }
      spdlog::info("{}: {} findings", path, report.findings.size());
    } catch (const std::exception& e) {
      spdlog::error("{}: {}", path, e.what());
      failed = true;
    }
  }
  if (failed) return kExitRuntime;
  return findings ? kExitFindings : kExitOk;
}

int cmd_neighbors(const NeighborOptions& o) {
  require_file(o.embedding, "--embedding");
  const EmbeddingModel model = load_embedding(o.embedding);
  for (const auto& [token, cos] : nearest_neighbors(model, o.token, o.k)) {
    std::printf("%.4f  %s\n", cos, token.c_str());
  }
  return kExitOk;
}

void add_snippet_options(CLI::App* cmd, SnippetConfig& s) {
  cmd->add_option("-n,--step", s.n, "Focus step size in characters")->capture_default_str();
  cmd->add_option("-m,--context", s.m, "Context window length in characters")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"vudetect: mine security fixes, train a token LSTM, scan Python code"};
  app.set_config("--config", "", "INI/TOML configuration file (flags take precedence)");
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Seed for every stochastic stage")->capture_default_str();
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str();

  MineOptions mine;
  auto* c_mine = app.add_subcommand("mine", "Collect vulnerability-fixing commits");
  c_mine->add_option("--source", mine.source, "dump or live")->capture_default_str();
  c_mine->add_option("--dump", mine.dump, "Offline commits.jsonl dump");
  c_mine->add_option("--cassette", mine.cassette, "Replay recorded API responses (live mode)");
  c_mine->add_option("--record", mine.record, "Record API responses to a cassette");
  c_mine->add_option("--api-base", mine.api_base, "REST API base URL")->capture_default_str();
  c_mine->add_option("--vuln-type,-t", mine.vuln_type, "Vulnerability type")->required();
  c_mine->add_option("--keywords", mine.keywords, "Keyword table (JSON)");
  c_mine->add_option("--limit", mine.limit, "Maximum number of commits")->capture_default_str();
  c_mine->add_option("--workers", mine.workers, "Parallel requests")->capture_default_str();
  c_mine->add_option("--rps", mine.requests_per_second, "Request rate limit")
      ->capture_default_str();
  c_mine->add_option("--out,-o", mine.out, "Output commits.jsonl")->capture_default_str();
  c_mine->add_option("--max-file-chars", mine.filters.max_file_chars)->capture_default_str();
  c_mine->add_option("--max-changed-files", mine.filters.max_changed_files_per_commit)
      ->capture_default_str();
  c_mine->add_option("--html-fraction", mine.filters.html_line_fraction_max)
      ->capture_default_str();
  c_mine->add_option("--denylist", mine.filters.denylist_keywords)->capture_default_str();
  c_mine->add_flag("--no-filters", mine.no_filters, "Skip quality filters and dedup");

  LabelOptions label;
  auto* c_label = app.add_subcommand("label", "Build labeled snippet datasets");
  c_label->add_option("--commits,-c", label.commits, "commits.jsonl")->required();
  c_label->add_option("--out-dir,-o", label.out_dir)->capture_default_str();
  add_snippet_options(c_label, label.snippet);
  c_label->add_option("--train-ratio", label.train_ratio)->capture_default_str();
  c_label->add_option("--validation-ratio", label.validation_ratio)->capture_default_str();
  c_label->add_flag("--include-new", label.include_new, "Add clean snippets of fixed sources");
  c_label->add_flag("--gzip", label.gzip, "Write .jsonl.gz files");

  EmbedOptions embed;
  auto* c_embed = app.add_subcommand("embed-train", "Train token embeddings");
  c_embed->add_option("--commits,-c", embed.commits, "commits.jsonl files used as corpus");
  c_embed->add_option("--source-file", embed.sources, "Python files added to the corpus");
  c_embed->add_option("--out,-o", embed.out)->capture_default_str();
  c_embed->add_option("--dim", embed.cfg.dim)->capture_default_str();
  c_embed->add_option("--min-count", embed.cfg.min_count)->capture_default_str();
  c_embed->add_option("--iterations", embed.cfg.iterations)->capture_default_str();
  c_embed->add_option("--window", embed.cfg.window)->capture_default_str();
  c_embed->add_option("--negatives", embed.cfg.negatives)->capture_default_str();
  c_embed->add_flag("--replace-strings", embed.cfg.replace_strings);
  c_embed->add_option("--workers", embed.cfg.workers, "More than 1 is not reproducible")
      ->capture_default_str();

  TrainOptions tr;
  auto* c_train = app.add_subcommand("train", "Train the LSTM classifier");
  c_train->add_option("--train", tr.train, "Training dataset")->required();
  c_train->add_option("--validation", tr.validation, "Validation dataset")->required();
  c_train->add_option("--embedding,-e", tr.embedding, "Embedding model")->required();
  c_train->add_option("--out,-o", tr.out)->capture_default_str();
  c_train->add_option("--log", tr.log, "Per-epoch validation metrics CSV");
  c_train->add_option("--neurons", tr.cfg.neurons)->capture_default_str();
  c_train->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  c_train->add_option("--dropout", tr.cfg.dropout)->capture_default_str();
  c_train->add_option("--recurrent-dropout", tr.cfg.recurrent_dropout)->capture_default_str();
  c_train->add_option("--batch-size", tr.cfg.batch_size)->capture_default_str();
  c_train->add_option("--optimizer", tr.optimizer)->capture_default_str();
  c_train->add_option("--learning-rate", tr.cfg.learning_rate, "0 = optimizer default")
      ->capture_default_str();
  c_train->add_option("--max-seq-len", tr.cfg.max_seq_len)->capture_default_str();
  c_train->add_option("--threshold", tr.cfg.threshold)->capture_default_str();
  c_train->add_option("--loss", tr.loss, "soft_f1 or weighted_bce")->capture_default_str();
  c_train->add_option("--positive-weight", tr.cfg.positive_weight)->capture_default_str();
  c_train->add_option("--target-f1", tr.target_f1, "Stop early at this validation F1");

  SweepOptions sw;
  auto* c_sweep = app.add_subcommand("sweep", "One-parameter hyperparameter sweep");
  c_sweep->add_option("--commits,-c", sw.commits)->required();
  c_sweep->add_option("--parameter,-p", sw.parameter)->required();
  c_sweep->add_option("--values", sw.values, "Comma-separated grid")->required()->delimiter(',');
  c_sweep->add_option("--set", sw.overrides, "Baseline override name=value");
  c_sweep->add_option("--split", sw.split, "validation or test")->capture_default_str();
  c_sweep->add_option("--workers", sw.workers)->capture_default_str();
  c_sweep->add_option("--out,-o", sw.out, "Results CSV (stdout if omitted)");

  EvalOptions ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
  c_eval->add_option("--dataset,-d", ev.dataset)->required();
  c_eval->add_option("--model", ev.model)->required();
  c_eval->add_option("--embedding,-e", ev.embedding)->required();
  c_eval->add_option("--train-dataset", ev.train_dataset, "Checked for file leakage");
  c_eval->add_option("--threshold", ev.threshold, "Defaults to the checkpoint's threshold");

  ScanOptionsCli sc;
  auto* c_scan = app.add_subcommand("scan", "Scan Python files for vulnerable code");
  c_scan->add_option("paths", sc.paths)->required();
  c_scan->add_option("--model", sc.model)->required();
  c_scan->add_option("--embedding,-e", sc.embedding)->required();
  c_scan->add_option("--vuln-type,-t", sc.vuln_type);
  c_scan->add_option("--format,-f", sc.format, "ansi, html or structured")->capture_default_str();
  c_scan->add_option("--threshold", sc.threshold)->capture_default_str();
  c_scan->add_option("--out,-o", sc.out, "Output directory (stdout if omitted)");
  add_snippet_options(c_scan, sc.snippet);

  NeighborOptions nb;
  auto* c_nb = app.add_subcommand("inspect-neighbors", "Nearest tokens by cosine similarity");
  c_nb->add_option("--embedding,-e", nb.embedding)->required();
  c_nb->add_option("--token", nb.token)->required();
  c_nb->add_option("-k", nb.k)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const CLI::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  auto logger = spdlog::get("vudetect");
  if (!logger) logger = spdlog::stderr_color_mt("vudetect");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  spdlog::info("resolved configuration (seed {}):\n{}", g.seed, app.config_to_str(true, false));

  try {
    if (c_mine->parsed()) return cmd_mine(mine);
    if (c_label->parsed()) return cmd_label(label, g);
    if (c_embed->parsed()) return cmd_embed(embed, g);
    if (c_train->parsed()) return cmd_train(tr, g);
    if (c_sweep->parsed()) return cmd_sweep(sw, g);
    if (c_eval->parsed()) return cmd_eval(ev);
    if (c_scan->parsed()) return cmd_scan(sc);
    if (c_nb->parsed()) return cmd_neighbors(nb);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace vudetect::cli
