// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// pbesynth: generate data, train the attribute model, solve tasks and run
// benchmarks. Exit status: 0 success, 2 no solution within budget,
// 1 usage or configuration error.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pbesynth/bench.hpp"
#include "pbesynth/dataset_io.hpp"
#include "pbesynth/interpreter.hpp"
#include "pbesynth/model.hpp"
#include "pbesynth/random.hpp"
#include "pbesynth/search.hpp"

namespace fs = std::filesystem;
using namespace pbe;

namespace {

constexpr int kExitNoSolution = 2;
constexpr int kExitUsage = 1;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<DatasetRecord> load_records(const std::vector<std::string>& paths) {
  std::vector<DatasetRecord> out;
  for (const auto& p : paths) {
    Dataset d = read_dataset(p);
    std::move(d.records.begin(), d.records.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<std::string> training_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("train", 0) == 0 && e.path().extension() == ".jsonl") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no train*.jsonl in " + dir.string());
  return out;
}

struct GenOptions {
  int length = 3;
  int count = 1000;
  bool all = false;
  int test_count = 100;
  int examples = kDefaultExampleCount;
  int shards = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenOptions& o) {
  DatasetParams p;
  p.length = o.length;
  p.count = o.all ? kAllPrograms : o.count;
  p.test_count = o.test_count;
  p.examples = o.examples;
  p.seed = o.seed;
  const BuiltDataset b = build_dataset(p);
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  write_dataset(dir / "train.jsonl", b.train);
  write_dataset(dir / "test.jsonl", b.test);
  write_prior(dir / "prior.csv", b.train.header, b.prior);
  std::size_t total = b.train.records.size();
  for (int s = 1; s < o.shards; ++s) {
    const Dataset shard = resample_dataset(b.train, derive_seed(o.seed, 1000 + s));
    write_dataset(dir / ("train-" + std::to_string(s) + ".jsonl"), shard);
    total += shard.records.size();
  }
  std::cout << "wrote " << total << " training records in " << o.shards << " file(s), "
            << b.test.records.size() << " test records, prior to " << dir.string() << "\n";
  return 0;
}

struct TrainOptions {
  std::vector<std::string> datasets;
  std::string validation;
  std::string out;
  std::string log;
  ModelConfig model;
  TrainConfig train;
};

int run_train(const TrainOptions& o) {
  const auto records = load_records(o.datasets);
  std::vector<EncodedSet> validation;
  if (!o.validation.empty()) validation = encode_records(read_dataset(o.validation).records);
  std::cerr << "training on " << records.size() << " records\n";
  const TrainResult r = train(o.model, o.train, encode_records(records), std::move(validation), [](const EpochLog& e) {
    std::cerr << "epoch " << e.epoch << " train " << e.train_loss << " validation " << e.validation_loss << " ("
              << e.seconds << "s)\n";
  });
  save_params(o.out, r.params);
  const std::string log = o.log.empty() ? o.out + ".log.csv" : o.log;
  write_training_log(log, r.log, o.model, o.train);
  std::cout << "best validation loss " << r.best_validation_loss << " at epoch " << r.best_epoch << "; model "
            << o.out << ", log " << log << "\n";
  return 0;
}

struct SolveOptions {
  std::string examples_file;
  std::vector<std::string> inline_examples;
  std::string model;
  std::string prior;
  std::string strategy = "saa";
  int length = 3;
  std::uint64_t budget_candidates = 0;
  double budget_seconds = 0;
};

int run_solve(const SolveOptions& o) {
  ExampleSet examples;
  if (!o.examples_file.empty()) examples = parse_examples_json(read_file(o.examples_file));
  for (const auto& e : o.inline_examples) examples.examples.push_back(parse_inline_example(e));
  validate_examples(examples);

  const bool prior_based = o.strategy.rfind("prior-", 0) == 0;
  const bool saa = o.strategy == "saa" || o.strategy == "prior-saa";
  Guidance guidance;
  if (prior_based) {
    if (o.prior.empty()) throw CLI::ValidationError("--prior", "required by strategy " + o.strategy);
    guidance = read_prior(o.prior).prior;
  } else {
    if (o.model.empty()) throw CLI::ValidationError("--model", "required by strategy " + o.strategy);
    guidance = predict(load_params(o.model), examples);
  }
  const SearchBudget budget{o.budget_candidates, o.budget_seconds};
  const SearchResult r = saa ? sort_and_add(examples, o.length, guidance, {}, budget)
                             : dfs(examples, o.length, guidance, budget);
  if (r.program && !consistent(*r.program, examples)) throw std::logic_error("search returned an inconsistent program");
  if (r.program) std::cout << format_program(*r.program) << "\n";
  else std::cout << "no solution within budget\n";
  std::cout << "# status=" << status_name(r.status) << " candidates=" << r.stats.candidates
            << " seconds=" << r.stats.seconds << " restarts=" << r.stats.restarts;
  if (saa) std::cout << " active_size=" << r.stats.active_size;
  std::cout << "\n";
  return r.program ? 0 : kExitNoSolution;
}

struct BenchOptions {
  std::string model;
  std::string prior;
  std::vector<std::string> datasets;
  int tasks = 100;
  int length = 3;
  int examples = kDefaultExampleCount;
  std::vector<std::string> strategies;
  std::uint64_t budget_candidates = 0;
  double budget_seconds = 0;
  std::uint64_t seed = 7;
  int workers = 0;
  double throughput_seconds = 0;
  std::vector<std::string> grid;
  std::vector<int> test_lengths{1, 2, 3, 4};
  double grid_q = 20;
  std::string out;
};

std::unordered_set<Fingerprint> corpus_fingerprints(const std::vector<std::string>& files) {
  ProbeBattery probes;
  std::unordered_set<Fingerprint> fps;
  for (const auto& f : files) {
    const Dataset d = read_dataset(f);
    const auto part = fingerprints_of(d.records, probes);
    fps.insert(part.begin(), part.end());
  }
  return fps;
}

int run_grid(const BenchOptions& o) {
  std::vector<GridCell> cells;
  BenchConfig config;
  config.budget = {o.budget_candidates, o.budget_seconds};
  config.strategies = {Strategy::SaaPrior, Strategy::SaaModel};
  config.workers = o.workers;
  config.quantiles = {o.grid_q};
  for (const std::string& entry : o.grid) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--grid", "expected TRAIN_LENGTH=DIR, got " + entry);
    const int train_length = std::stoi(entry.substr(0, eq));
    const fs::path dir = entry.substr(eq + 1);
    const ModelParams model = load_params(dir / "model.bin");
    const Guidance prior = read_prior(dir / "prior.csv").prior;
    const auto files = training_files(dir);
    const auto fps = corpus_fingerprints(files);
    for (int test_length : o.test_lengths) {
      auto tasks = make_tasks(test_length, o.tasks, o.examples, derive_seed(o.seed, test_length), fps);
      check_disjoint(tasks, fps);
      config.test_length = test_length;
      const BenchReport r = run_benchmark(config, std::move(tasks), prior, &model);
      cells.push_back({train_length, test_length, r.speedup(Strategy::SaaPrior, Strategy::SaaModel, o.grid_q)});
      std::cerr << "train " << train_length << " test " << test_length << ": speedup "
                << cells.back().speedup.value << (cells.back().speedup.lower_bound ? " (lower bound)" : "") << "\n";
    }
  }
  fs::create_directories(o.out);
  write_grid_csv(fs::path(o.out) / "grid.csv", cells, o.grid_q);
  std::cout << "wrote " << (fs::path(o.out) / "grid.csv").string() << "\n";
  return 0;
}

int run_bench(const BenchOptions& o) {
  if (!o.grid.empty()) return run_grid(o);
  if (o.prior.empty()) throw CLI::ValidationError("--prior", "required");
  if (o.datasets.empty()) throw CLI::ValidationError("--dataset", "training corpus needed for disjointness");
  BenchConfig config;
  config.test_length = o.length;
  config.budget = {o.budget_candidates, o.budget_seconds};
  config.workers = o.workers;
  if (!o.strategies.empty()) {
    config.strategies.clear();
    for (const auto& s : o.strategies) {
      const auto parsed = parse_strategy(s);
      if (!parsed) throw CLI::ValidationError("--strategies", "unknown strategy " + s);
      config.strategies.push_back(*parsed);
    }
  }
  bool need_model = false;
  for (Strategy s : config.strategies) need_model = need_model || uses_model(s);
  std::optional<ModelParams> model;
  if (need_model) {
    if (o.model.empty()) throw CLI::ValidationError("--model", "required by the selected strategies");
    model = load_params(o.model);
  }
  const Guidance prior = read_prior(o.prior).prior;
  const auto fps = corpus_fingerprints(o.datasets);
  auto tasks = make_tasks(o.length, o.tasks, o.examples, o.seed, fps);
  check_disjoint(tasks, fps);
  const BenchReport report = run_benchmark(config, std::move(tasks), prior, model ? &*model : nullptr);

  std::ostringstream table;
  print_report_table(table, report);
  if (o.throughput_seconds > 0) {
    const ThroughputReport t = throughput_probe(o.length, o.throughput_seconds);
    table << "Throughput (length " << o.length << "): cached " << static_cast<std::uint64_t>(t.cached_per_second)
          << " candidates/s, naive " << static_cast<std::uint64_t>(t.naive_per_second) << " candidates/s ("
          << hardware_note() << ")\n";
  }
  std::cout << table.str();
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_report_csv(fs::path(o.out) / "report.csv", report);
    write_tasks_csv(fs::path(o.out) / "tasks.csv", report);
    std::ofstream(fs::path(o.out) / "table.txt") << table.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Program synthesis from input-output examples with learned search guidance"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate training/test datasets and the attribute prior");
  g->add_option("-T,--length", gen.length, "Program length")->check(CLI::Range(1, 10));
  g->add_option("-N,--count", gen.count, "Training records")->check(CLI::NonNegativeNumber);
  g->add_flag("--all", gen.all, "Use every usable program for training");
  g->add_option("--test-count", gen.test_count, "Held-out records")->check(CLI::NonNegativeNumber);
  g->add_option("-M,--examples", gen.examples, "Examples per record")->check(CLI::Range(1, 100));
  g->add_option("--shards", gen.shards, "Training files with freshly sampled examples")->check(CLI::Range(1, 100));
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output directory")->required();

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train the attribute model");
  t->add_option("--dataset", tr.datasets, "Training dataset file(s)")->required()->check(CLI::ExistingFile);
  t->add_option("--validation", tr.validation, "Validation dataset (default: held out from training)")
      ->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "Weights file")->required();
  t->add_option("--log", tr.log, "Training log CSV (default: <out>.log.csv)");
  t->add_option("--embedding", tr.model.embedding, "Embedding size E")->check(CLI::PositiveNumber);
  t->add_option("--hidden", tr.model.hidden, "Hidden units K")->check(CLI::PositiveNumber);
  t->add_option("--layers", tr.model.layers, "Hidden layers H")->check(CLI::PositiveNumber);
  t->add_option("--epochs", tr.train.max_epochs, "Maximum epochs")->check(CLI::PositiveNumber);
  t->add_option("--batch", tr.train.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
  t->add_option("--lr", tr.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  t->add_option("--patience", tr.train.patience, "Early-stopping patience")->check(CLI::PositiveNumber);
  t->add_option("--validation-fraction", tr.train.validation_fraction)->check(CLI::Range(0.0, 0.9));
  t->add_option("--seed", tr.train.seed, "Random seed");

  SolveOptions so;
  auto* s = app.add_subcommand("solve", "Find a program consistent with examples");
  s->add_option("--examples-file", so.examples_file, "JSON examples file")->check(CLI::ExistingFile);
  s->add_option("-e,--example", so.inline_examples, "Inline example, e.g. \"2, [3,5,4] -> 7\"")
      ->allow_extra_args(false);
  s->add_option("--model", so.model, "Weights file")->check(CLI::ExistingFile);
  s->add_option("--prior", so.prior, "Prior CSV")->check(CLI::ExistingFile);
  s->add_option("--strategy", so.strategy, "Search strategy")
      ->check(CLI::IsMember({"dfs", "saa", "prior-dfs", "prior-saa"}));
  s->add_option("-T,--length", so.length, "Maximum program length")->check(CLI::Range(1, 10));
  s->add_option("--budget-candidates", so.budget_candidates, "Candidate budget (0: unlimited)");
  s->add_option("--budget-seconds", so.budget_seconds, "Time budget (0: unlimited)");

  BenchOptions bo;
  auto* b = app.add_subcommand("bench", "Speedup benchmark on held-out tasks");
  b->add_option("--model", bo.model, "Weights file")->check(CLI::ExistingFile);
  b->add_option("--prior", bo.prior, "Prior CSV")->check(CLI::ExistingFile);
  b->add_option("--dataset", bo.datasets, "Training dataset file(s), excluded from tasks")->check(CLI::ExistingFile);
  b->add_option("-P,--tasks", bo.tasks, "Number of tasks")->check(CLI::PositiveNumber);
  b->add_option("-T,--length", bo.length, "Task program length")->check(CLI::Range(1, 10));
  b->add_option("-M,--examples", bo.examples, "Examples per task")->check(CLI::Range(1, 100));
  b->add_option("--strategies", bo.strategies, "Subset of dfs/prior dfs/model saa/prior saa/model")->delimiter(',');
  b->add_option("--budget-candidates", bo.budget_candidates, "Per-task candidate budget (0: unlimited)");
  b->add_option("--budget-seconds", bo.budget_seconds, "Per-task time budget (0: unlimited)");
  b->add_option("--seed", bo.seed, "Task seed");
  b->add_option("--workers", bo.workers, "Worker threads (0: hardware concurrency)");
  b->add_option("--throughput", bo.throughput_seconds, "Also measure cached/naive candidate rate for N seconds");
  b->add_option("--grid", bo.grid, "TRAIN_LENGTH=DIR with model.bin, prior.csv, train*.jsonl (repeatable)");
  b->add_option("--test-lengths", bo.test_lengths, "Grid test lengths")->delimiter(',');
  b->add_option("--grid-q", bo.grid_q, "Grid quantile")->check(CLI::Range(1.0, 100.0));
  b->add_option("--out", bo.out, "Output directory");

  std::string cm_model, cm_dataset, cm_out;
  auto* c = app.add_subcommand("confusion", "Conditional confusion matrix on a test set");
  c->add_option("--model", cm_model)->required()->check(CLI::ExistingFile);
  c->add_option("--dataset", cm_dataset)->required()->check(CLI::ExistingFile);
  c->add_option("--out", cm_out)->required();

  std::string em_model, em_out;
  auto* d = app.add_subcommand("dump-embeddings", "Write the integer embedding table as CSV");
  d->add_option("--model", em_model)->required()->check(CLI::ExistingFile);
  d->add_option("--out", em_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen);
    if (t->parsed()) return run_train(tr);
    if (s->parsed()) return run_solve(so);
    if (b->parsed()) return run_bench(bo);
    if (c->parsed()) {
      const ConfusionMatrix m = confusion_matrix(load_params(cm_model), read_dataset(cm_dataset).records);
      write_confusion_csv(cm_out, m);
      std::cout << "wrote " << cm_out << "\n";
      return 0;
    }
    if (d->parsed()) {
      write_embeddings_csv(em_out, load_params(em_model));
      std::cout << "wrote " << em_out << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
