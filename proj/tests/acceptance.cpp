// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Generated corpora and trained
// weights are kept in --work-dir and reused when their parameters match.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbesynth/bench.hpp"
#include "pbesynth/dataset_io.hpp"
#include "pbesynth/interpreter.hpp"
#include "pbesynth/model.hpp"
#include "pbesynth/random.hpp"
#include "pbesynth/search.hpp"

namespace fs = std::filesystem;
using namespace pbe;

namespace {

// Pinned thresholds.
constexpr double kGoldenSeconds = 1.0;
constexpr int kRankCases = 1000;
constexpr int kBoundMaxLength = 5;
constexpr double kBoundSeconds = 1.0;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientStep = 1e-4;
constexpr double kGradientSeconds = 30.0;
constexpr int kOracleTasks = 100;
constexpr std::size_t kMinCorpusRecords = 100000;
constexpr int kBenchTasks = 100;
constexpr double kSaaSpeedup = 5.0;
constexpr double kDfsSpeedup = 2.0;
constexpr double kSpeedupQuantile = 40;
constexpr double kCrossLengthSpeedup = 1.0;
constexpr double kCrossLengthQuantile = 20;
constexpr double kThroughputRatio = 2.0;
constexpr double kThroughputSeconds = 3.0;
constexpr int kPermutationSets = 10;
constexpr double kPriorTolerance = 1e-12;

// Corpus and training settings.
constexpr std::uint64_t kCorpusSeed = 1;
constexpr int kMainShards = 3;
constexpr std::size_t kShortCorpusTarget = 40000;
constexpr int kMaxEpochs = 20;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

void log(const std::string& msg) { std::cerr << "  " << msg << std::endl; }

// ---------------------------------------------------------------------------
// Shared artifacts.

struct Corpus {
  fs::path dir;
  std::vector<fs::path> train_files;
  Dataset test;
  AttributeScores prior{};
  std::vector<DatasetRecord> train_records;  // every shard
};

std::string stamp_of(int length, int shards, int test_count) {
  std::ostringstream s;
  s << "length=" << length << " shards=" << shards << " test_count=" << test_count << " seed=" << kCorpusSeed
    << " format=" << kDatasetVersion;
  return s.str();
}

bool stamp_matches(const fs::path& file, const std::string& stamp) {
  std::ifstream in(file);
  std::string line;
  return in && std::getline(in, line) && line == stamp;
}

void write_stamp(const fs::path& file, const std::string& stamp) { std::ofstream(file) << stamp << "\n"; }

// Same layout as `pbesynth gen --all --shards N`: train.jsonl, train-<s>.jsonl,
// test.jsonl and prior.csv.
Corpus load_or_build_corpus(const fs::path& dir, int length, int shards, int test_count) {
  const std::string stamp = stamp_of(length, shards, test_count);
  Corpus c;
  c.dir = dir;
  c.train_files.push_back(dir / "train.jsonl");
  for (int s = 1; s < shards; ++s) c.train_files.push_back(dir / ("train-" + std::to_string(s) + ".jsonl"));
  if (!stamp_matches(dir / "corpus.stamp", stamp)) {
    const auto t0 = Clock::now();
    fs::create_directories(dir);
    DatasetParams p;
    p.length = length;
    p.count = kAllPrograms;
    p.test_count = test_count;
    p.seed = kCorpusSeed;
    const BuiltDataset b = build_dataset(p);
    write_dataset(dir / "train.jsonl", b.train);
    write_dataset(dir / "test.jsonl", b.test);
    write_prior(dir / "prior.csv", b.train.header, b.prior);
    for (int s = 1; s < shards; ++s) {
      write_dataset(c.train_files[s], resample_dataset(b.train, derive_seed(kCorpusSeed, 1000 + s)));
    }
    write_stamp(dir / "corpus.stamp", stamp);
    fs::remove(dir / "model.stamp");
    log("generated T=" + std::to_string(length) + " corpus in " + fmt(since(t0), 1) + "s");
  }
  for (const auto& f : c.train_files) {
    Dataset d = read_dataset(f);
    std::move(d.records.begin(), d.records.end(), std::back_inserter(c.train_records));
  }
  c.test = read_dataset(dir / "test.jsonl");
  c.prior = read_prior(dir / "prior.csv").prior;
  return c;
}

int shards_for(int length, std::size_t target) {
  DatasetParams p;
  p.length = length;
  p.count = kAllPrograms;
  p.test_count = 0;
  p.seed = kCorpusSeed;
  const std::size_t pool = build_dataset(p).train.records.size();
  return static_cast<int>(std::max<std::size_t>(1, (target + pool - 1) / pool));
}

ModelParams load_or_train(const Corpus& c) {
  const ModelConfig mc;
  TrainConfig tc;
  tc.max_epochs = kMaxEpochs;
  std::ostringstream s;
  s << "E=" << mc.embedding << " K=" << mc.hidden << " H=" << mc.layers << " epochs=" << tc.max_epochs
    << " batch=" << tc.batch_size << " lr=" << tc.learning_rate << " patience=" << tc.patience
    << " seed=" << tc.seed << " records=" << c.train_records.size();
  const fs::path weights = c.dir / "model.bin";
  if (stamp_matches(c.dir / "model.stamp", s.str()) && fs::exists(weights)) return load_params(weights, &mc);
  log("training on " + std::to_string(c.train_records.size()) + " records");
  const TrainResult r = train(mc, tc, encode_records(c.train_records), {}, [](const EpochLog& e) {
    log("epoch " + std::to_string(e.epoch) + " train " + fmt(e.train_loss, 4) + " validation " +
        fmt(e.validation_loss, 4) + " (" + fmt(e.seconds, 1) + "s)");
  });
  save_params(weights, r.params);
  write_training_log(c.dir / "train.log.csv", r.log, mc, tc);
  write_stamp(c.dir / "model.stamp", s.str());
  return r.params;
}

std::vector<BenchTask> tasks_of(const Dataset& test) {
  std::vector<BenchTask> tasks;
  for (const auto& r : test.records) tasks.push_back({static_cast<int>(tasks.size()), r.program, r.examples});
  return tasks;
}

// ---------------------------------------------------------------------------
// 1. Golden semantics.

struct Golden {
  const char* name;
  const char* program;
  std::vector<Value> inputs;
  Value expected;
};

Verdict golden_semantics() {
  using V = Value;
  const std::vector<Golden> cases{
      {"listing example",
       "a <- [int]\nb <- FILTER (<0) a\nc <- MAP (*4) b\nd <- SORT c\ne <- REVERSE d",
       {V::array({-17, -3, 4, 11, 0, -5, -9, 13, 6, 6, -8, 11})},
       V::array({-12, -20, -32, -36, -68})},
      {"program 0", "k <- int\nb <- [int]\nc <- SORT b\nd <- TAKE k c\ne <- SUM d",
       {V::scalar(2), V::array({3, 5, 4, 7, 5})}, V::scalar(7)},
      {"program 1", "w <- [int]\nt <- [int]\nc <- MAP (*3) w\nd <- ZIPWITH (+) c t\ne <- MAXIMUM d",
       {V::array({6, 2, 4, 7, 9}), V::array({5, 3, 6, 1, 0})}, V::scalar(27)},
      {"program 2", "a <- [int]\nb <- [int]\nc <- ZIPWITH (-) b a\nd <- COUNT (>0) c",
       {V::array({6, 2, 4, 7, 9}), V::array({5, 3, 2, 1, 0})}, V::scalar(4)},
      {"program 3", "h <- [int]\nb <- SCANL1 MIN h\nc <- ZIPWITH (-) h b\nd <- FILTER (>0) c\ne <- SUM d",
       {V::array({8, 5, 7, 2, 5})}, V::scalar(5)},
      {"program 5", "a <- [int]\nb <- REVERSE a\nc <- ZIPWITH MIN a b", {V::array({3, 7, 5, 2, 8})},
       V::array({3, 2, 5, 2, 3})},
      {"program 6",
       "t <- [int]\np <- [int]\nc <- MAP (-1) t\nd <- MAP (-1) p\ne <- ZIPWITH (+) c d\nf <- MINIMUM e",
       {V::array({4, 8, 11, 2}), V::array({2, 3, 4, 1})}, V::scalar(1)},
      {"program 7", "s <- [int]\np <- [int]\nc <- SCANL1 (+) p\nd <- ZIPWITH (*) s c\ne <- SUM d",
       {V::array({4, 7, 2, 3}), V::array({2, 1, 3, 1})}, V::scalar(62)},
      {"program 8", "s <- [int]\nb <- REVERSE s\nc <- ZIPWITH (-) b s\nd <- FILTER (>0) c\ne <- SUM d",
       {V::array({1, 2, 4, 5, 7})}, V::scalar(9)},
  };
  const auto t0 = Clock::now();
  std::vector<std::string> failures;
  for (const auto& g : cases) {
    const Value got = run_program(parse_program(g.program), g.inputs);
    if (!(got == g.expected)) failures.push_back(std::string(g.name) + " gave " + to_string(got) + ", listed " + to_string(g.expected));
  }
  const double secs = since(t0);
  Verdict v;
  v.pass = failures.empty() && secs < kGoldenSeconds;
  v.detail = std::to_string(cases.size() - failures.size()) + "/" + std::to_string(cases.size()) + " match in " +
             fmt(secs, 4) + "s";
  for (const auto& f : failures) v.detail += "; " + f;
  return v;
}

// ---------------------------------------------------------------------------
// 2. Catalog integrity.

Verdict catalog_integrity() {
  const char* expected[] = {"Head",  "Last",  "Take",    "Drop",    "Access", "Minimum", "Maximum",
                            "Reverse", "Sort", "Sum",   "Map",     "Filter",  "Count",  "ZipWith",
                            "Scanl1", "(+1)", "(-1)",  "(*2)",    "(/2)",    "(*(-1))", "(**2)",   "(*3)",
                            "(/3)",   "(*4)", "(/4)",  "(>0)",    "(<0)",    "(%2==0)", "(%2==1)", "(+)",
                            "(-)",    "(*)",  "Min",   "Max"};
  const auto cat = catalog();
  int first = 0, higher = 0, lambdas = 0;
  bool names = cat.size() == 34;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    first += cat[i].kind == AttributeKind::FirstOrder;
    higher += cat[i].kind == AttributeKind::HigherOrder;
    lambdas += cat[i].kind == AttributeKind::Lambda;
    if (i < 34 && cat[i].name != expected[i]) names = false;
  }
  const Program listing =
      parse_program("a <- [int]\nb <- FILTER (<0) a\nc <- MAP (*4) b\nd <- SORT c\ne <- REVERSE d");
  const auto bits = attribute_vector(listing).count();
  Verdict v;
  v.pass = names && first == 10 && higher == 5 && lambdas == 19 && bits == 6;
  v.detail = std::to_string(cat.size()) + " attributes (" + std::to_string(first) + " first-order, " +
             std::to_string(higher) + " higher-order, " + std::to_string(lambdas) + " lambdas), names " +
             (names ? "match" : "differ") + ", listing program sets " + std::to_string(bits) + " bits";
  return v;
}

// ---------------------------------------------------------------------------
// 3. Rank-loss fidelity.

Verdict rank_loss_fidelity() {
  const int labels[] = {1, 1, 1, 1, 0, 0, 1, 0, 0, 0, 1};
  Guidance g{};
  AttributeVector target;
  for (int i = 0; i < kNumAttributes; ++i) {
    g[i] = 1.0 - 0.01 * i;
    target[i] = i < 11 && labels[i];
  }
  const auto lr = rank_loss(target, g);
  const int ca = required_active_size(target, g);
  const int cp = static_cast<int>(target.count());
  const bool worked = lr == 7 && ca == 11 && cp == 6 && ca - cp == 5;

  Rng rng(20260101);
  int mismatches = 0, bound_violations = 0;
  for (int trial = 0; trial < kRankCases; ++trial) {
    // Distinct scores from a random permutation: no ties.
    std::vector<int> perm(kNumAttributes);
    std::iota(perm.begin(), perm.end(), 0);
    shuffle_in_place(perm, rng);
    Guidance s{};
    AttributeVector t;
    for (int a = 0; a < kNumAttributes; ++a) s[a] = (perm[a] + 0.5) / kNumAttributes;
    const int k = static_cast<int>(uniform_int(rng, 1, 12));
    for (int i = 0; i < k; ++i) t.set(static_cast<std::size_t>(uniform_int(rng, 0, kNumAttributes - 1)));
    std::int64_t pairs = 0;
    for (int p = 0; p < kNumAttributes; ++p) {
      for (int n = 0; n < kNumAttributes; ++n) pairs += t[p] && !t[n] && s[n] > s[p];
    }
    const auto loss = rank_loss(t, s);
    mismatches += loss != pairs;
    const int d = required_active_size(t, s) - static_cast<int>(t.count());
    bound_violations += loss < d;
  }
  Verdict v;
  v.pass = worked && mismatches == 0 && bound_violations == 0;
  v.detail = "worked example L_r=" + std::to_string(lr) + " C_A=" + std::to_string(ca) + " C_P=" +
             std::to_string(cp) + " D=" + std::to_string(ca - cp) + "; " + std::to_string(kRankCases) +
             " random cases: " + std::to_string(mismatches) + " pairwise mismatches, " +
             std::to_string(bound_violations) + " with L_r < D";
  return v;
}

// ---------------------------------------------------------------------------
// 4. Bound verification.

Verdict bound_verification() {
  const auto t0 = Clock::now();
  int checked = 0, failed = 0;
  for (int t = 1; t <= kBoundMaxLength; ++t) {
    for (int c = 1; c <= kNumAttributes; ++c) {
      // Independent evaluation with plain 64-bit integers (34^6 fits easily).
      std::uint64_t lhs = 0, ct = 1;
      for (int i = 0; i < t; ++i) ct *= c;
      for (int x = 1; x <= c; ++x) {
        std::uint64_t p = 1;
        for (int i = 0; i < t; ++i) p *= x;
        lhs += p;
      }
      const std::uint64_t mid = ct * c, rhs = 34 * ct;
      const BoundCheck b = bound_check(t, c, 0);
      const bool agree = b.lhs == lhs && b.mid == mid && b.rhs == rhs;
      failed += !(agree && b.holds() && lhs <= mid && mid <= rhs);
      ++checked;
    }
  }
  const double secs = since(t0);
  Verdict v;
  v.pass = failed == 0 && secs < kBoundSeconds;
  v.detail = std::to_string(checked) + " (T, C_A) pairs, " + std::to_string(failed) + " failures, " + fmt(secs, 4) + "s";
  return v;
}

// ---------------------------------------------------------------------------
// 5. Search completeness.

// Counts well-typed programs of exactly `remaining` more calls by trying every
// (operation, argument tuple) and letting Program construction reject the
// ill-typed ones.
std::uint64_t brute_force_count(std::vector<Statement>& stmts, int remaining) {
  if (remaining == 0) return 1;
  std::uint64_t total = 0;
  const auto n = static_cast<std::uint8_t>(stmts.size());
  for (const Operation& op : operations()) {
    for (std::uint8_t a = 0; a < n; ++a) {
      for (std::uint8_t b = 0; b < n; ++b) {
        Call c{op.fn, op.lambda, {a, b}};
        if (c.arity() == 1 && b != 0) continue;
        if (c.arity() == 1) c.args[1] = 0;
        stmts.push_back(Statement::invoke(c));
        bool ok = true;
        try {
          Program probe(stmts);
        } catch (const ProgramError&) {
          ok = false;
        }
        if (ok) total += brute_force_count(stmts, remaining - 1);
        stmts.pop_back();
      }
    }
  }
  return total;
}

Verdict search_completeness() {
  std::vector<std::string> notes;
  bool counts_ok = true;
  for (int arrays = 1; arrays <= kMaxInputs; ++arrays) {
    ExampleSet set;
    for (int e = 0; e < 3; ++e) {
      Example ex;
      for (int i = 0; i < arrays; ++i) ex.inputs.push_back(Value::array({e + 1, -2 * i, 5}));
      ex.output = Value::array({1000 + e, -999, 7, 7, 7, 7, 7});
      set.examples.push_back(ex);
    }
    for (int t = 1; t <= 2; ++t) {
      std::uint64_t expected = 0;
      for (int len = 1; len <= t; ++len) {
        std::vector<Statement> stmts(arrays, Statement::input(Type::IntArray));
        expected += brute_force_count(stmts, len);
      }
      const auto r = dfs(set, t, uniform_guidance(), {});
      const bool ok = r.status == SearchStatus::Exhausted && r.stats.candidates == expected;
      counts_ok = counts_ok && ok;
      notes.push_back(std::to_string(arrays) + "x[int] T=" + std::to_string(t) + ": " +
                      std::to_string(r.stats.candidates) + (ok ? "=" : "!=") + std::to_string(expected));
    }
  }
  int records = 0, resolved = 0;
  for (int length = 1; length <= 2; ++length) {
    DatasetParams p;
    p.length = length;
    p.count = kAllPrograms;
    p.test_count = 0;
    p.seed = 5;
    for (const auto& rec : build_dataset(p).train.records) {
      ++records;
      const auto r = dfs(rec.examples, 2, uniform_guidance(), {});
      resolved += r.program && consistent(*r.program, rec.examples);
    }
  }
  Verdict v;
  v.pass = counts_ok && resolved == records;
  std::string joined;
  for (const auto& n : notes) joined += (joined.empty() ? "" : ", ") + n;
  v.detail = joined + "; re-solved " + std::to_string(resolved) + "/" + std::to_string(records) + " records";
  return v;
}

// ---------------------------------------------------------------------------
// 6. Gradient check.

Verdict gradient_check() {
  const auto t0 = Clock::now();
  const ModelConfig mc{2, 8, 3};
  const ModelParams params = ModelParams::initialize(mc, 17);
  DatasetParams p;
  p.length = 2;
  p.count = 4;
  p.test_count = 0;
  p.seed = 3;
  const auto sets = encode_records(build_dataset(p).train.records);
  std::vector<const EncodedSet*> batch;
  for (const auto& s : sets) batch.push_back(&s);
  Eigen::VectorXd grad;
  loss_and_gradient(params, batch, grad);

  std::vector<int> used(kEmbeddingRows, 0);
  for (const auto& s : sets) {
    for (const auto& ex : s.examples) {
      for (auto t : ex.tokens) used[t] = 1;
    }
  }
  Rng rng(9);
  double worst = 0;
  std::string worst_group;
  int probes = 0;
  for (const auto& g : params.groups()) {
    for (int k = 0; k < 16; ++k) {
      std::size_t i = g.offset + static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(g.size) - 1));
      if (g.name == "embedding") {
        // Sample embedding entries of tokens that occur in the batch.
        int token;
        do token = static_cast<int>(uniform_int(rng, 0, kEmbeddingRows - 1));
        while (!used[token]);
        i = g.offset + static_cast<std::size_t>(token) * mc.embedding +
            static_cast<std::size_t>(uniform_int(rng, 0, mc.embedding - 1));
      }
      ModelParams plus = params, minus = params;
      plus.data()[i] += kGradientStep;
      minus.data()[i] -= kGradientStep;
      const double numeric = (batch_loss(plus, batch) - batch_loss(minus, batch)) / (2 * kGradientStep);
      const double denom = std::max(std::abs(numeric) + std::abs(grad[i]), 1e-8);
      const double rel = std::abs(numeric - grad[i]) / denom;
      if (rel > worst) {
        worst = rel;
        worst_group = g.name;
      }
      ++probes;
    }
  }
  const double secs = since(t0);
  Verdict v;
  v.pass = worst < kGradientTolerance && secs < kGradientSeconds;
  v.detail = std::to_string(probes) + " parameters over " + std::to_string(params.groups().size()) +
             " classes, max relative error " + std::to_string(worst) +
             (worst_group.empty() ? "" : " (" + worst_group + ")") + ", " + fmt(secs, 2) + "s";
  return v;
}

// ---------------------------------------------------------------------------
// 7. Oracle guidance.

Verdict oracle_guidance_property() {
  DatasetParams p;
  p.length = 3;
  p.count = 0;
  p.test_count = kOracleTasks;
  p.seed = 23;
  const auto tasks = build_dataset(p).test.records;
  int exact = 0;
  std::vector<std::string> misses;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& rec = tasks[i];
    const auto r = sort_and_add(rec.examples, 3, oracle_guidance(rec.program), {}, {});
    const int cp = static_cast<int>(rec.attributes.count());
    if (r.program && r.stats.active_size == cp) {
      ++exact;
    } else {
      misses.push_back("task " + std::to_string(i) + ": C_A=" + std::to_string(r.stats.active_size) +
                       " C_P=" + std::to_string(cp));
    }
  }
  Verdict v;
  v.pass = exact == static_cast<int>(tasks.size()) && tasks.size() == kOracleTasks;
  v.detail = std::to_string(exact) + "/" + std::to_string(tasks.size()) + " tasks with C_A = C_P";
  for (const auto& m : misses) v.detail += "; " + m;
  return v;
}

// ---------------------------------------------------------------------------
// 8 and 9. Speedups.

std::string speedup_text(const Speedup& s) {
  if (!s.defined) return "undefined";
  return (s.lower_bound ? ">=" : "") + fmt(s.value, 2) + "x";
}

Verdict desk_speedup(const Corpus& c, const ModelParams& model, int workers) {
  ProbeBattery probes;
  const auto fps = fingerprints_of(c.train_records, probes);
  auto tasks = tasks_of(c.test);
  check_disjoint(tasks, fps);
  BenchConfig config;
  config.test_length = 3;
  config.workers = workers;
  config.quantiles = {20, kSpeedupQuantile, 60};
  const BenchReport report = run_benchmark(config, std::move(tasks), c.prior, &model);
  print_report_table(std::cerr, report);
  write_report_csv(c.dir / "report.csv", report);
  write_tasks_csv(c.dir / "tasks.csv", report);
  const Speedup saa = report.speedup(Strategy::SaaPrior, Strategy::SaaModel, kSpeedupQuantile);
  const Speedup dfs = report.speedup(Strategy::DfsPrior, Strategy::DfsModel, kSpeedupQuantile);
  Verdict v;
  v.pass = c.train_records.size() >= kMinCorpusRecords && report.tasks.size() == kBenchTasks && saa.defined &&
           dfs.defined && saa.value >= kSaaSpeedup && dfs.value >= kDfsSpeedup;
  v.detail = std::to_string(c.train_records.size()) + " training records, " + std::to_string(report.tasks.size()) +
             " tasks; at " + fmt(kSpeedupQuantile, 0) + "%: Sort-and-add " + speedup_text(saa) +
             " (need " + fmt(kSaaSpeedup, 1) + "), DFS " + speedup_text(dfs) + " (need " + fmt(kDfsSpeedup, 1) +
             "); mean C_A prior " + fmt(report.mean_active_size(Strategy::SaaPrior), 2) + ", model " +
             fmt(report.mean_active_size(Strategy::SaaModel), 2);
  return v;
}

Verdict cross_length(const Corpus& short_corpus, const ModelParams& model, const Dataset& tasks_t3, int workers) {
  ProbeBattery probes;
  const auto fps = fingerprints_of(short_corpus.train_records, probes);
  auto tasks = tasks_of(tasks_t3);
  check_disjoint(tasks, fps);
  BenchConfig config;
  config.test_length = 3;
  config.workers = workers;
  config.strategies = {Strategy::SaaPrior, Strategy::SaaModel};
  config.quantiles = {kCrossLengthQuantile};
  const BenchReport report = run_benchmark(config, std::move(tasks), short_corpus.prior, &model);
  const Speedup s = report.speedup(Strategy::SaaPrior, Strategy::SaaModel, kCrossLengthQuantile);
  Verdict v;
  v.pass = s.defined && s.value > kCrossLengthSpeedup;
  v.detail = "trained on T=2 (" + std::to_string(short_corpus.train_records.size()) + " records), tested on " +
             std::to_string(report.tasks.size()) + " T=3 tasks: Sort-and-add speedup at " +
             fmt(kCrossLengthQuantile, 0) + "% " + speedup_text(s);
  return v;
}

// ---------------------------------------------------------------------------
// 10. Prefix-cache payoff.

Verdict cache_payoff() {
  const ThroughputReport r = throughput_probe(3, kThroughputSeconds);
  Verdict v;
  v.pass = r.ratio() >= kThroughputRatio;
  v.detail = "cached " + fmt(r.cached_per_second / 1e6, 2) + "M/s, naive " + fmt(r.naive_per_second / 1e6, 2) +
             "M/s, ratio " + fmt(r.ratio(), 2);
  return v;
}

// ---------------------------------------------------------------------------
// 11. Permutation invariance.

Verdict permutation_invariance(const ModelParams& model, const Dataset& test) {
  Rng rng(77);
  int sets = 0, orderings = 0, differing = 0;
  for (int k = 0; k < kPermutationSets; ++k) {
    const auto& rec = test.records[uniform_int(rng, 0, static_cast<std::int64_t>(test.records.size()) - 1)];
    if (rec.examples.size() != 5) continue;
    const AttributeScores base = predict(model, rec.examples);
    std::vector<int> perm{0, 1, 2, 3, 4};
    do {
      ExampleSet shuffled;
      for (int i : perm) shuffled.examples.push_back(rec.examples[i]);
      const AttributeScores p = predict(model, shuffled);
      differing += std::memcmp(p.data(), base.data(), sizeof(double) * kNumAttributes) != 0;
      ++orderings;
    } while (std::next_permutation(perm.begin(), perm.end()));
    ++sets;
  }
  Verdict v;
  v.pass = sets == kPermutationSets && orderings == 120 * kPermutationSets && differing == 0;
  v.detail = std::to_string(sets) + " sets x 120 orderings, " + std::to_string(differing) + " differ bitwise";
  return v;
}

// ---------------------------------------------------------------------------
// 12. Dataset self-validation.

Verdict dataset_self_validation(const Corpus& c) {
  std::size_t records = 0, inconsistent = 0;
  ProbeBattery probes;
  std::unordered_set<Fingerprint> train_fps;
  for (const auto& f : c.train_files) {
    const Dataset d = read_dataset(f);
    for (const auto& r : d.records) {
      ++records;
      inconsistent += !consistent(r.program, r.examples);
    }
    const auto fps = fingerprints_of(d.records, probes);
    train_fps.insert(fps.begin(), fps.end());
  }
  for (const auto& r : c.test.records) {
    ++records;
    inconsistent += !consistent(r.program, r.examples);
  }
  std::size_t shared = 0;
  for (auto fp : fingerprints_of(c.test.records, probes)) shared += train_fps.count(fp);
  const Dataset base = read_dataset(c.train_files.front());
  const AttributeScores recomputed = attribute_prior(base.records);
  const PriorFile stored = read_prior(c.dir / "prior.csv");
  double worst = 0;
  for (int a = 0; a < kNumAttributes; ++a) worst = std::max(worst, std::abs(recomputed[a] - stored.prior[a]));
  Verdict v;
  v.pass = inconsistent == 0 && shared == 0 && worst <= kPriorTolerance;
  v.detail = std::to_string(records) + " records, " + std::to_string(inconsistent) + " inconsistent, " +
             std::to_string(shared) + " shared train/test fingerprints, max prior difference " +
             std::to_string(worst);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pbesynth acceptance run"};
  std::string work_dir = "acceptance_work";
  std::vector<int> only;
  int workers = 0;
  app.add_option("--work-dir", work_dir, "Directory for generated corpora and weights");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--workers", workers, "Benchmark worker threads (0: hardware concurrency)");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(work_dir);
  fs::create_directories(root);
  auto wanted = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };

  struct Line {
    int id;
    std::string name;
    Verdict verdict;
  };
  std::vector<Line> lines;
  auto run = [&](int id, const std::string& name, const std::function<Verdict()>& body) {
    if (!wanted(id)) return;
    std::cerr << "criterion " << id << " (" << name << ")" << std::endl;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    v.detail += " [" + fmt(since(t0), 1) + "s]";
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << v.detail << std::endl;
    lines.push_back({id, name, v});
  };

  run(1, "golden semantics", golden_semantics);
  run(2, "catalog integrity", catalog_integrity);
  run(3, "rank-loss fidelity", rank_loss_fidelity);
  run(4, "bound verification", bound_verification);
  run(5, "search completeness", search_completeness);
  run(6, "gradient check", gradient_check);
  run(7, "oracle guidance", oracle_guidance_property);

  std::optional<Corpus> main_corpus;
  std::optional<ModelParams> main_model;
  auto need_main = [&] {
    if (!main_corpus) main_corpus = load_or_build_corpus(root / "t3", 3, kMainShards, kBenchTasks);
    if (!main_model) main_model = load_or_train(*main_corpus);
  };
  run(8, "desk-scale speedup", [&] {
    need_main();
    return desk_speedup(*main_corpus, *main_model, workers);
  });
  run(9, "cross-length generalization", [&] {
    if (!main_corpus) main_corpus = load_or_build_corpus(root / "t3", 3, kMainShards, kBenchTasks);
    const Corpus short_corpus = load_or_build_corpus(root / "t2", 2, shards_for(2, kShortCorpusTarget), 0);
    const ModelParams model = load_or_train(short_corpus);
    return cross_length(short_corpus, model, main_corpus->test, workers);
  });
  run(10, "prefix-cache payoff", cache_payoff);
  run(11, "permutation invariance", [&] {
    need_main();
    return permutation_invariance(*main_model, main_corpus->test);
  });
  run(12, "dataset self-validation", [&] {
    if (!main_corpus) main_corpus = load_or_build_corpus(root / "t3", 3, kMainShards, kBenchTasks);
    return dataset_self_validation(*main_corpus);
  });

  int failed = 0;
  for (const auto& l : lines) failed += !l.verdict.pass;
  std::cout << (lines.size() - failed) << "/" << lines.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
