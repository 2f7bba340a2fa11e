// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Speedup benchmarks: held-out tasks, strategy runs, timeout-to-solve-q%
// summaries and the train/test length grid.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "pbesynth/datagen.hpp"
#include "pbesynth/model.hpp"
#include "pbesynth/search.hpp"

namespace pbe {

enum class Strategy { DfsPrior, DfsModel, SaaPrior, SaaModel };
inline constexpr Strategy kAllStrategies[] = {Strategy::DfsPrior, Strategy::DfsModel, Strategy::SaaPrior,
                                              Strategy::SaaModel};

// "dfs/prior", "dfs/model", "saa/prior", "saa/model".
const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);
bool uses_model(Strategy s);
bool uses_sort_and_add(Strategy s);

struct BenchTask {
  int id = 0;
  Program truth;
  ExampleSet examples;
};

// `count` tasks from distinct programs of exactly `length` calls whose
// fingerprints are not in `exclude`.
std::vector<BenchTask> make_tasks(int length, int count, int examples, std::uint64_t seed,
                                  const std::unordered_set<Fingerprint>& exclude,
                                  const std::vector<InputSignature>& signatures = default_signatures());

// Throws std::runtime_error if a task's fingerprint is in `training`.
void check_disjoint(std::span<const BenchTask> tasks, const std::unordered_set<Fingerprint>& training);

struct TaskOutcome {
  bool solved = false;
  std::uint64_t candidates = 0;
  double seconds = 0;
  int active_size = 0;
  int true_attributes = 0;
  std::string program;
};

// Minimal per-task cost such that at least q% of tasks cost no more: the
// ceil(q * P / 100)-th smallest cost, unsolved tasks counting as infinite.
// nullopt when that many tasks are not solved.
std::optional<double> timeout_to_solve(std::span<const std::optional<double>> costs, double q);

struct Speedup {
  double value = 0;
  // True when the baseline did not reach q% within the budget, so `value`
  // is the budget divided by the guided timeout.
  bool lower_bound = false;
  bool defined = false;
};

struct BenchConfig {
  int test_length = 3;
  SearchBudget budget;
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  int workers = 0;  // 0: hardware concurrency
  std::vector<double> quantiles{20, 40, 60};
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchTask> tasks;
  std::vector<Strategy> strategies;
  std::vector<std::vector<TaskOutcome>> outcomes;  // [strategy][task]

  const std::vector<TaskOutcome>& of(Strategy s) const;
  std::optional<double> timeout_candidates(Strategy s, double q) const;
  std::optional<double> timeout_seconds(Strategy s, double q) const;
  Speedup speedup(Strategy baseline, Strategy guided, double q) const;
  double mean_active_size(Strategy s) const;
};

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs every strategy on every task. Each returned program is re-verified
// with consistent(); a failure raises BenchError. `model` may be null when
// no model strategy is requested.
BenchReport run_benchmark(const BenchConfig& config, std::vector<BenchTask> tasks, const Guidance& prior,
                          const ModelParams* model);

void write_report_csv(const std::filesystem::path& path, const BenchReport& report);
void write_tasks_csv(const std::filesystem::path& path, const BenchReport& report);
// Aligned table: per search family, baseline/model/speedup rows for each q.
void print_report_table(std::ostream& out, const BenchReport& report);

struct GridCell {
  int train_length;
  int test_length;
  Speedup speedup;
};

void write_grid_csv(const std::filesystem::path& path, std::span<const GridCell> cells, double q);

std::string hardware_note();

}  // namespace pbe
