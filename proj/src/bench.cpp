// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pbesynth/interpreter.hpp"

namespace pbe {
namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n') out += "; ";
    else out += c;
  }
  return out + "\"";
}

std::string format_cost(std::optional<double> v) {
  if (!v) return "unsolved";
  std::ostringstream os;
  if (*v == std::floor(*v) && std::abs(*v) < 1e15) os << static_cast<std::int64_t>(*v);
  else os << std::setprecision(6) << *v;
  return os.str();
}

std::string format_speedup(const Speedup& s) {
  if (!s.defined) return "n/a";
  std::ostringstream os;
  os << (s.lower_bound ? ">" : "") << std::fixed << std::setprecision(1) << s.value << "x";
  return os.str();
}

TaskOutcome run_one(Strategy s, const BenchTask& task, int length, const Guidance& guidance,
                    const SearchBudget& budget) {
  const SearchResult r = uses_sort_and_add(s) ? sort_and_add(task.examples, length, guidance, {}, budget)
                                              : dfs(task.examples, length, guidance, budget);
  TaskOutcome o;
  o.candidates = r.stats.candidates;
  o.seconds = r.stats.seconds;
  o.active_size = r.stats.active_size;
  o.true_attributes = static_cast<int>(attribute_vector(task.truth).count());
  if (r.program) {
    if (!consistent(*r.program, task.examples)) {
      throw BenchError("task " + std::to_string(task.id) + ": " + strategy_name(s) +
                       " returned an inconsistent program");
    }
    o.solved = true;
    o.program = format_program(*r.program);
  }
  return o;
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::DfsPrior: return "dfs/prior";
    case Strategy::DfsModel: return "dfs/model";
    case Strategy::SaaPrior: return "saa/prior";
    case Strategy::SaaModel: return "saa/model";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (name == strategy_name(s)) return s;
  }
  return std::nullopt;
}

bool uses_model(Strategy s) { return s == Strategy::DfsModel || s == Strategy::SaaModel; }
bool uses_sort_and_add(Strategy s) { return s == Strategy::SaaPrior || s == Strategy::SaaModel; }

std::vector<BenchTask> make_tasks(int length, int count, int examples, std::uint64_t seed,
                                  const std::unordered_set<Fingerprint>& exclude,
                                  const std::vector<InputSignature>& signatures) {
  DatasetParams params;
  params.length = length;
  params.count = 0;
  params.test_count = count;
  params.examples = examples;
  params.seed = seed;
  params.signatures = signatures;
  BuiltDataset built = build_dataset(params, &exclude);
  std::vector<BenchTask> tasks;
  for (DatasetRecord& r : built.test.records) {
    tasks.push_back({static_cast<int>(tasks.size()), std::move(r.program), std::move(r.examples)});
  }
  return tasks;
}

void check_disjoint(std::span<const BenchTask> tasks, const std::unordered_set<Fingerprint>& training) {
  ProbeBattery probes;
  for (const BenchTask& t : tasks) {
    if (training.count(probes.fingerprint(t.truth))) {
      throw BenchError("task " + std::to_string(t.id) + " shares a fingerprint with the training corpus");
    }
  }
}

std::optional<double> timeout_to_solve(std::span<const std::optional<double>> costs, double q) {
  if (costs.empty() || q <= 0 || q > 100) throw std::invalid_argument("timeout_to_solve: bad arguments");
  std::vector<double> sorted;
  for (const auto& c : costs) sorted.push_back(c ? *c : std::numeric_limits<double>::infinity());
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(costs.size()) / 100.0 - 1e-9));
  const double v = sorted[std::max<std::size_t>(k, 1) - 1];
  if (std::isinf(v)) return std::nullopt;
  return v;
}

const std::vector<TaskOutcome>& BenchReport::of(Strategy s) const {
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    if (strategies[i] == s) return outcomes[i];
  }
  throw std::out_of_range(std::string("strategy not in report: ") + strategy_name(s));
}

std::optional<double> BenchReport::timeout_candidates(Strategy s, double q) const {
  std::vector<std::optional<double>> costs;
  for (const TaskOutcome& o : of(s)) {
    costs.push_back(o.solved ? std::optional<double>(static_cast<double>(o.candidates)) : std::nullopt);
  }
  return timeout_to_solve(costs, q);
}

std::optional<double> BenchReport::timeout_seconds(Strategy s, double q) const {
  std::vector<std::optional<double>> costs;
  for (const TaskOutcome& o : of(s)) costs.push_back(o.solved ? std::optional<double>(o.seconds) : std::nullopt);
  return timeout_to_solve(costs, q);
}

Speedup BenchReport::speedup(Strategy baseline, Strategy guided, double q) const {
  Speedup s;
  const auto b = timeout_candidates(baseline, q);
  const auto g = timeout_candidates(guided, q);
  if (!g || *g <= 0) return s;
  if (b) {
    s.value = *b / *g;
    s.defined = true;
  } else if (config.budget.max_candidates) {
    s.value = static_cast<double>(config.budget.max_candidates) / *g;
    s.lower_bound = true;
    s.defined = true;
  }
  return s;
}

double BenchReport::mean_active_size(Strategy s) const {
  double total = 0;
  int n = 0;
  for (const TaskOutcome& o : of(s)) {
    if (o.solved) {
      total += o.active_size;
      ++n;
    }
  }
  return n ? total / n : 0;
}

BenchReport run_benchmark(const BenchConfig& config, std::vector<BenchTask> tasks, const Guidance& prior,
                          const ModelParams* model) {
  if (tasks.empty()) throw BenchError("no benchmark tasks");
  for (Strategy s : config.strategies) {
    if (uses_model(s) && !model) throw BenchError(std::string(strategy_name(s)) + " needs a model");
  }
  BenchReport report;
  report.config = config;
  report.strategies = config.strategies;
  report.tasks = std::move(tasks);
  const std::size_t n = report.tasks.size();
  report.outcomes.assign(report.strategies.size(), std::vector<TaskOutcome>(n));

  std::vector<Guidance> predictions(model ? n : 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const BenchTask& task = report.tasks[i];
        if (model) predictions[i] = predict(*model, task.examples);
        for (std::size_t k = 0; k < report.strategies.size(); ++k) {
          const Strategy s = report.strategies[k];
          report.outcomes[k][i] =
              run_one(s, task, config.test_length, uses_model(s) ? predictions[i] : prior, config.budget);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::clamp<unsigned>(config.workers > 0 ? config.workers : hw, 1, static_cast<unsigned>(n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

void write_report_csv(const std::filesystem::path& path, const BenchReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# pbesynth-bench version=1 tasks=" << report.tasks.size() << " length=" << report.config.test_length
      << " budget_candidates=" << report.config.budget.max_candidates
      << " budget_seconds=" << report.config.budget.max_seconds
      << " integer_arguments=existing-variables\n";
  out << "strategy,q,timeout_candidates,timeout_seconds,solved,mean_active_size\n";
  for (Strategy s : report.strategies) {
    int solved = 0;
    for (const TaskOutcome& o : report.of(s)) solved += o.solved;
    for (double q : report.config.quantiles) {
      out << strategy_name(s) << ',' << q << ',' << format_cost(report.timeout_candidates(s, q)) << ','
          << format_cost(report.timeout_seconds(s, q)) << ',' << solved << ',' << report.mean_active_size(s)
          << '\n';
    }
  }
  const std::pair<Strategy, Strategy> pairs[] = {{Strategy::DfsPrior, Strategy::DfsModel},
                                                 {Strategy::SaaPrior, Strategy::SaaModel}};
  bool header = false;
  for (auto [base, guided] : pairs) {
    if (std::find(report.strategies.begin(), report.strategies.end(), base) == report.strategies.end() ||
        std::find(report.strategies.begin(), report.strategies.end(), guided) == report.strategies.end()) {
      continue;
    }
    if (!header) {
      out << "\nbaseline,guided,q,speedup,lower_bound\n";
      header = true;
    }
    for (double q : report.config.quantiles) {
      const Speedup s = report.speedup(base, guided, q);
      out << strategy_name(base) << ',' << strategy_name(guided) << ',' << q << ','
          << (s.defined ? std::to_string(s.value) : "n/a") << ',' << (s.lower_bound ? 1 : 0) << '\n';
    }
  }
}

void write_tasks_csv(const std::filesystem::path& path, const BenchReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# pbesynth-bench-tasks version=1\n";
  out << "task,strategy,solved,candidates,seconds,active_size,true_attributes,truth,program\n";
  for (std::size_t k = 0; k < report.strategies.size(); ++k) {
    for (std::size_t i = 0; i < report.tasks.size(); ++i) {
      const TaskOutcome& o = report.outcomes[k][i];
      out << report.tasks[i].id << ',' << strategy_name(report.strategies[k]) << ',' << o.solved << ','
          << o.candidates << ',' << o.seconds << ',' << o.active_size << ',' << o.true_attributes << ','
          << csv_quote(format_program(report.tasks[i].truth)) << ',' << csv_quote(o.program) << '\n';
    }
  }
}

void print_report_table(std::ostream& out, const BenchReport& report) {
  const auto& qs = report.config.quantiles;
  out << "Candidates to solve q% of " << report.tasks.size() << " tasks (length " << report.config.test_length
      << ")\n";
  out << std::left << std::setw(12) << "search" << std::setw(10) << "guidance";
  for (double q : qs) out << std::right << std::setw(14) << (format_cost(q) + "%");
  out << '\n';
  const std::pair<const char*, std::pair<Strategy, Strategy>> families[] = {
      {"DFS", {Strategy::DfsPrior, Strategy::DfsModel}}, {"Sort-add", {Strategy::SaaPrior, Strategy::SaaModel}}};
  auto has = [&](Strategy s) {
    return std::find(report.strategies.begin(), report.strategies.end(), s) != report.strategies.end();
  };
  for (const auto& [label, pair] : families) {
    const auto [base, guided] = pair;
    if (has(base)) {
      out << std::left << std::setw(12) << label << std::setw(10) << "baseline";
      for (double q : qs) out << std::right << std::setw(14) << format_cost(report.timeout_candidates(base, q));
      out << '\n';
    }
    if (has(guided)) {
      out << std::left << std::setw(12) << (has(base) ? "" : label) << std::setw(10) << "model";
      for (double q : qs) out << std::right << std::setw(14) << format_cost(report.timeout_candidates(guided, q));
      out << '\n';
    }
    if (has(base) && has(guided)) {
      out << std::left << std::setw(12) << "" << std::setw(10) << "speedup";
      for (double q : qs) out << std::right << std::setw(14) << format_speedup(report.speedup(base, guided, q));
      out << '\n';
    }
  }
}

void write_grid_csv(const std::filesystem::path& path, std::span<const GridCell> cells, double q) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<int> train, test;
  for (const GridCell& c : cells) {
    if (std::find(train.begin(), train.end(), c.train_length) == train.end()) train.push_back(c.train_length);
    if (std::find(test.begin(), test.end(), c.test_length) == test.end()) test.push_back(c.test_length);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  out << "# pbesynth-grid version=1 metric=candidates q=" << q << " guided=saa/model baseline=saa/prior\n";
  out << "train_length";
  for (int t : test) out << ",test_" << t;
  out << '\n';
  for (int tr : train) {
    out << tr;
    for (int te : test) {
      out << ',';
      for (const GridCell& c : cells) {
        if (c.train_length == tr && c.test_length == te) {
          out << (c.speedup.defined ? (c.speedup.lower_bound ? ">" : "") + std::to_string(c.speedup.value) : "n/a");
        }
      }
    }
    out << '\n';
  }
}

std::string hardware_note() {
  std::ostringstream os;
  os << std::thread::hardware_concurrency() << " hardware threads";
  std::ifstream cpu("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpu, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) os << ", " << line.substr(colon + 2);
      break;
    }
  }
  return os.str();
}

}  // namespace pbe
