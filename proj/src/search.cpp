// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/search.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pbesynth/interpreter.hpp"
#include "pbesynth/random.hpp"

namespace pbe {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Searcher {
 public:
  Searcher(const ExampleSet& examples, int max_length, std::span<const Operation> ops,
           const SearchBudget& budget, const SearchOptions& options)
      : examples_(examples),
        max_length_(max_length),
        ops_(ops),
        budget_(budget),
        options_(options),
        input_types_(examples.input_types()),
        output_type_(examples.output_type()),
        start_(Clock::now()) {
    types_ = input_types_;
    if (options_.evaluation == Evaluation::Cached) {
      std::vector<std::vector<Value>> inputs;
      inputs.reserve(examples.size());
      for (const Example& e : examples.examples) inputs.push_back(e.inputs);
      cache_.emplace(std::move(inputs), static_cast<int>(input_types_.size()) + max_length);
    }
    calls_.reserve(max_length);
  }

  SearchResult run() {
    visit(0);
    SearchResult r;
    r.stats.candidates = candidates_;
    r.stats.seconds = seconds_since(start_);
    r.stats.restarts = 1;
    if (solution_) {
      r.status = SearchStatus::Solved;
      r.program = std::move(solution_);
    } else {
      r.status = out_of_budget_ ? SearchStatus::BudgetExceeded : SearchStatus::Exhausted;
    }
    return r;
  }

 private:
  bool done() const { return solution_.has_value() || out_of_budget_; }

  void visit(int depth) {
    const std::vector<Type> vars = types_;
    const bool leaf = depth + 1 == max_length_;
    for (const Operation& op : ops_) {
      for_each_call(op, vars, [&](const Call& c) {
        if (done()) return;
        candidate(c, depth, leaf);
      });
      if (done()) return;
    }
  }

  void candidate(const Call& c, int depth, bool leaf) {
    ++candidates_;
    calls_.push_back(c);
    if (options_.on_candidate) options_.on_candidate(calls_);
    const bool typed = c.result_type() == output_type_;
    if (options_.evaluation == Evaluation::Naive) {
      if (typed && consistent(Program::from_calls(input_types_, calls_), examples_)) found();
      if (!leaf && !done()) descend(c, depth);
    } else if (leaf) {
      if (typed && leaf_matches(c)) found();
    } else {
      const auto values = cache_->extend(cache_->key(), c);
      if (typed && all_match(values)) found();
      if (!done()) {
        cache_->push(c);
        descend(c, depth);
        cache_->pop();
      }
    }
    calls_.pop_back();
    check_budget();
  }

  void descend(const Call& c, int depth) {
    types_.push_back(c.result_type());
    visit(depth + 1);
    types_.pop_back();
  }

  bool leaf_matches(const Call& c) {
    for (int e = 0; e < static_cast<int>(examples_.size()); ++e) {
      if (!(cache_->evaluate(e, c) == examples_[e].output)) return false;
    }
    return true;
  }

  bool all_match(std::span<const Value> values) const {
    for (std::size_t e = 0; e < values.size(); ++e) {
      if (!(values[e] == examples_[e].output)) return false;
    }
    return true;
  }

  void found() { solution_ = Program::from_calls(input_types_, calls_); }

  void check_budget() {
    if (solution_) return;
    if (budget_.max_candidates && candidates_ >= budget_.max_candidates) out_of_budget_ = true;
    if (budget_.max_seconds > 0 && (candidates_ & 1023) == 0 && seconds_since(start_) >= budget_.max_seconds) {
      out_of_budget_ = true;
    }
  }

  const ExampleSet& examples_;
  int max_length_;
  std::span<const Operation> ops_;
  SearchBudget budget_;
  const SearchOptions& options_;
  std::vector<Type> input_types_;
  Type output_type_;
  Clock::time_point start_;
  std::optional<PrefixCache> cache_;
  std::vector<Type> types_;
  std::vector<Call> calls_;
  std::uint64_t candidates_ = 0;
  bool out_of_budget_ = false;
  std::optional<Program> solution_;
};

void check_search_args(const ExampleSet& examples, int max_length) {
  validate_examples(examples);
  if (max_length < 1) throw std::invalid_argument("program length must be at least 1");
  if (static_cast<int>(examples[0].inputs.size()) + max_length > kMaxStatements) {
    throw std::invalid_argument("program length exceeds the statement limit");
  }
}

}  // namespace

const char* status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::Solved: return "solved";
    case SearchStatus::Exhausted: return "exhausted";
    case SearchStatus::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

Guidance uniform_guidance(double p) {
  Guidance g;
  g.fill(p);
  return g;
}

Guidance oracle_guidance(const Program& program) {
  const AttributeVector attrs = attribute_vector(program);
  Guidance g{};
  for (int a = 0; a < kNumAttributes; ++a) g[a] = attrs[a] ? 1.0 : 0.0;
  return g;
}

double operation_score(const Operation& op, const Guidance& guidance) {
  const double p = guidance[attribute_index(op.fn)];
  return op.lambda ? std::min(p, guidance[attribute_index(*op.lambda)]) : p;
}

std::vector<Operation> ordered_operations(const Guidance& guidance) {
  std::vector<Operation> ops(operations().begin(), operations().end());
  std::stable_sort(ops.begin(), ops.end(), [&](const Operation& a, const Operation& b) {
    return operation_score(a, guidance) > operation_score(b, guidance);
  });
  return ops;
}

SearchResult dfs_operations(const ExampleSet& examples, int max_length,
                            std::span<const Operation> operations, const SearchBudget& budget,
                            const SearchOptions& options) {
  check_search_args(examples, max_length);
  return Searcher(examples, max_length, operations, budget, options).run();
}

SearchResult dfs(const ExampleSet& examples, int max_length, const Guidance& guidance,
                 const SearchBudget& budget, const SearchOptions& options) {
  const std::vector<Operation> ops = ordered_operations(guidance);
  return dfs_operations(examples, max_length, ops, budget, options);
}

std::vector<int> attribute_order(const Guidance& guidance) {
  std::vector<int> order(kNumAttributes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return guidance[a] > guidance[b]; });
  return order;
}

std::vector<Operation> active_operations(std::span<const Operation> ordered,
                                         const AttributeVector& active) {
  std::vector<Operation> out;
  for (const Operation& op : ordered) {
    if (!active[attribute_index(op.fn)]) continue;
    if (op.lambda && !active[attribute_index(*op.lambda)]) continue;
    out.push_back(op);
  }
  return out;
}

SearchResult sort_and_add(const ExampleSet& examples, int max_length, const Guidance& guidance,
                          const SortAndAddSchedule& schedule, const SearchBudget& budget,
                          const SearchOptions& options) {
  check_search_args(examples, max_length);
  if (schedule.initial < 1 || schedule.increment < 1) {
    throw std::invalid_argument("Sort-and-add schedule values must be positive");
  }
  const auto start = Clock::now();
  const std::vector<int> order = attribute_order(guidance);
  const std::vector<Operation> ordered = ordered_operations(guidance);

  SearchResult result;
  AttributeVector active;
  std::size_t previous_ops = 0;
  for (int size = schedule.initial;; size += schedule.increment) {
    const int k = std::min(size, kNumAttributes);
    for (int i = 0; i < k; ++i) active.set(order[i]);
    const std::vector<Operation> ops = active_operations(ordered, active);
    if (ops.size() != previous_ops) {
      previous_ops = ops.size();
      SearchBudget remaining;
      if (budget.max_candidates) {
        if (result.stats.candidates >= budget.max_candidates) {
          result.status = SearchStatus::BudgetExceeded;
          break;
        }
        remaining.max_candidates = budget.max_candidates - result.stats.candidates;
      }
      if (budget.max_seconds > 0) {
        remaining.max_seconds = budget.max_seconds - seconds_since(start);
        if (remaining.max_seconds <= 0) {
          result.status = SearchStatus::BudgetExceeded;
          break;
        }
      }
      SearchResult r = Searcher(examples, max_length, ops, remaining, options).run();
      result.stats.candidates += r.stats.candidates;
      ++result.stats.restarts;
      if (r.status == SearchStatus::Solved) {
        result.status = SearchStatus::Solved;
        result.program = std::move(r.program);
        result.stats.active_size = k;
        break;
      }
      if (r.status == SearchStatus::BudgetExceeded) {
        result.status = SearchStatus::BudgetExceeded;
        break;
      }
    }
    if (k == kNumAttributes) {
      result.status = SearchStatus::Exhausted;
      break;
    }
  }
  result.stats.seconds = seconds_since(start);
  return result;
}

std::int64_t rank_loss(const AttributeVector& target, const Guidance& scores) {
  std::vector<double> irrelevant;
  for (int a = 0; a < kNumAttributes; ++a) {
    if (!target[a]) irrelevant.push_back(scores[a]);
  }
  std::sort(irrelevant.begin(), irrelevant.end());
  std::int64_t loss = 0;
  for (int a = 0; a < kNumAttributes; ++a) {
    if (!target[a]) continue;
    const auto above = std::upper_bound(irrelevant.begin(), irrelevant.end(), scores[a]);
    loss += irrelevant.end() - above;
  }
  return loss;
}

int required_active_size(const AttributeVector& target, const Guidance& scores) {
  const std::vector<int> order = attribute_order(scores);
  int needed = 0;
  for (int i = 0; i < kNumAttributes; ++i) {
    if (target[order[i]]) needed = i + 1;
  }
  return needed;
}

BoundCheck bound_check(int max_length, int c_p, int d) {
  const int c_a = c_p + d;
  if (max_length < 1 || c_p < 0 || d < 0 || c_a < 1 || c_a > kNumAttributes) {
    throw std::invalid_argument("bound_check needs T >= 1 and 1 <= C_A <= 34");
  }
  if (max_length > 24) throw std::overflow_error("bound_check: T too large for 128-bit arithmetic");
  auto power = [](unsigned __int128 base, int exp) {
    unsigned __int128 r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
  };
  BoundCheck b{0, 0, 0};
  for (int c = 1; c <= c_a; ++c) b.lhs += power(c, max_length);
  b.mid = power(c_a, max_length + 1);
  b.rhs = kNumAttributes * power(c_a, max_length);
  return b;
}

ThroughputReport throughput_probe(int max_length, double seconds, std::uint64_t seed) {
  // Random outputs that no short program reproduces force full traversals.
  std::vector<ExampleSet> tasks;
  Rng rng(seed);
  for (int t = 0; t < 8; ++t) {
    ExampleSet set;
    const int inputs = 1 + t % 2;
    for (int e = 0; e < kDefaultExampleCount; ++e) {
      Example ex;
      for (int i = 0; i < inputs; ++i) {
        std::vector<std::int64_t> xs(uniform_int(rng, 1, kMaxLength));
        for (auto& x : xs) x = uniform_int(rng, kMinInt, kMaxInt);
        ex.inputs.push_back(Value::array(std::move(xs)));
      }
      std::vector<std::int64_t> ys(7);
      for (auto& y : ys) y = uniform_int(rng, kMinInt, kMaxInt);
      ex.output = Value::array(std::move(ys));
      set.examples.push_back(std::move(ex));
    }
    tasks.push_back(std::move(set));
  }
  const Guidance g = uniform_guidance();
  auto measure = [&](Evaluation mode, std::uint64_t& count) {
    SearchOptions opts;
    opts.evaluation = mode;
    const auto t0 = Clock::now();
    for (std::size_t i = 0;; ++i) {
      const double left = seconds - seconds_since(t0);
      if (left <= 0) break;
      SearchBudget budget;
      budget.max_seconds = left;
      count += dfs(tasks[i % tasks.size()], max_length, g, budget, opts).stats.candidates;
    }
    return count / seconds_since(t0);
  };
  ThroughputReport r;
  r.cached_per_second = measure(Evaluation::Cached, r.cached_candidates);
  r.naive_per_second = measure(Evaluation::Naive, r.naive_candidates);
  return r;
}

}  // namespace pbe
