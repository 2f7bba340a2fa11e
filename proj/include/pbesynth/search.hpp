// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Guided enumerative search over straight-line programs: depth-first search
// ordered by attribute probabilities, Sort-and-add restarts over a growing
// active attribute set, and ranking analytics.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pbesynth/datagen.hpp"
#include "pbesynth/dsl.hpp"
#include "pbesynth/value.hpp"

namespace pbe {

// Per-attribute probabilities in catalog order.
using Guidance = AttributeScores;

Guidance uniform_guidance(double p = 0.5);
// 1 on the attributes of `program`, 0 elsewhere.
Guidance oracle_guidance(const Program& program);

// Probability of an operation: the function's for first-order operations,
// min(function, lambda) for higher-order ones.
double operation_score(const Operation& op, const Guidance& guidance);

// All operations sorted by descending score; ties keep catalog order.
std::vector<Operation> ordered_operations(const Guidance& guidance);

// Zero means unlimited.
struct SearchBudget {
  std::uint64_t max_candidates = 0;
  double max_seconds = 0;
};

enum class SearchStatus { Solved, Exhausted, BudgetExceeded };
const char* status_name(SearchStatus s);

struct SearchStats {
  std::uint64_t candidates = 0;
  double seconds = 0;
  int restarts = 0;
  int active_size = 0;  // Sort-and-add only
};

struct SearchResult {
  std::optional<Program> program;
  SearchStatus status = SearchStatus::Exhausted;
  SearchStats stats;
};

enum class Evaluation { Cached, Naive };

struct SearchOptions {
  Evaluation evaluation = Evaluation::Cached;
  // Called once per candidate, in visiting order, with the candidate's
  // statements after the inputs.
  std::function<void(std::span<const Call>)> on_candidate;
};

// Depth-first search over every well-typed program of length 1..max_length
// built from `operations` (in the given order, arguments ascending by
// variable). Each program is one candidate; the first one reproducing every
// example is returned.
SearchResult dfs_operations(const ExampleSet& examples, int max_length,
                            std::span<const Operation> operations, const SearchBudget& budget,
                            const SearchOptions& options = {});

SearchResult dfs(const ExampleSet& examples, int max_length, const Guidance& guidance,
                 const SearchBudget& budget, const SearchOptions& options = {});

struct SortAndAddSchedule {
  int initial = 1;
  int increment = 1;
};

// Attributes sorted by descending probability, ties by catalog index.
std::vector<int> attribute_order(const Guidance& guidance);

// Operations whose function and lambda (if any) are both active, in
// `ordered` order.
std::vector<Operation> active_operations(std::span<const Operation> ordered,
                                         const AttributeVector& active);

// Restarted exhaustive DFS over a growing active attribute set. A restart
// whose operation set equals the previous one is skipped, since it would
// repeat a search that already failed. stats.active_size is the active-set
// size at success.
SearchResult sort_and_add(const ExampleSet& examples, int max_length, const Guidance& guidance,
                          const SortAndAddSchedule& schedule, const SearchBudget& budget,
                          const SearchOptions& options = {});

// Number of (relevant, irrelevant) pairs with score(relevant) < score(irrelevant).
std::int64_t rank_loss(const AttributeVector& target, const Guidance& scores);

// Active-set size Sort-and-add needs before every target attribute is
// active, with the same ordering as sort_and_add.
int required_active_size(const AttributeVector& target, const Guidance& scores);

struct BoundCheck {
  unsigned __int128 lhs;  // 1^T + ... + C_A^T
  unsigned __int128 mid;  // C_A^(T+1)
  unsigned __int128 rhs;  // 34 * C_A^T
  bool holds() const { return lhs <= mid && mid <= rhs; }
};

// Restart cost bound for Sort-and-add with C_A = c_p + d.
BoundCheck bound_check(int max_length, int c_p, int d);

struct ThroughputReport {
  double cached_per_second = 0;
  double naive_per_second = 0;
  std::uint64_t cached_candidates = 0;
  std::uint64_t naive_candidates = 0;
  double ratio() const { return naive_per_second > 0 ? cached_per_second / naive_per_second : 0; }
};

// Candidate rate of cached and naive DFS on unsolvable tasks from the given
// input signatures with programs up to `max_length`, each mode run for about
// `seconds`.
ThroughputReport throughput_probe(int max_length, double seconds, std::uint64_t seed = 1);

}  // namespace pbe
