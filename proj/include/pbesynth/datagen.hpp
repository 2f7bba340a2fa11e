// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training-data generation: program enumeration, redundancy pruning,
// backward range propagation, example sampling and dataset assembly.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pbesynth/dsl.hpp"
#include "pbesynth/value.hpp"

namespace pbe {

using InputSignature = std::vector<Type>;

// [int]; [int],[int]; int,[int]
std::vector<InputSignature> default_signatures();
std::string signature_string(std::span<const Type> sig);

// Emits every well-typed program of length 1..max_length over the given
// input signatures exactly once: length-major, then signature order, then
// depth-first in operation/argument order.
void enumerate_programs(int max_length, std::span<const InputSignature> signatures,
                        const std::function<void(const Program&)>& sink);

// Number of programs enumerate_programs would emit, per length (index 0 is
// length 1). Computed without materialising programs.
std::vector<std::uint64_t> count_programs(int max_length, std::span<const InputSignature> signatures);

// True if some variable (input or intermediate) does not reach the output.
bool has_dead_variable(const Program& program);

using Fingerprint = std::uint64_t;

inline constexpr std::uint64_t kDefaultProbeSeed = 0x5eed0f9b0be5ULL;
inline constexpr int kDefaultProbeCount = 32;

// Fixed seeded probe inputs per input signature. Programs with equal
// fingerprints are treated as semantically equivalent.
class ProbeBattery {
 public:
  explicit ProbeBattery(std::uint64_t seed = kDefaultProbeSeed, int probes = kDefaultProbeCount);

  std::uint64_t seed() const { return seed_; }
  int size() const { return probes_; }
  const std::vector<std::vector<Value>>& inputs(std::span<const Type> sig);

  Fingerprint fingerprint(const Program& program);
  // Fingerprint of a program with input signature `sig` whose outputs on
  // the probe inputs are `outputs`.
  static Fingerprint hash_outputs(std::span<const Type> sig, std::span<const Value> outputs);

 private:
  std::uint64_t seed_;
  int probes_;
  std::unordered_map<std::string, std::vector<std::vector<Value>>> cache_;
};

struct PrunedProgram {
  Program program;
  Fingerprint fingerprint;
};

// Programs of length 1..max_length with no dead variable and no probe
// fingerprint shared with an input or with a shorter kept program. Among
// programs of equal length sharing a fingerprint, the one using the fewest
// distinct attributes is kept (ties: the earliest in enumeration order).
// Result is in enumeration order of the first program of each class.
std::vector<PrunedProgram> pruned_programs(int max_length, std::span<const InputSignature> signatures,
                                           ProbeBattery& probes);

// Closed integer interval; empty when lo > hi.
struct ValueRange {
  std::int64_t lo = kMinInt;
  std::int64_t hi = kMaxInt;

  bool empty() const { return lo > hi; }
  bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
  ValueRange intersect(const ValueRange& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
  static ValueRange working() { return {kMinInt, kMaxInt}; }
  static ValueRange index() { return {0, kMaxLength}; }

  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

// Per-variable ranges (per element for arrays) such that any input drawn
// from them keeps every intermediate and the output within the working
// range. nullopt if some range is empty.
std::optional<std::vector<ValueRange>> propagate_variable_ranges(
    const Program& program, ValueRange output = ValueRange::working());

// Input part of propagate_variable_ranges. Integer inputs (only ever used as
// counts or indices) are additionally restricted to [0, kMaxLength].
std::optional<std::vector<ValueRange>> propagate_ranges(const Program& program,
                                                        ValueRange output = ValueRange::working());

inline constexpr int kDefaultExampleCount = 5;
inline constexpr int kSampleRetries = 100;

// Draws `count` examples with inputs from `input_ranges` (array lengths
// uniform in [1, kMaxLength]). An attempt is rejected if the output is Null
// or any environment value leaves the working range; after kSampleRetries
// rejections for one example the program is discarded (nullopt).
std::optional<ExampleSet> sample_examples(const Program& program,
                                          std::span<const ValueRange> input_ranges, int count,
                                          std::uint64_t seed);

struct DatasetRecord {
  Program program;
  AttributeVector attributes;
  ExampleSet examples;
};

// DatasetParams::count value requesting every usable program.
inline constexpr int kAllPrograms = -1;

struct DatasetParams {
  int length = 3;
  int count = 1000;
  int test_count = 100;
  int examples = kDefaultExampleCount;
  std::uint64_t seed = 1;
  std::uint64_t probe_seed = kDefaultProbeSeed;
  std::vector<InputSignature> signatures = default_signatures();
  // Require examples that no shorter program reproduces.
  bool discriminative = true;
};

using AttributeScores = std::array<double, kNumAttributes>;

struct DatasetHeader {
  int version = 1;
  std::string split = "train";
  int length = 0;
  int count = 0;
  int examples = kDefaultExampleCount;
  int max_length = kMaxLength;
  std::uint64_t seed = 0;
  std::uint64_t probe_seed = kDefaultProbeSeed;
};

struct Dataset {
  DatasetHeader header;
  std::vector<DatasetRecord> records;
};

struct BuiltDataset {
  Dataset train;
  Dataset test;
  AttributeScores prior{};
};

class InsufficientPrograms : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Generates `test_count` held-out records and `count` training records
// (kAllPrograms: all remaining) from distinct pruned programs of exactly
// `length` calls, plus the attribute prior of the training split. Programs
// whose fingerprint is in `exclude` are skipped.
BuiltDataset build_dataset(const DatasetParams& params,
                           const std::unordered_set<Fingerprint>* exclude = nullptr);

// Same programs as `base` in a new seeded order, each with freshly sampled
// examples. Programs whose sampling fails under the new seed are dropped.
// Used to grow a training corpus beyond the number of distinct programs
// while keeping each file free of repeated fingerprints.
Dataset resample_dataset(const Dataset& base, std::uint64_t seed, bool discriminative = true);

// True if some input returned unchanged, or some program of length below
// `length`, reproduces every example.
bool solved_by_shorter(const ExampleSet& examples, int length);

inline constexpr int kDiscriminativeAttempts = 10;

// sample_examples over the program's propagated ranges. With
// `discriminative`, example sets solved by a shorter program are redrawn up
// to kDiscriminativeAttempts times before the program is given up.
std::optional<ExampleSet> sample_discriminative(const Program& program, int count,
                                                std::uint64_t seed, bool discriminative);

// Fraction of records containing each attribute.
AttributeScores attribute_prior(std::span<const DatasetRecord> records);

DatasetRecord make_record(Program program, ExampleSet examples);

std::unordered_set<Fingerprint> fingerprints_of(std::span<const DatasetRecord> records,
                                                ProbeBattery& probes);

}  // namespace pbe
