// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation of DSL programs. Semantics:
//  - a Null argument makes every function return Null;
//  - integer division rounds toward negative infinity and (%2==1) uses the
//    non-negative remainder, so odd negatives are odd;
//  - Take/Drop clamp their count to [0, |xs|]; Access outside the array is Null;
//  - arithmetic wraps in 64 bits; range enforcement belongs to data generation.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbesynth/dsl.hpp"
#include "pbesynth/value.hpp"

namespace pbe {

class SignatureMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Applies `fn` (with `lambda` for higher-order functions) to `args`.
// Throws SignatureMismatch if arity, argument kinds or lambda class are wrong.
Value apply(Function fn, std::optional<Lambda> lambda, std::span<const Value> args);

// Unchecked kernel: writes the result of `call`'s operation applied to
// `a0` (and `a1` for binary functions) into `out`. `out` must not alias an
// argument.
void apply_into(const Call& call, const Value& a0, const Value& a1, Value& out);

// Runs `program` on `inputs` and returns the value of the last variable.
Value run_program(const Program& program, std::span<const Value> inputs);

// Full environment after running `program` (one value per statement).
std::vector<Value> run_environment(const Program& program, std::span<const Value> inputs);

// True iff the program reproduces every example output exactly.
bool consistent(const Program& program, const ExampleSet& examples);

class CacheMiss : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Per-example environments for the program prefix currently being explored.
// The cache behaves as a stack: extend() evaluates one more statement on
// every example into a scratch slot, push() commits it, pop() drops the last
// committed statement. Each prefix is identified by a chained hash key.
class PrefixCache {
 public:
  explicit PrefixCache(std::vector<std::vector<Value>> example_inputs,
                       int capacity = kMaxStatements);

  int num_examples() const { return num_examples_; }
  int size() const { return size_; }
  std::uint64_t key() const { return keys_.back(); }
  std::span<const Type> types() const { return {types_.data(), static_cast<std::size_t>(size_)}; }
  const Value& value(int example, int var) const { return slots_[index(example, var)]; }

  // Evaluates `call` on the prefix identified by `prefix_key` for all
  // examples. Throws CacheMiss if the key does not name the cached prefix.
  std::span<const Value> extend(std::uint64_t prefix_key, const Call& call);

  // Evaluates `call` for one example only, into that example's scratch slot.
  const Value& evaluate(int example, const Call& call);

  // Commits the scratch results of the last extend() of `call`.
  void push(const Call& call);
  void pop();

  static std::uint64_t chain_key(std::uint64_t prefix_key, const Call& call);

 private:
  std::size_t index(int example, int var) const {
    return static_cast<std::size_t>(var) * num_examples_ + example;
  }

  int num_examples_;
  int capacity_;
  int size_ = 0;
  std::vector<Value> slots_;  // variable-major; row size_ is the scratch row
  std::vector<Type> types_;
  std::vector<std::uint64_t> keys_;
  std::optional<Call> extended_;
};

}  // namespace pbe
