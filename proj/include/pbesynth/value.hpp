// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pbesynth/dsl.hpp"

namespace pbe {

// Working integer range for examples and embeddings, and the maximum array
// length L.
inline constexpr std::int64_t kMinInt = -256;
inline constexpr std::int64_t kMaxInt = 255;
inline constexpr int kMaxLength = 20;

// A runtime datum: Null, an integer scalar or an integer array. Arrays keep
// their storage across reassignment, so a Value slot can be reused in hot
// loops without reallocating.
class Value {
 public:
  enum class Kind : std::uint8_t { Null, Int, Array };

  Value() = default;
  static Value null() { return Value(); }
  static Value scalar(std::int64_t v);
  static Value array(std::vector<std::int64_t> elems);
  static Value array(std::initializer_list<std::int64_t> elems);

  Kind kind() const { return kind_; }
  bool is_null() const { return kind_ == Kind::Null; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_array() const { return kind_ == Kind::Array; }
  bool has_type(Type t) const {
    return t == Type::Int ? kind_ == Kind::Int : kind_ == Kind::Array;
  }

  std::int64_t as_int() const { return scalar_; }
  std::span<const std::int64_t> elements() const { return elems_; }

  void set_null() { kind_ = Kind::Null; }
  void set_int(std::int64_t v) {
    kind_ = Kind::Int;
    scalar_ = v;
  }
  // Switches to an empty array and returns the storage to fill.
  std::vector<std::int64_t>& reset_array() {
    kind_ = Kind::Array;
    elems_.clear();
    return elems_;
  }

  friend bool operator==(const Value& a, const Value& b);

 private:
  Kind kind_ = Kind::Null;
  std::int64_t scalar_ = 0;
  std::vector<std::int64_t> elems_;
};

std::string to_string(const Value& v);

// Strict weak order used to canonicalise example sets.
bool value_less(const Value& a, const Value& b);

struct Example {
  std::vector<Value> inputs;
  Value output;

  friend bool operator==(const Example&, const Example&) = default;
};

// M examples sharing one input/output signature.
struct ExampleSet {
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  const Example& operator[](std::size_t i) const { return examples[i]; }

  std::vector<Type> input_types() const;
  Type output_type() const;

  friend bool operator==(const ExampleSet&, const ExampleSet&) = default;
};

class ExampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks structural well-formedness: non-empty, no Null, identical
// signatures, 1..kMaxInputs inputs. Throws ExampleError.
void validate_examples(const ExampleSet& set);

// True if every integer is in [kMinInt, kMaxInt] and every array has at most
// kMaxLength elements.
bool within_working_range(const Value& v);
bool within_working_range(const Example& e);

}  // namespace pbe
