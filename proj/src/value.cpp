// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/value.hpp"

#include <algorithm>

namespace pbe {

Value Value::scalar(std::int64_t v) {
  Value out;
  out.set_int(v);
  return out;
}

Value Value::array(std::vector<std::int64_t> elems) {
  Value out;
  out.kind_ = Kind::Array;
  out.elems_ = std::move(elems);
  return out;
}

Value Value::array(std::initializer_list<std::int64_t> elems) {
  return array(std::vector<std::int64_t>(elems));
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::Null:
      return true;
    case Value::Kind::Int:
      return a.scalar_ == b.scalar_;
    case Value::Kind::Array:
      return a.elems_ == b.elems_;
  }
  return false;
}

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Null:
      return "Null";
    case Value::Kind::Int:
      return std::to_string(v.as_int());
    case Value::Kind::Array: {
      std::string s = "[";
      bool first = true;
      for (auto x : v.elements()) {
        if (!first) s += ", ";
        first = false;
        s += std::to_string(x);
      }
      return s + "]";
    }
  }
  return {};
}

bool value_less(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  if (a.is_int()) return a.as_int() < b.as_int();
  auto ea = a.elements();
  auto eb = b.elements();
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

std::vector<Type> ExampleSet::input_types() const {
  std::vector<Type> types;
  if (examples.empty()) return types;
  for (const Value& v : examples.front().inputs) {
    types.push_back(v.is_int() ? Type::Int : Type::IntArray);
  }
  return types;
}

Type ExampleSet::output_type() const {
  if (examples.empty()) throw ExampleError("empty example set");
  return examples.front().output.is_int() ? Type::Int : Type::IntArray;
}

void validate_examples(const ExampleSet& set) {
  if (set.empty()) throw ExampleError("example set is empty");
  const Example& first = set.examples.front();
  if (first.inputs.empty() || first.inputs.size() > static_cast<std::size_t>(kMaxInputs)) {
    throw ExampleError("examples need between 1 and " + std::to_string(kMaxInputs) + " inputs");
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Example& e = set.examples[i];
    if (e.inputs.size() != first.inputs.size()) {
      throw ExampleError("example " + std::to_string(i) + " has a different input count");
    }
    for (std::size_t k = 0; k < e.inputs.size(); ++k) {
      if (e.inputs[k].is_null()) throw ExampleError("example " + std::to_string(i) + " has a Null input");
      if (e.inputs[k].kind() != first.inputs[k].kind()) {
        throw ExampleError("example " + std::to_string(i) + " input " + std::to_string(k) +
                           " has a different type");
      }
    }
    if (e.output.is_null()) throw ExampleError("example " + std::to_string(i) + " has a Null output");
    if (e.output.kind() != first.output.kind()) {
      throw ExampleError("example " + std::to_string(i) + " output has a different type");
    }
  }
}

bool within_working_range(const Value& v) {
  auto ok = [](std::int64_t x) { return x >= kMinInt && x <= kMaxInt; };
  switch (v.kind()) {
    case Value::Kind::Null:
      return true;
    case Value::Kind::Int:
      return ok(v.as_int());
    case Value::Kind::Array:
      return v.elements().size() <= static_cast<std::size_t>(kMaxLength) &&
             std::all_of(v.elements().begin(), v.elements().end(), ok);
  }
  return false;
}

bool within_working_range(const Example& e) {
  return std::all_of(e.inputs.begin(), e.inputs.end(),
                     [](const Value& v) { return within_working_range(v); }) &&
         within_working_range(e.output);
}

}  // namespace pbe
