// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/interpreter.hpp"

namespace pbe {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t PrefixCache::chain_key(std::uint64_t prefix_key, const Call& call) {
  const std::uint64_t code = static_cast<std::uint64_t>(call.fn) |
                             (static_cast<std::uint64_t>(call.lambda ? 1 + static_cast<int>(*call.lambda) : 0) << 8) |
                             (static_cast<std::uint64_t>(call.args[0]) << 16) |
                             (static_cast<std::uint64_t>(call.arity() == 2 ? call.args[1] : 0) << 24);
  return mix(prefix_key ^ mix(code));
}

PrefixCache::PrefixCache(std::vector<std::vector<Value>> example_inputs, int capacity)
    : num_examples_(static_cast<int>(example_inputs.size())), capacity_(capacity) {
  if (example_inputs.empty()) throw std::invalid_argument("PrefixCache needs at least one example");
  const std::size_t n_inputs = example_inputs.front().size();
  if (n_inputs == 0 || n_inputs > static_cast<std::size_t>(capacity)) {
    throw std::invalid_argument("PrefixCache: bad input count");
  }
  slots_.resize(static_cast<std::size_t>(capacity_ + 1) * num_examples_);
  std::uint64_t key = mix(n_inputs);
  for (std::size_t v = 0; v < n_inputs; ++v) {
    const Value& proto = example_inputs.front()[v];
    if (proto.is_null()) throw std::invalid_argument("PrefixCache: Null input");
    const Type t = proto.is_int() ? Type::Int : Type::IntArray;
    for (int e = 0; e < num_examples_; ++e) {
      auto& inputs = example_inputs[e];
      if (inputs.size() != n_inputs || !inputs[v].has_type(t)) {
        throw std::invalid_argument("PrefixCache: examples disagree on the input signature");
      }
      slots_[index(e, static_cast<int>(v))] = std::move(inputs[v]);
    }
    types_.push_back(t);
    key = mix(key ^ (static_cast<std::uint64_t>(t) + 1));
  }
  size_ = static_cast<int>(n_inputs);
  keys_.push_back(key);
}

std::span<const Value> PrefixCache::extend(std::uint64_t prefix_key, const Call& call) {
  if (prefix_key != key()) throw CacheMiss("prefix is not cached");
  if (size_ >= capacity_) throw CacheMiss("cache capacity exhausted");
  const int a0 = call.args[0];
  const int a1 = call.arity() == 2 ? call.args[1] : a0;
  for (int e = 0; e < num_examples_; ++e) {
    apply_into(call, slots_[index(e, a0)], slots_[index(e, a1)], slots_[index(e, size_)]);
  }
  extended_ = call;
  return {slots_.data() + index(0, size_), static_cast<std::size_t>(num_examples_)};
}

const Value& PrefixCache::evaluate(int example, const Call& call) {
  extended_.reset();
  const int a0 = call.args[0];
  const int a1 = call.arity() == 2 ? call.args[1] : a0;
  Value& out = slots_[index(example, size_)];
  apply_into(call, slots_[index(example, a0)], slots_[index(example, a1)], out);
  return out;
}

void PrefixCache::push(const Call& call) {
  if (!extended_ || !(*extended_ == call)) throw CacheMiss("push without matching extend");
  keys_.push_back(chain_key(key(), call));
  types_.push_back(call.result_type());
  ++size_;
  extended_.reset();
}

void PrefixCache::pop() {
  if (keys_.size() <= 1) throw CacheMiss("cannot pop an input");
  keys_.pop_back();
  types_.pop_back();
  --size_;
  extended_.reset();
}

}  // namespace pbe
