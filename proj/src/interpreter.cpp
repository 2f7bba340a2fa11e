// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/interpreter.hpp"

#include <algorithm>
#include <string>

namespace pbe {
namespace {

using i64 = std::int64_t;
using u64 = std::uint64_t;

inline i64 wadd(i64 a, i64 b) { return static_cast<i64>(static_cast<u64>(a) + static_cast<u64>(b)); }
inline i64 wsub(i64 a, i64 b) { return static_cast<i64>(static_cast<u64>(a) - static_cast<u64>(b)); }
inline i64 wmul(i64 a, i64 b) { return static_cast<i64>(static_cast<u64>(a) * static_cast<u64>(b)); }

inline i64 floor_div(i64 x, i64 d) {
  i64 q = x / d;
  if ((x % d != 0) && (x < 0)) --q;
  return q;
}

template <class F>
void with_int_to_int(Lambda l, F&& f) {
  switch (l) {
    case Lambda::PlusOne: return f([](i64 x) { return wadd(x, 1); });
    case Lambda::MinusOne: return f([](i64 x) { return wsub(x, 1); });
    case Lambda::TimesTwo: return f([](i64 x) { return wmul(x, 2); });
    case Lambda::DivTwo: return f([](i64 x) { return floor_div(x, 2); });
    case Lambda::Negate: return f([](i64 x) { return wsub(0, x); });
    case Lambda::Square: return f([](i64 x) { return wmul(x, x); });
    case Lambda::TimesThree: return f([](i64 x) { return wmul(x, 3); });
    case Lambda::DivThree: return f([](i64 x) { return floor_div(x, 3); });
    case Lambda::TimesFour: return f([](i64 x) { return wmul(x, 4); });
    case Lambda::DivFour: return f([](i64 x) { return floor_div(x, 4); });
    default: break;
  }
}

template <class F>
void with_predicate(Lambda l, F&& f) {
  switch (l) {
    case Lambda::IsPositive: return f([](i64 x) { return x > 0; });
    case Lambda::IsNegative: return f([](i64 x) { return x < 0; });
    case Lambda::IsEven: return f([](i64 x) { return (x & 1) == 0; });
    case Lambda::IsOdd: return f([](i64 x) { return (x & 1) == 1; });
    default: break;
  }
}

template <class F>
void with_binary(Lambda l, F&& f) {
  switch (l) {
    case Lambda::Add: return f([](i64 x, i64 y) { return wadd(x, y); });
    case Lambda::Subtract: return f([](i64 x, i64 y) { return wsub(x, y); });
    case Lambda::Multiply: return f([](i64 x, i64 y) { return wmul(x, y); });
    case Lambda::Min: return f([](i64 x, i64 y) { return std::min(x, y); });
    case Lambda::Max: return f([](i64 x, i64 y) { return std::max(x, y); });
    default: break;
  }
}

i64 clamp_count(i64 n, std::size_t size) {
  return std::clamp<i64>(n, 0, static_cast<i64>(size));
}

}  // namespace

void apply_into(const Call& call, const Value& a0, const Value& a1, Value& out) {
  if (a0.is_null() || (call.arity() == 2 && a1.is_null())) {
    out.set_null();
    return;
  }
  switch (call.fn) {
    case Function::Head: {
      auto xs = a0.elements();
      xs.empty() ? out.set_null() : out.set_int(xs.front());
      return;
    }
    case Function::Last: {
      auto xs = a0.elements();
      xs.empty() ? out.set_null() : out.set_int(xs.back());
      return;
    }
    case Function::Take: {
      auto xs = a1.elements();
      const i64 n = clamp_count(a0.as_int(), xs.size());
      out.reset_array().assign(xs.begin(), xs.begin() + n);
      return;
    }
    case Function::Drop: {
      auto xs = a1.elements();
      const i64 n = clamp_count(a0.as_int(), xs.size());
      out.reset_array().assign(xs.begin() + n, xs.end());
      return;
    }
    case Function::Access: {
      auto xs = a1.elements();
      const i64 n = a0.as_int();
      (n >= 0 && n < static_cast<i64>(xs.size())) ? out.set_int(xs[n]) : out.set_null();
      return;
    }
    case Function::Minimum: {
      auto xs = a0.elements();
      xs.empty() ? out.set_null() : out.set_int(*std::min_element(xs.begin(), xs.end()));
      return;
    }
    case Function::Maximum: {
      auto xs = a0.elements();
      xs.empty() ? out.set_null() : out.set_int(*std::max_element(xs.begin(), xs.end()));
      return;
    }
    case Function::Reverse: {
      auto xs = a0.elements();
      out.reset_array().assign(xs.rbegin(), xs.rend());
      return;
    }
    case Function::Sort: {
      auto xs = a0.elements();
      auto& ys = out.reset_array();
      ys.assign(xs.begin(), xs.end());
      std::sort(ys.begin(), ys.end());
      return;
    }
    case Function::Sum: {
      i64 s = 0;
      for (i64 x : a0.elements()) s = wadd(s, x);
      out.set_int(s);
      return;
    }
    case Function::Map: {
      auto xs = a0.elements();
      auto& ys = out.reset_array();
      ys.resize(xs.size());
      with_int_to_int(*call.lambda, [&](auto f) {
        for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
      });
      return;
    }
    case Function::Filter: {
      auto xs = a0.elements();
      auto& ys = out.reset_array();
      with_predicate(*call.lambda, [&](auto p) {
        for (i64 x : xs) {
          if (p(x)) ys.push_back(x);
        }
      });
      return;
    }
    case Function::Count: {
      i64 n = 0;
      with_predicate(*call.lambda, [&](auto p) {
        for (i64 x : a0.elements()) n += p(x) ? 1 : 0;
      });
      out.set_int(n);
      return;
    }
    case Function::ZipWith: {
      auto xs = a0.elements();
      auto ys = a1.elements();
      const std::size_t n = std::min(xs.size(), ys.size());
      auto& zs = out.reset_array();
      zs.resize(n);
      with_binary(*call.lambda, [&](auto f) {
        for (std::size_t i = 0; i < n; ++i) zs[i] = f(xs[i], ys[i]);
      });
      return;
    }
    case Function::Scanl1: {
      auto xs = a0.elements();
      auto& ys = out.reset_array();
      ys.resize(xs.size());
      if (xs.empty()) return;
      with_binary(*call.lambda, [&](auto f) {
        ys[0] = xs[0];
        for (std::size_t i = 1; i < xs.size(); ++i) ys[i] = f(ys[i - 1], xs[i]);
      });
      return;
    }
  }
}

Value apply(Function fn, std::optional<Lambda> lambda, std::span<const Value> args) {
  const FunctionSignature& sig = signature(fn);
  if (args.size() != sig.arity) {
    throw SignatureMismatch(std::string(token(fn)) + " expects " + std::to_string(sig.arity) +
                            " argument(s)");
  }
  if (sig.lambda.has_value() != lambda.has_value() ||
      (lambda && lambda_class(*lambda) != *sig.lambda)) {
    throw SignatureMismatch(std::string(token(fn)) + ": lambda does not match signature");
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].is_null() && !args[i].has_type(sig.args[i])) {
      throw SignatureMismatch(std::string(token(fn)) + ": argument " + std::to_string(i) +
                              " should be " + std::string(type_name(sig.args[i])));
    }
  }
  Value out;
  const Call call{fn, lambda, {0, 1}};
  apply_into(call, args[0], args.size() > 1 ? args[1] : args[0], out);
  return out;
}

std::vector<Value> run_environment(const Program& program, std::span<const Value> inputs) {
  if (inputs.size() != static_cast<std::size_t>(program.num_inputs())) {
    throw SignatureMismatch("program takes " + std::to_string(program.num_inputs()) +
                            " input(s), got " + std::to_string(inputs.size()));
  }
  std::vector<Value> env(program.size());
  for (int i = 0; i < program.num_inputs(); ++i) {
    if (!inputs[i].has_type(program[i].type)) {
      throw SignatureMismatch("input " + std::to_string(i) + " should be " +
                              std::string(type_name(program[i].type)));
    }
    env[i] = inputs[i];
  }
  for (std::size_t i = program.num_inputs(); i < program.size(); ++i) {
    const Call& c = *program[i].call;
    apply_into(c, env[c.args[0]], env[c.args[c.arity() - 1]], env[i]);
  }
  return env;
}

Value run_program(const Program& program, std::span<const Value> inputs) {
  std::vector<Value> env = run_environment(program, inputs);
  return std::move(env.back());
}

bool consistent(const Program& program, const ExampleSet& examples) {
  for (const Example& e : examples.examples) {
    const Value got = run_program(program, e.inputs);
    if (got.is_null() || !(got == e.output)) return false;
  }
  return true;
}

}  // namespace pbe
