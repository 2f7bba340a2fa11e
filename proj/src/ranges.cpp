// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Backward interval propagation. Each statement maps the range allowed for
// its result to ranges for its arguments; a variable used several times gets
// the intersection. Bounds are per element and carry no relations between
// variables.

#include <cmath>

#include "pbesynth/datagen.hpp"

namespace pbe {
namespace {

using i64 = std::int64_t;

constexpr ValueRange kEmpty{1, 0};

i64 floor_div(i64 x, i64 d) {
  i64 q = x / d;
  if ((x % d != 0) && (x < 0)) --q;
  return q;
}

i64 ceil_div(i64 x, i64 d) { return -floor_div(-x, d); }

// Largest s >= 0 with s*s <= v (v >= 0).
i64 isqrt(i64 v) {
  i64 s = static_cast<i64>(std::sqrt(static_cast<double>(v)));
  while (s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

// Elements of an array whose (prefix) sums of up to kMaxLength terms must
// stay in r.
ValueRange summand_range(ValueRange r) {
  const i64 lo = r.lo < 0 ? ceil_div(r.lo, kMaxLength) : r.lo;
  const i64 hi = r.hi >= 0 ? floor_div(r.hi, kMaxLength) : r.hi;
  return {lo, hi};
}

ValueRange symmetric(i64 s) { return s < 0 ? kEmpty : ValueRange{-s, s}; }

ValueRange map_inverse(Lambda l, ValueRange r) {
  switch (l) {
    case Lambda::PlusOne: return {r.lo - 1, r.hi - 1};
    case Lambda::MinusOne: return {r.lo + 1, r.hi + 1};
    case Lambda::TimesTwo: return {ceil_div(r.lo, 2), floor_div(r.hi, 2)};
    case Lambda::TimesThree: return {ceil_div(r.lo, 3), floor_div(r.hi, 3)};
    case Lambda::TimesFour: return {ceil_div(r.lo, 4), floor_div(r.hi, 4)};
    case Lambda::DivTwo: return {2 * r.lo, 2 * r.hi + 1};
    case Lambda::DivThree: return {3 * r.lo, 3 * r.hi + 2};
    case Lambda::DivFour: return {4 * r.lo, 4 * r.hi + 3};
    case Lambda::Negate: return {-r.hi, -r.lo};
    case Lambda::Square: {
      if (r.hi < 0) return kEmpty;
      const i64 s = isqrt(r.hi);
      if (r.lo <= 0) return {-s, s};
      i64 m = isqrt(r.lo);
      if (m * m < r.lo) ++m;
      return {m, s};
    }
    default: return kEmpty;
  }
}

struct Constraint {
  ValueRange first;
  ValueRange second;
};

// Ranges for the arguments of `call` given the range of its result.
Constraint invert(const Call& call, ValueRange r) {
  const ValueRange any = ValueRange::working();
  switch (call.fn) {
    case Function::Head:
    case Function::Last:
    case Function::Minimum:
    case Function::Maximum:
    case Function::Reverse:
    case Function::Sort:
    case Function::Filter:
      return {r, any};
    case Function::Take:
    case Function::Drop:
    case Function::Access:
      return {any, r};
    case Function::Sum:
      return {summand_range(r), any};
    case Function::Count:
      // Result lies in [0, L] whatever the elements are.
      return {r.intersect(ValueRange::index()).empty() ? kEmpty : any, any};
    case Function::Map:
      return {map_inverse(*call.lambda, r), any};
    case Function::ZipWith:
      switch (*call.lambda) {
        case Lambda::Add: {
          const ValueRange half{ceil_div(r.lo, 2), floor_div(r.hi, 2)};
          return {half, half};
        }
        case Lambda::Subtract: {
          const ValueRange half{ceil_div(r.lo, 2), floor_div(r.hi, 2)};
          return {half, {-half.hi, -half.lo}};
        }
        case Lambda::Multiply: {
          if (r.lo > 0 || r.hi < 0) return {kEmpty, kEmpty};
          const ValueRange s = symmetric(isqrt(std::min(r.hi, -r.lo)));
          return {s, s};
        }
        default:
          return {r, r};
      }
    case Function::Scanl1:
      switch (*call.lambda) {
        case Lambda::Add:
          return {summand_range(r), any};
        case Lambda::Subtract:
          if (r.lo > 0 || r.hi < 0) return {kEmpty, any};
          return {symmetric(std::min(floor_div(r.hi, kMaxLength), floor_div(-r.lo, kMaxLength))), any};
        case Lambda::Multiply:
          // Products of arbitrarily many factors: only |x| <= 1 is safe.
          if (r.lo <= -1 && r.hi >= 1) return {{-1, 1}, any};
          if (r.lo <= 0 && r.hi >= 1) return {{0, 1}, any};
          if (r.contains(0)) return {{0, 0}, any};
          return {kEmpty, any};
        default:
          return {r, any};
      }
  }
  return {kEmpty, kEmpty};
}

}  // namespace

std::optional<std::vector<ValueRange>> propagate_variable_ranges(const Program& program,
                                                                 ValueRange output) {
  std::vector<ValueRange> ranges(program.size(), ValueRange::working());
  ranges.back() = ranges.back().intersect(output);
  for (std::size_t i = program.size(); i-- > static_cast<std::size_t>(program.num_inputs());) {
    if (ranges[i].empty()) return std::nullopt;
    const Call& c = *program[i].call;
    const Constraint k = invert(c, ranges[i]);
    ranges[c.args[0]] = ranges[c.args[0]].intersect(k.first);
    if (c.arity() == 2) ranges[c.args[1]] = ranges[c.args[1]].intersect(k.second);
  }
  for (const ValueRange& r : ranges) {
    if (r.empty()) return std::nullopt;
  }
  return ranges;
}

std::optional<std::vector<ValueRange>> propagate_ranges(const Program& program, ValueRange output) {
  auto all = propagate_variable_ranges(program, output);
  if (!all) return std::nullopt;
  std::vector<ValueRange> inputs(all->begin(), all->begin() + program.num_inputs());
  for (int i = 0; i < program.num_inputs(); ++i) {
    if (program[i].type == Type::Int) inputs[i] = inputs[i].intersect(ValueRange::index());
    if (inputs[i].empty()) return std::nullopt;
  }
  return inputs;
}

}  // namespace pbe
