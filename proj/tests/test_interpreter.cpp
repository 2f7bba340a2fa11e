// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>

#include "doctest.h"
#include "pbesynth/datagen.hpp"
#include "pbesynth/interpreter.hpp"
#include "pbesynth/random.hpp"

using namespace pbe;

namespace {

Value arr(std::initializer_list<std::int64_t> xs) { return Value::array(xs); }
Value num(std::int64_t x) { return Value::scalar(x); }

Value run(const char* text, std::vector<Value> inputs) { return run_program(parse_program(text), inputs); }

// Straightforward list semantics written against std containers.
std::vector<std::int64_t> oracle_scanl1(const std::vector<std::int64_t>& xs,
                                        std::int64_t (*f)(std::int64_t, std::int64_t)) {
  std::vector<std::int64_t> ys;
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(i == 0 ? xs[0] : f(ys.back(), xs[i]));
  return ys;
}

std::vector<std::int64_t> random_array(Rng& rng, int max_len, int lo, int hi) {
  std::vector<std::int64_t> xs(uniform_int(rng, 0, max_len));
  for (auto& x : xs) x = uniform_int(rng, lo, hi);
  return xs;
}

}  // namespace

TEST_CASE("golden outputs of the listed example programs") {
  CHECK(run("a <- [int]\nb <- FILTER (<0) a\nc <- MAP (*4) b\nd <- SORT c\ne <- REVERSE d",
            {arr({-17, -3, 4, 11, 0, -5, -9, 13, 6, 6, -8, 11})}) == arr({-12, -20, -32, -36, -68}));
  CHECK(run("k <- int\nb <- [int]\nc <- SORT b\nd <- TAKE k c\ne <- SUM d", {num(2), arr({3, 5, 4, 7, 5})}) ==
        num(7));
  CHECK(run("w <- [int]\nt <- [int]\nc <- MAP (*3) w\nd <- ZIPWITH (+) c t\ne <- MAXIMUM d",
            {arr({6, 2, 4, 7, 9}), arr({5, 3, 6, 1, 0})}) == num(27));
  CHECK(run("h <- [int]\nb <- SCANL1 MIN h\nc <- ZIPWITH (-) h b\nd <- FILTER (>0) c\ne <- SUM d",
            {arr({8, 5, 7, 2, 5})}) == num(5));
  CHECK(run("a <- [int]\nb <- REVERSE a\nc <- ZIPWITH MIN a b", {arr({3, 7, 5, 2, 8})}) == arr({3, 2, 5, 2, 3}));
  CHECK(run("t <- [int]\np <- [int]\nc <- MAP (-1) t\nd <- MAP (-1) p\ne <- ZIPWITH (+) c d\nf <- MINIMUM e",
            {arr({4, 8, 11, 2}), arr({2, 3, 4, 1})}) == num(1));
  CHECK(run("s <- [int]\np <- [int]\nc <- SCANL1 (+) p\nd <- ZIPWITH (*) s c\ne <- SUM d",
            {arr({4, 7, 2, 3}), arr({2, 1, 3, 1})}) == num(62));
  CHECK(run("s <- [int]\nb <- REVERSE s\nc <- ZIPWITH (-) b s\nd <- FILTER (>0) c\ne <- SUM d",
            {arr({1, 2, 4, 5, 7})}) == num(9));
}

TEST_CASE("subtraction lambda takes the left operand first") {
  // ZIPWITH (-) b a on ([6,2,4,7,9], [5,3,2,1,0]): b - a = [-1,1,-2,-6,-9].
  CHECK(run("a <- [int]\nb <- [int]\nc <- ZIPWITH (-) b a", {arr({6, 2, 4, 7, 9}), arr({5, 3, 2, 1, 0})}) ==
        arr({-1, 1, -2, -6, -9}));
  CHECK(run("a <- [int]\nb <- [int]\nc <- ZIPWITH (-) b a\nd <- COUNT (>0) c",
            {arr({6, 2, 4, 7, 9}), arr({5, 3, 2, 1, 0})}) == num(1));
  CHECK(apply(Function::Scanl1, Lambda::Subtract, std::vector{arr({10, 1, 2})}) == arr({10, 9, 7}));
}

TEST_CASE("function edge cases") {
  CHECK(apply(Function::Head, std::nullopt, std::vector{arr({})}).is_null());
  CHECK(apply(Function::Last, std::nullopt, std::vector{arr({})}).is_null());
  CHECK(apply(Function::Minimum, std::nullopt, std::vector{arr({})}).is_null());
  CHECK(apply(Function::Maximum, std::nullopt, std::vector{arr({})}).is_null());
  CHECK(apply(Function::Sum, std::nullopt, std::vector{arr({})}) == num(0));
  CHECK(apply(Function::Scanl1, Lambda::Min, std::vector{arr({8, 5, 7, 2, 5})}) == arr({8, 5, 5, 2, 2}));
  CHECK(apply(Function::ZipWith, Lambda::Multiply, std::vector{arr({1, 2, 3}), arr({4, 5})}) == arr({4, 10}));
  CHECK(apply(Function::Take, std::nullopt, std::vector{num(-2), arr({1, 2, 3})}) == arr({}));
  CHECK(apply(Function::Drop, std::nullopt, std::vector{num(-2), arr({1, 2, 3})}) == arr({1, 2, 3}));
  CHECK(apply(Function::Take, std::nullopt, std::vector{num(9), arr({1, 2, 3})}) == arr({1, 2, 3}));
  CHECK(apply(Function::Drop, std::nullopt, std::vector{num(9), arr({1, 2, 3})}) == arr({}));
  CHECK(apply(Function::Access, std::nullopt, std::vector{num(3), arr({1, 2, 3})}).is_null());
  CHECK(apply(Function::Access, std::nullopt, std::vector{num(-1), arr({1, 2, 3})}).is_null());
  CHECK(apply(Function::Access, std::nullopt, std::vector{num(1), arr({1, 2, 3})}) == num(2));
  CHECK(apply(Function::Map, Lambda::DivTwo, std::vector{arr({-3, 3, -4})}) == arr({-2, 1, -2}));
  CHECK(apply(Function::Map, Lambda::DivThree, std::vector{arr({-1, -3, 7})}) == arr({-1, -1, 2}));
  CHECK(apply(Function::Count, Lambda::IsOdd, std::vector{arr({-3, -2, 1, 0})}) == num(2));
  CHECK(apply(Function::Filter, Lambda::IsEven, std::vector{arr({-3, -2, 1, 0})}) == arr({-2, 0}));
  CHECK(apply(Function::Map, Lambda::Negate, std::vector{arr({5, -6})}) == arr({-5, 6}));
  CHECK(apply(Function::Map, Lambda::Square, std::vector{arr({-5, 4})}) == arr({25, 16}));
}

TEST_CASE("signature violations throw") {
  CHECK_THROWS_AS(apply(Function::Sort, std::nullopt, std::vector{num(1)}), SignatureMismatch);
  CHECK_THROWS_AS(apply(Function::Map, std::nullopt, std::vector{arr({1})}), SignatureMismatch);
  CHECK_THROWS_AS(apply(Function::Map, Lambda::Add, std::vector{arr({1})}), SignatureMismatch);
  CHECK_THROWS_AS(apply(Function::Sort, Lambda::Add, std::vector{arr({1})}), SignatureMismatch);
  CHECK_THROWS_AS(apply(Function::Take, std::nullopt, std::vector{arr({1})}), SignatureMismatch);
  CHECK_THROWS_AS(run("a <- [int]\nb <- SORT a", {num(3)}), SignatureMismatch);
  CHECK_THROWS_AS(run("a <- [int]\nb <- SORT a", {}), SignatureMismatch);
}

TEST_CASE("Null arguments yield Null for every operation") {
  for (const Operation& op : operations()) {
    const auto& sig = signature(op.fn);
    std::vector<Value> args;
    for (int i = 0; i < sig.arity; ++i) args.push_back(sig.args[i] == Type::Int ? num(1) : arr({1, 2}));
    for (int i = 0; i < sig.arity; ++i) {
      auto with_null = args;
      with_null[i] = Value::null();
      CHECK(apply(op.fn, op.lambda, with_null).is_null());
    }
  }
}

TEST_CASE("length laws and scan recurrence on random arrays") {
  Rng rng(3);
  auto sub = [](std::int64_t x, std::int64_t y) { return x - y; };
  auto mx = [](std::int64_t x, std::int64_t y) { return std::max(x, y); };
  for (int trial = 0; trial < 500; ++trial) {
    const auto xs = random_array(rng, 20, -256, 255);
    const auto ys = random_array(rng, 20, -256, 255);
    const Value a = Value::array(xs), b = Value::array(ys);
    CHECK(apply(Function::Map, Lambda::PlusOne, std::vector{a}).elements().size() == xs.size());
    CHECK(apply(Function::ZipWith, Lambda::Add, std::vector{a, b}).elements().size() == std::min(xs.size(), ys.size()));
    CHECK(apply(Function::Filter, Lambda::IsPositive, std::vector{a}).elements().size() <= xs.size());
    CHECK(apply(Function::Scanl1, Lambda::Subtract, std::vector{a}) == Value::array(oracle_scanl1(xs, +sub)));
    CHECK(apply(Function::Scanl1, Lambda::Max, std::vector{a}) == Value::array(oracle_scanl1(xs, +mx)));
    const Value sorted = apply(Function::Sort, std::nullopt, std::vector{a});
    std::map<std::int64_t, int> before, after;
    for (auto x : xs) ++before[x];
    for (auto x : sorted.elements()) ++after[x];
    CHECK(before == after);
    CHECK(std::is_sorted(sorted.elements().begin(), sorted.elements().end()));
    const Value rev = apply(Function::Reverse, std::nullopt, std::vector{a});
    CHECK(apply(Function::Reverse, std::nullopt, std::vector{rev}) == a);
  }
}

TEST_CASE("consistency checks") {
  const Program sorter = parse_program("a <- [int]\nb <- SORT a");
  const Program reverser = parse_program("a <- [int]\nb <- REVERSE a");
  ExampleSet set;
  set.examples.push_back({{arr({3, 1, 2})}, arr({1, 2, 3})});
  set.examples.push_back({{arr({2, 1})}, arr({1, 2})});
  CHECK(consistent(sorter, set));
  CHECK_FALSE(consistent(reverser, set));
  const Program head = parse_program("a <- [int]\nb <- HEAD a");
  ExampleSet empty_input;
  empty_input.examples.push_back({{arr({})}, num(0)});
  CHECK_FALSE(consistent(head, empty_input));
}

TEST_CASE("prefix cache matches uncached evaluation") {
  const Program listing =
      parse_program("a <- [int]\nb <- FILTER (<0) a\nc <- MAP (*4) b\nd <- SORT c\ne <- REVERSE d");
  PrefixCache cache({{arr({-17, -3, 4, 11, 0, -5, -9, 13, 6, 6, -8, 11})}}, 5);
  for (int i = 1; i < 4; ++i) {
    cache.extend(cache.key(), *listing[i].call);
    cache.push(*listing[i].call);
  }
  const auto out = cache.extend(cache.key(), *listing[4].call);
  CHECK(out[0] == arr({-12, -20, -32, -36, -68}));

  PrefixCache one({{arr({5, 1, 3})}}, 2);
  const Call sort{Function::Sort, std::nullopt, {0, 0}};
  CHECK(one.extend(one.key(), sort)[0] == run("a <- [int]\nb <- SORT a", {arr({5, 1, 3})}));
}

TEST_CASE("prefix cache differential test on random programs") {
  Rng rng(11);
  std::vector<Program> programs;
  enumerate_programs(3, default_signatures(), [&](const Program& p) {
    if (uniform_int(rng, 0, 20000) == 0) programs.push_back(p);
  });
  REQUIRE(programs.size() >= 100);
  for (const Program& p : programs) {
    std::vector<std::vector<Value>> inputs;
    for (int e = 0; e < 5; ++e) {
      std::vector<Value> in;
      for (Type t : p.input_types()) {
        in.push_back(t == Type::Int ? num(uniform_int(rng, -3, 8)) : Value::array(random_array(rng, 8, -20, 20)));
      }
      inputs.push_back(std::move(in));
    }
    PrefixCache cache(inputs, static_cast<int>(p.size()));
    for (std::size_t i = p.num_inputs(); i < p.size(); ++i) {
      const auto values = cache.extend(cache.key(), *p[i].call);
      for (int e = 0; e < 5; ++e) {
        const auto env = run_environment(p, inputs[e]);
        REQUIRE(values[e] == env[i]);
        REQUIRE(cache.evaluate(e, *p[i].call) == env[i]);
      }
      cache.extend(cache.key(), *p[i].call);
      cache.push(*p[i].call);
    }
  }
}

TEST_CASE("prefix cache rejects stale keys") {
  PrefixCache cache({{arr({1, 2})}}, 3);
  const Call sort{Function::Sort, std::nullopt, {0, 0}};
  const auto root = cache.key();
  cache.extend(root, sort);
  cache.push(sort);
  CHECK_THROWS_AS(cache.extend(root, sort), CacheMiss);
  CHECK(cache.key() == PrefixCache::chain_key(root, sort));
  CHECK_THROWS_AS(cache.push(sort), CacheMiss);
  cache.pop();
  CHECK(cache.key() == root);
  CHECK_THROWS_AS(cache.pop(), CacheMiss);
}
