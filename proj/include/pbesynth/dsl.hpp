// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Abstract syntax of the list-manipulation DSL: the function and lambda
// catalog, typed straight-line programs, attribute extraction and the
// canonical text format.

#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pbe {

inline constexpr int kNumFunctions = 15;
inline constexpr int kNumFirstOrder = 10;
inline constexpr int kNumLambdas = 19;
inline constexpr int kNumAttributes = kNumFunctions + kNumLambdas;
inline constexpr int kMaxInputs = 3;
inline constexpr int kMaxStatements = 26;

enum class Type : std::uint8_t { Int, IntArray };

enum class Function : std::uint8_t {
  Head,
  Last,
  Take,
  Drop,
  Access,
  Minimum,
  Maximum,
  Reverse,
  Sort,
  Sum,
  Map,
  Filter,
  Count,
  ZipWith,
  Scanl1,
};

enum class Lambda : std::uint8_t {
  // Int -> Int
  PlusOne,
  MinusOne,
  TimesTwo,
  DivTwo,
  Negate,
  Square,
  TimesThree,
  DivThree,
  TimesFour,
  DivFour,
  // Int -> Bool
  IsPositive,
  IsNegative,
  IsEven,
  IsOdd,
  // Int -> Int -> Int
  Add,
  Subtract,
  Multiply,
  Min,
  Max,
};

enum class LambdaClass : std::uint8_t { IntToInt, IntToBool, IntIntToInt };

enum class AttributeKind : std::uint8_t { FirstOrder, HigherOrder, Lambda };

struct FunctionSignature {
  std::optional<LambdaClass> lambda;
  std::uint8_t arity = 1;  // value arguments, the lambda excluded
  std::array<Type, 2> args{};
  Type result = Type::Int;
};

const FunctionSignature& signature(Function f);
LambdaClass lambda_class(Lambda l);
inline bool is_higher_order(Function f) { return static_cast<int>(f) >= kNumFirstOrder; }

std::string_view token(Function f);  // "FILTER"
std::string_view token(Lambda l);    // "(<0)", "MIN"
std::string_view display_name(Function f);  // "Filter"
std::string_view display_name(Lambda l);    // "(<0)", "Min"
std::string_view type_name(Type t);         // "int", "[int]"

constexpr int attribute_index(Function f) { return static_cast<int>(f); }
constexpr int attribute_index(Lambda l) { return kNumFunctions + static_cast<int>(l); }

struct CatalogEntry {
  std::string_view name;
  AttributeKind kind;
  std::string_view signature;
};

// Stable order defining attribute indexing: the 15 functions, then the 19
// lambdas, each in listing order.
std::span<const CatalogEntry, kNumAttributes> catalog();

std::string_view attribute_name(int index);

using AttributeVector = std::bitset<kNumAttributes>;

// A (function, lambda) pair; the unit of choice when extending a program.
struct Operation {
  Function fn;
  std::optional<Lambda> lambda;

  friend bool operator==(const Operation&, const Operation&) = default;
};

inline constexpr int kNumOperations = 38;

// All 38 well-formed operations, ordered by function then lambda.
std::span<const Operation, kNumOperations> operations();

struct Call {
  Function fn = Function::Head;
  std::optional<Lambda> lambda;
  std::array<std::uint8_t, 2> args{};

  std::uint8_t arity() const { return signature(fn).arity; }
  Type result_type() const { return signature(fn).result; }
  Operation operation() const { return {fn, lambda}; }

  friend bool operator==(const Call&, const Call&) = default;
};

// Either an input declaration (no call) or a function call.
struct Statement {
  Type type = Type::IntArray;
  std::optional<Call> call;

  static Statement input(Type t) { return {t, std::nullopt}; }
  static Statement invoke(const Call& c) { return {c.result_type(), c}; }
  bool is_input() const { return !call.has_value(); }

  friend bool operator==(const Statement&, const Statement&) = default;
};

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public ProgramError {
 public:
  SyntaxError(int line, int column, std::string token, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  int line_;
  int column_;
  std::string token_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class TypeError : public ProgramError {
 public:
  TypeError(int statement, std::optional<Type> expected, std::optional<Type> actual,
            const std::string& what);
  int statement() const { return statement_; }
  std::optional<Type> expected() const { return expected_; }
  std::optional<Type> actual() const { return actual_; }

 private:
  int statement_;
  std::optional<Type> expected_;
  std::optional<Type> actual_;
};

// A well-typed straight-line program. Construction validates; a Program
// object is always well-typed.
class Program {
 public:
  explicit Program(std::vector<Statement> statements);

  static Program from_calls(std::span<const Type> inputs, std::span<const Call> calls);

  std::span<const Statement> statements() const { return statements_; }
  const Statement& operator[](std::size_t i) const { return statements_[i]; }
  std::size_t size() const { return statements_.size(); }
  int num_inputs() const { return num_inputs_; }
  int length() const { return static_cast<int>(statements_.size()) - num_inputs_; }
  std::vector<Type> input_types() const;
  Type output_type() const { return statements_.back().type; }

  friend bool operator==(const Program&, const Program&) = default;

 private:
  std::vector<Statement> statements_;
  int num_inputs_ = 0;
};

AttributeVector attribute_vector(const Program& program);

Program parse_program(std::string_view text);
std::string format_program(const Program& program);
std::string format_call(const Call& call);

// Enumerates every well-typed call over variables of the given types using
// operation `op`, in ascending argument order.
template <class Visitor>
void for_each_call(const Operation& op, std::span<const Type> vars, Visitor&& visit) {
  const FunctionSignature& sig = signature(op.fn);
  const auto n = static_cast<std::uint8_t>(vars.size());
  if (sig.arity == 1) {
    for (std::uint8_t a = 0; a < n; ++a) {
      if (vars[a] == sig.args[0]) visit(Call{op.fn, op.lambda, {a, 0}});
    }
    return;
  }
  for (std::uint8_t a = 0; a < n; ++a) {
    if (vars[a] != sig.args[0]) continue;
    for (std::uint8_t b = 0; b < n; ++b) {
      if (vars[b] == sig.args[1]) visit(Call{op.fn, op.lambda, {a, b}});
    }
  }
}

}  // namespace pbe
