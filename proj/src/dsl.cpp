// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/dsl.hpp"

#include <cctype>
#include <sstream>

namespace pbe {
namespace {

using enum Type;

constexpr std::array<FunctionSignature, kNumFunctions> kSignatures = {{
    {std::nullopt, 1, {IntArray, Int}, Int},                       // Head
    {std::nullopt, 1, {IntArray, Int}, Int},                       // Last
    {std::nullopt, 2, {Int, IntArray}, IntArray},                  // Take
    {std::nullopt, 2, {Int, IntArray}, IntArray},                  // Drop
    {std::nullopt, 2, {Int, IntArray}, Int},                       // Access
    {std::nullopt, 1, {IntArray, Int}, Int},                       // Minimum
    {std::nullopt, 1, {IntArray, Int}, Int},                       // Maximum
    {std::nullopt, 1, {IntArray, Int}, IntArray},                  // Reverse
    {std::nullopt, 1, {IntArray, Int}, IntArray},                  // Sort
    {std::nullopt, 1, {IntArray, Int}, Int},                       // Sum
    {LambdaClass::IntToInt, 1, {IntArray, Int}, IntArray},         // Map
    {LambdaClass::IntToBool, 1, {IntArray, Int}, IntArray},        // Filter
    {LambdaClass::IntToBool, 1, {IntArray, Int}, Int},             // Count
    {LambdaClass::IntIntToInt, 2, {IntArray, IntArray}, IntArray}, // ZipWith
    {LambdaClass::IntIntToInt, 1, {IntArray, Int}, IntArray},      // Scanl1
}};

constexpr std::array<std::string_view, kNumFunctions> kFunctionTokens = {
    "HEAD", "LAST", "TAKE", "DROP", "ACCESS", "MINIMUM", "MAXIMUM", "REVERSE",
    "SORT", "SUM", "MAP", "FILTER", "COUNT", "ZIPWITH", "SCANL1"};

constexpr std::array<std::string_view, kNumFunctions> kFunctionNames = {
    "Head", "Last", "Take", "Drop", "Access", "Minimum", "Maximum", "Reverse",
    "Sort", "Sum", "Map", "Filter", "Count", "ZipWith", "Scanl1"};

constexpr std::array<std::string_view, kNumLambdas> kLambdaTokens = {
    "(+1)", "(-1)", "(*2)", "(/2)", "(*(-1))", "(**2)", "(*3)", "(/3)", "(*4)", "(/4)",
    "(>0)", "(<0)", "(%2==0)", "(%2==1)",
    "(+)", "(-)", "(*)", "MIN", "MAX"};

constexpr std::array<std::string_view, kNumLambdas> kLambdaNames = {
    "(+1)", "(-1)", "(*2)", "(/2)", "(*(-1))", "(**2)", "(*3)", "(/3)", "(*4)", "(/4)",
    "(>0)", "(<0)", "(%2==0)", "(%2==1)",
    "(+)", "(-)", "(*)", "Min", "Max"};

constexpr std::array<CatalogEntry, kNumAttributes> kCatalog = {{
    {"Head", AttributeKind::FirstOrder, "[int] -> int"},
    {"Last", AttributeKind::FirstOrder, "[int] -> int"},
    {"Take", AttributeKind::FirstOrder, "int -> [int] -> [int]"},
    {"Drop", AttributeKind::FirstOrder, "int -> [int] -> [int]"},
    {"Access", AttributeKind::FirstOrder, "int -> [int] -> int"},
    {"Minimum", AttributeKind::FirstOrder, "[int] -> int"},
    {"Maximum", AttributeKind::FirstOrder, "[int] -> int"},
    {"Reverse", AttributeKind::FirstOrder, "[int] -> [int]"},
    {"Sort", AttributeKind::FirstOrder, "[int] -> [int]"},
    {"Sum", AttributeKind::FirstOrder, "[int] -> int"},
    {"Map", AttributeKind::HigherOrder, "(int -> int) -> [int] -> [int]"},
    {"Filter", AttributeKind::HigherOrder, "(int -> bool) -> [int] -> [int]"},
    {"Count", AttributeKind::HigherOrder, "(int -> bool) -> [int] -> int"},
    {"ZipWith", AttributeKind::HigherOrder, "(int -> int -> int) -> [int] -> [int] -> [int]"},
    {"Scanl1", AttributeKind::HigherOrder, "(int -> int -> int) -> [int] -> [int]"},
    {"(+1)", AttributeKind::Lambda, "int -> int"},
    {"(-1)", AttributeKind::Lambda, "int -> int"},
    {"(*2)", AttributeKind::Lambda, "int -> int"},
    {"(/2)", AttributeKind::Lambda, "int -> int"},
    {"(*(-1))", AttributeKind::Lambda, "int -> int"},
    {"(**2)", AttributeKind::Lambda, "int -> int"},
    {"(*3)", AttributeKind::Lambda, "int -> int"},
    {"(/3)", AttributeKind::Lambda, "int -> int"},
    {"(*4)", AttributeKind::Lambda, "int -> int"},
    {"(/4)", AttributeKind::Lambda, "int -> int"},
    {"(>0)", AttributeKind::Lambda, "int -> bool"},
    {"(<0)", AttributeKind::Lambda, "int -> bool"},
    {"(%2==0)", AttributeKind::Lambda, "int -> bool"},
    {"(%2==1)", AttributeKind::Lambda, "int -> bool"},
    {"(+)", AttributeKind::Lambda, "int -> int -> int"},
    {"(-)", AttributeKind::Lambda, "int -> int -> int"},
    {"(*)", AttributeKind::Lambda, "int -> int -> int"},
    {"Min", AttributeKind::Lambda, "int -> int -> int"},
    {"Max", AttributeKind::Lambda, "int -> int -> int"},
}};

constexpr std::array<Operation, kNumOperations> make_operations() {
  std::array<Operation, kNumOperations> ops{};
  int n = 0;
  for (int f = 0; f < kNumFunctions; ++f) {
    const auto fn = static_cast<Function>(f);
    const auto& sig = kSignatures[f];
    if (!sig.lambda) {
      ops[n++] = {fn, std::nullopt};
      continue;
    }
    for (int l = 0; l < kNumLambdas; ++l) {
      const auto lam = static_cast<Lambda>(l);
      LambdaClass cls = l < 10 ? LambdaClass::IntToInt
                        : l < 14 ? LambdaClass::IntToBool
                                 : LambdaClass::IntIntToInt;
      if (cls == *sig.lambda) ops[n++] = {fn, lam};
    }
  }
  return ops;
}

constexpr std::array<Operation, kNumOperations> kOperations = make_operations();

std::string describe(std::optional<Type> t) { return t ? std::string(type_name(*t)) : "nothing"; }

}  // namespace

const FunctionSignature& signature(Function f) { return kSignatures[static_cast<int>(f)]; }

LambdaClass lambda_class(Lambda l) {
  const int i = static_cast<int>(l);
  if (i < 10) return LambdaClass::IntToInt;
  if (i < 14) return LambdaClass::IntToBool;
  return LambdaClass::IntIntToInt;
}

std::string_view token(Function f) { return kFunctionTokens[static_cast<int>(f)]; }
std::string_view token(Lambda l) { return kLambdaTokens[static_cast<int>(l)]; }
std::string_view display_name(Function f) { return kFunctionNames[static_cast<int>(f)]; }
std::string_view display_name(Lambda l) { return kLambdaNames[static_cast<int>(l)]; }
std::string_view type_name(Type t) { return t == Type::Int ? "int" : "[int]"; }

std::span<const CatalogEntry, kNumAttributes> catalog() { return kCatalog; }

std::string_view attribute_name(int index) { return kCatalog.at(index).name; }

std::span<const Operation, kNumOperations> operations() { return kOperations; }

SyntaxError::SyntaxError(int line, int column, std::string token, const std::string& what)
    : ProgramError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                   ": " + what + " near '" + token + "'"),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

TypeError::TypeError(int statement, std::optional<Type> expected, std::optional<Type> actual,
                     const std::string& what)
    : ProgramError("statement " + std::to_string(statement) + ": " + what + " (expected " +
                   describe(expected) + ", got " + describe(actual) + ")"),
      statement_(statement),
      expected_(expected),
      actual_(actual) {}

Program::Program(std::vector<Statement> statements) : statements_(std::move(statements)) {
  if (statements_.size() > static_cast<std::size_t>(kMaxStatements)) {
    throw ProgramError("program exceeds " + std::to_string(kMaxStatements) + " statements");
  }
  bool seen_call = false;
  for (std::size_t i = 0; i < statements_.size(); ++i) {
    const int idx = static_cast<int>(i);
    const Statement& s = statements_[i];
    if (s.is_input()) {
      if (seen_call) throw ProgramError("statement " + std::to_string(i) + ": input after call");
      if (++num_inputs_ > kMaxInputs) {
        throw ProgramError("more than " + std::to_string(kMaxInputs) + " inputs");
      }
      continue;
    }
    seen_call = true;
    const Call& c = *s.call;
    const FunctionSignature& sig = signature(c.fn);
    if (sig.lambda.has_value() != c.lambda.has_value()) {
      throw TypeError(idx, std::nullopt, std::nullopt,
                      c.lambda ? std::string(token(c.fn)) + " takes no lambda"
                               : std::string(token(c.fn)) + " requires a lambda");
    }
    if (c.lambda && lambda_class(*c.lambda) != *sig.lambda) {
      throw TypeError(idx, std::nullopt, std::nullopt,
                      "lambda " + std::string(token(*c.lambda)) + " does not fit " +
                          std::string(token(c.fn)));
    }
    for (int a = 0; a < sig.arity; ++a) {
      const int var = c.args[a];
      if (var >= idx) {
        throw TypeError(idx, sig.args[a], std::nullopt,
                        "argument " + std::to_string(a) + " refers to a later variable");
      }
      if (statements_[var].type != sig.args[a]) {
        throw TypeError(idx, sig.args[a], statements_[var].type,
                        "argument " + std::to_string(a) + " of " + std::string(token(c.fn)));
      }
    }
    if (s.type != sig.result) {
      throw TypeError(idx, sig.result, s.type, "result type of " + std::string(token(c.fn)));
    }
  }
  if (num_inputs_ == 0) throw ProgramError("program has no input declaration");
  if (!seen_call) throw ProgramError("program has no function call");
}

Program Program::from_calls(std::span<const Type> inputs, std::span<const Call> calls) {
  std::vector<Statement> stmts;
  stmts.reserve(inputs.size() + calls.size());
  for (Type t : inputs) stmts.push_back(Statement::input(t));
  for (const Call& c : calls) stmts.push_back(Statement::invoke(c));
  return Program(std::move(stmts));
}

std::vector<Type> Program::input_types() const {
  std::vector<Type> types;
  for (int i = 0; i < num_inputs_; ++i) types.push_back(statements_[i].type);
  return types;
}

AttributeVector attribute_vector(const Program& program) {
  AttributeVector bits;
  for (const Statement& s : program.statements()) {
    if (!s.call) continue;
    bits.set(attribute_index(s.call->fn));
    if (s.call->lambda) bits.set(attribute_index(*s.call->lambda));
  }
  return bits;
}

namespace {

struct Token {
  std::string text;
  int column;
};

std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

bool is_var_token(const std::string& t) { return t.size() == 1 && t[0] >= 'a' && t[0] <= 'z'; }

std::optional<Function> lookup_function(std::string_view t) {
  for (int i = 0; i < kNumFunctions; ++i) {
    if (kFunctionTokens[i] == t) return static_cast<Function>(i);
  }
  return std::nullopt;
}

std::optional<Lambda> lookup_lambda(std::string_view t) {
  for (int i = 0; i < kNumLambdas; ++i) {
    if (kLambdaTokens[i] == t) return static_cast<Lambda>(i);
  }
  return std::nullopt;
}

}  // namespace

Program parse_program(std::string_view text) {
  std::vector<Statement> stmts;
  std::array<int, 26> var_index;
  var_index.fill(-1);

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::vector<Token> toks = split_tokens(line);
    if (toks.empty()) continue;
    if (!is_var_token(toks[0].text)) {
      throw SyntaxError(line_no, toks[0].column, toks[0].text, "expected a variable name");
    }
    const int target = toks[0].text[0] - 'a';
    if (var_index[target] >= 0) {
      throw SyntaxError(line_no, toks[0].column, toks[0].text, "variable redefined");
    }
    if (toks.size() < 3) {
      const Token& last = toks.back();
      throw SyntaxError(line_no, last.column, last.text, "incomplete statement");
    }
    if (toks[1].text != "<-") throw SyntaxError(line_no, toks[1].column, toks[1].text, "expected '<-'");

    const Token& head = toks[2];
    if (head.text == "int" || head.text == "[int]") {
      if (toks.size() != 3) {
        throw SyntaxError(line_no, toks[3].column, toks[3].text, "unexpected token");
      }
      var_index[target] = static_cast<int>(stmts.size());
      stmts.push_back(Statement::input(head.text == "int" ? Type::Int : Type::IntArray));
      continue;
    }

    const auto fn = lookup_function(head.text);
    if (!fn) throw UnknownIdentifier(line_no, head.column, head.text, "unknown function");
    Call call{*fn, std::nullopt, {0, 0}};
    std::size_t t = 3;
    if (is_higher_order(*fn)) {
      if (t >= toks.size()) throw SyntaxError(line_no, head.column, head.text, "missing lambda");
      const auto lam = lookup_lambda(toks[t].text);
      if (!lam) throw UnknownIdentifier(line_no, toks[t].column, toks[t].text, "unknown lambda");
      call.lambda = lam;
      ++t;
    }
    const int arity = signature(*fn).arity;
    if (toks.size() - t != static_cast<std::size_t>(arity)) {
      const Token& bad = toks.size() > t + arity ? toks[t + arity] : toks.back();
      throw SyntaxError(line_no, bad.column, bad.text,
                        std::string(token(*fn)) + " expects " + std::to_string(arity) +
                            " argument(s)");
    }
    for (int a = 0; a < arity; ++a, ++t) {
      if (!is_var_token(toks[t].text)) {
        if (lookup_lambda(toks[t].text)) {
          throw SyntaxError(line_no, toks[t].column, toks[t].text, "unexpected lambda");
        }
        throw SyntaxError(line_no, toks[t].column, toks[t].text, "expected a variable");
      }
      const int v = var_index[toks[t].text[0] - 'a'];
      if (v < 0) throw UnknownIdentifier(line_no, toks[t].column, toks[t].text, "undefined variable");
      call.args[a] = static_cast<std::uint8_t>(v);
    }
    var_index[target] = static_cast<int>(stmts.size());
    // Record the declared call; Program validates the argument types.
    Statement s = Statement::invoke(call);
    stmts.push_back(s);
  }
  return Program(std::move(stmts));
}

std::string format_call(const Call& call) {
  std::string out(token(call.fn));
  if (call.lambda) {
    out += ' ';
    out += token(*call.lambda);
  }
  for (int a = 0; a < call.arity(); ++a) {
    out += ' ';
    out += static_cast<char>('a' + call.args[a]);
  }
  return out;
}

std::string format_program(const Program& program) {
  std::ostringstream os;
  for (std::size_t i = 0; i < program.size(); ++i) {
    if (i) os << '\n';
    const Statement& s = program[i];
    os << static_cast<char>('a' + i) << " <- ";
    if (s.is_input()) {
      os << type_name(s.type);
    } else {
      os << format_call(*s.call);
    }
  }
  return os.str();
}

}  // namespace pbe
