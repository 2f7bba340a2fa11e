// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/datagen.hpp"

#include "pbesynth/search.hpp"

#include "pbesynth/interpreter.hpp"
#include "pbesynth/random.hpp"

namespace pbe {
namespace {

// Depth-first walk over call sequences of exactly `target` calls appended to
// `types`. `on_program` receives the call sequence.
template <class OnProgram>
void walk(std::vector<Type>& types, std::vector<Call>& calls, int target, OnProgram& on_program) {
  for (const Operation& op : operations()) {
    for_each_call(op, std::span<const Type>(types.data(), types.size()), [&](const Call& c) {
      calls.push_back(c);
      if (static_cast<int>(calls.size()) == target) {
        on_program(calls);
      } else {
        types.push_back(c.result_type());
        walk(types, calls, target, on_program);
        types.pop_back();
      }
      calls.pop_back();
    });
  }
}

bool dead_variable(int num_inputs, std::span<const Call> calls) {
  const int n = num_inputs + static_cast<int>(calls.size());
  std::uint32_t live = 1u << (n - 1);
  for (int i = n - 1; i >= num_inputs; --i) {
    if (!(live & (1u << i))) return true;
    const Call& c = calls[i - num_inputs];
    live |= 1u << c.args[0];
    if (c.arity() == 2) live |= 1u << c.args[1];
  }
  return live != (n == 32 ? ~0u : (1u << n) - 1);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

}  // namespace

std::vector<InputSignature> default_signatures() {
  return {{Type::IntArray}, {Type::IntArray, Type::IntArray}, {Type::Int, Type::IntArray}};
}

std::string signature_string(std::span<const Type> sig) {
  std::string s;
  for (Type t : sig) {
    if (!s.empty()) s += ',';
    s += type_name(t);
  }
  return s;
}

void enumerate_programs(int max_length, std::span<const InputSignature> signatures,
                        const std::function<void(const Program&)>& sink) {
  for (int len = 1; len <= max_length; ++len) {
    for (const InputSignature& sig : signatures) {
      std::vector<Type> types(sig);
      types.reserve(sig.size() + len + 1);
      std::vector<Call> calls;
      auto emit = [&](const std::vector<Call>& cs) { sink(Program::from_calls(sig, cs)); };
      walk(types, calls, len, emit);
    }
  }
}

std::vector<std::uint64_t> count_programs(int max_length, std::span<const InputSignature> signatures) {
  std::vector<std::uint64_t> counts(max_length, 0);
  for (int len = 1; len <= max_length; ++len) {
    for (const InputSignature& sig : signatures) {
      std::vector<Type> types(sig);
      types.reserve(sig.size() + len + 1);
      std::vector<Call> calls;
      std::uint64_t n = 0;
      auto tally = [&](const std::vector<Call>&) { ++n; };
      walk(types, calls, len, tally);
      counts[len - 1] += n;
    }
  }
  return counts;
}

bool has_dead_variable(const Program& program) {
  std::vector<Call> calls;
  for (const Statement& s : program.statements()) {
    if (s.call) calls.push_back(*s.call);
  }
  return dead_variable(program.num_inputs(), calls);
}

ProbeBattery::ProbeBattery(std::uint64_t seed, int probes) : seed_(seed), probes_(probes) {}

const std::vector<std::vector<Value>>& ProbeBattery::inputs(std::span<const Type> sig) {
  const std::string key = signature_string(sig);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  std::uint64_t stream = 0;
  for (char ch : key) stream = hash_combine(stream, static_cast<unsigned char>(ch));
  Rng rng(derive_seed(seed_, stream));
  std::vector<std::vector<Value>> probes(probes_);
  for (int p = 0; p < probes_; ++p) {
    // Half the probes use the full working range, half small magnitudes
    // where repeated elements and zeros are common.
    const std::int64_t mag_lo = p < probes_ / 2 ? kMinInt : -8;
    const std::int64_t mag_hi = p < probes_ / 2 ? kMaxInt : 8;
    for (Type t : sig) {
      if (t == Type::Int) {
        probes[p].push_back(Value::scalar(uniform_int(rng, 0, kMaxLength)));
      } else {
        std::vector<std::int64_t> xs(uniform_int(rng, 1, kMaxLength));
        for (auto& x : xs) x = uniform_int(rng, mag_lo, mag_hi);
        probes[p].push_back(Value::array(std::move(xs)));
      }
    }
  }
  return cache_.emplace(key, std::move(probes)).first->second;
}

Fingerprint ProbeBattery::hash_outputs(std::span<const Type> sig, std::span<const Value> outputs) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (Type t : sig) h = hash_combine(h, static_cast<std::uint64_t>(t) + 1);
  h = hash_combine(h, 0xffff);
  for (const Value& v : outputs) {
    h = hash_combine(h, static_cast<std::uint64_t>(v.kind()));
    if (v.is_int()) {
      h = hash_combine(h, static_cast<std::uint64_t>(v.as_int()));
    } else if (v.is_array()) {
      h = hash_combine(h, v.elements().size());
      for (auto x : v.elements()) h = hash_combine(h, static_cast<std::uint64_t>(x));
    }
  }
  return h;
}

Fingerprint ProbeBattery::fingerprint(const Program& program) {
  const std::vector<Type> sig = program.input_types();
  const auto& probes = inputs(sig);
  std::vector<Value> outputs;
  outputs.reserve(probes.size());
  for (const auto& in : probes) outputs.push_back(run_program(program, in));
  return hash_outputs(sig, outputs);
}

std::vector<PrunedProgram> pruned_programs(int max_length, std::span<const InputSignature> signatures,
                                           ProbeBattery& probes) {
  constexpr std::size_t kIdentity = static_cast<std::size_t>(-1);
  std::unordered_map<Fingerprint, std::size_t> table;  // fingerprint -> index in kept
  for (const InputSignature& sig : signatures) {
    const auto& in = probes.inputs(sig);
    for (std::size_t i = 0; i < sig.size(); ++i) {
      std::vector<Value> outputs;
      for (const auto& p : in) outputs.push_back(p[i]);
      table.emplace(ProbeBattery::hash_outputs(sig, outputs), kIdentity);
    }
  }

  std::vector<PrunedProgram> kept;
  for (int len = 1; len <= max_length; ++len) {
    for (const InputSignature& sig : signatures) {
      PrefixCache cache(probes.inputs(sig), static_cast<int>(sig.size()) + len);
      std::vector<Call> calls;
      const int n_inputs = static_cast<int>(sig.size());

      auto visit = [&](auto& self) -> void {
        const std::vector<Type> types(cache.types().begin(), cache.types().end());
        for (const Operation& op : operations()) {
          for_each_call(op, types, [&](const Call& c) {
            calls.push_back(c);
            if (static_cast<int>(calls.size()) == len) {
              if (!dead_variable(n_inputs, calls)) {
                const auto outputs = cache.extend(cache.key(), c);
                const Fingerprint fp = ProbeBattery::hash_outputs(sig, outputs);
                const auto [it, fresh] = table.emplace(fp, kept.size());
                if (fresh) {
                  kept.push_back({Program::from_calls(sig, calls), fp});
                } else if (it->second != kIdentity && kept[it->second].program.length() == len) {
                  Program candidate = Program::from_calls(sig, calls);
                  if (attribute_vector(candidate).count() <
                      attribute_vector(kept[it->second].program).count()) {
                    kept[it->second].program = std::move(candidate);
                  }
                }
              }
            } else {
              cache.extend(cache.key(), c);
              cache.push(c);
              self(self);
              cache.pop();
            }
            calls.pop_back();
          });
        }
      };
      visit(visit);
    }
  }
  return kept;
}

std::optional<ExampleSet> sample_examples(const Program& program,
                                          std::span<const ValueRange> input_ranges, int count,
                                          std::uint64_t seed) {
  if (input_ranges.size() != static_cast<std::size_t>(program.num_inputs())) {
    throw std::invalid_argument("sample_examples: one range per input required");
  }
  Rng rng(seed);
  ExampleSet set;
  for (int m = 0; m < count; ++m) {
    bool accepted = false;
    for (int attempt = 0; attempt < kSampleRetries && !accepted; ++attempt) {
      std::vector<Value> inputs;
      for (int i = 0; i < program.num_inputs(); ++i) {
        const ValueRange r = input_ranges[i];
        if (program[i].type == Type::Int) {
          inputs.push_back(Value::scalar(uniform_int(rng, r.lo, r.hi)));
        } else {
          std::vector<std::int64_t> xs(uniform_int(rng, 1, kMaxLength));
          for (auto& x : xs) x = uniform_int(rng, r.lo, r.hi);
          inputs.push_back(Value::array(std::move(xs)));
        }
      }
      std::vector<Value> env = run_environment(program, inputs);
      if (env.back().is_null()) continue;
      bool in_range = true;
      for (const Value& v : env) in_range = in_range && within_working_range(v);
      if (!in_range) continue;
      set.examples.push_back({std::move(inputs), std::move(env.back())});
      accepted = true;
    }
    if (!accepted) return std::nullopt;
  }
  return set;
}

DatasetRecord make_record(Program program, ExampleSet examples) {
  AttributeVector attrs = attribute_vector(program);
  return {std::move(program), attrs, std::move(examples)};
}

AttributeScores attribute_prior(std::span<const DatasetRecord> records) {
  AttributeScores prior{};
  if (records.empty()) return prior;
  std::array<std::uint64_t, kNumAttributes> counts{};
  for (const DatasetRecord& r : records) {
    for (int a = 0; a < kNumAttributes; ++a) counts[a] += r.attributes[a] ? 1 : 0;
  }
  for (int a = 0; a < kNumAttributes; ++a) {
    prior[a] = static_cast<double>(counts[a]) / static_cast<double>(records.size());
  }
  return prior;
}

std::unordered_set<Fingerprint> fingerprints_of(std::span<const DatasetRecord> records,
                                                ProbeBattery& probes) {
  std::unordered_set<Fingerprint> out;
  for (const DatasetRecord& r : records) out.insert(probes.fingerprint(r.program));
  return out;
}

bool solved_by_shorter(const ExampleSet& examples, int length) {
  for (std::size_t i = 0; i < examples[0].inputs.size(); ++i) {
    bool same = true;
    for (const Example& e : examples.examples) same = same && e.inputs[i] == e.output;
    if (same) return true;
  }
  if (length <= 1) return false;
  const auto ops = operations();
  return dfs_operations(examples, length - 1, {ops.begin(), ops.end()}, {}).status ==
         SearchStatus::Solved;
}

std::optional<ExampleSet> sample_discriminative(const Program& program, int count,
                                                std::uint64_t seed, bool discriminative) {
  const auto ranges = propagate_ranges(program);
  if (!ranges) return std::nullopt;
  const int attempts = discriminative ? kDiscriminativeAttempts : 1;
  for (int a = 0; a < attempts; ++a) {
    auto examples = sample_examples(program, *ranges, count, a == 0 ? seed : derive_seed(seed, a));
    if (!examples) return std::nullopt;
    if (!discriminative || !solved_by_shorter(*examples, program.length())) return examples;
  }
  return std::nullopt;
}

BuiltDataset build_dataset(const DatasetParams& params, const std::unordered_set<Fingerprint>* exclude) {
  if (params.length < 1) throw std::invalid_argument("program length must be at least 1");
  if ((params.count < 0 && params.count != kAllPrograms) || params.test_count < 0) {
    throw std::invalid_argument("negative record count");
  }
  ProbeBattery probes(params.probe_seed);
  std::vector<PrunedProgram> kept = pruned_programs(params.length, params.signatures, probes);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i].program.length() != params.length) continue;
    if (exclude && exclude->count(kept[i].fingerprint)) continue;
    order.push_back(i);
  }
  Rng rng(derive_seed(params.seed, 0));
  shuffle_in_place(order, rng);

  // Test records are taken first so the held-out split does not depend on
  // the requested training size.
  std::vector<DatasetRecord> test;
  std::vector<DatasetRecord> train;
  const bool all = params.count == kAllPrograms;
  for (std::size_t idx : order) {
    const bool test_full = test.size() == static_cast<std::size_t>(params.test_count);
    if (test_full && !all && train.size() == static_cast<std::size_t>(params.count)) break;
    const Program& p = kept[idx].program;
    auto examples = sample_discriminative(p, params.examples, derive_seed(params.seed, 1 + idx),
                                          params.discriminative);
    if (!examples) continue;
    (test_full ? train : test).push_back(make_record(p, std::move(*examples)));
  }
  if (test.size() < static_cast<std::size_t>(params.test_count) ||
      (!all && train.size() < static_cast<std::size_t>(params.count))) {
    throw InsufficientPrograms("only " + std::to_string(test.size() + train.size()) +
                               " usable distinct programs of length " + std::to_string(params.length) +
                               ", " + std::to_string(params.count + params.test_count) + " requested");
  }

  BuiltDataset out;
  DatasetHeader header;
  header.length = params.length;
  header.examples = params.examples;
  header.seed = params.seed;
  header.probe_seed = params.probe_seed;

  out.train.header = header;
  out.train.header.split = "train";
  out.train.header.count = static_cast<int>(train.size());
  out.train.records = std::move(train);
  out.test.header = header;
  out.test.header.split = "test";
  out.test.header.count = static_cast<int>(test.size());
  out.test.records = std::move(test);
  out.prior = attribute_prior(out.train.records);
  return out;
}

Dataset resample_dataset(const Dataset& base, std::uint64_t seed, bool discriminative) {
  Dataset out;
  out.header = base.header;
  out.header.seed = seed;
  std::vector<std::size_t> order(base.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0));
  shuffle_in_place(order, rng);
  for (std::size_t idx : order) {
    const Program& p = base.records[idx].program;
    auto examples = sample_discriminative(p, base.header.examples, derive_seed(seed, 1 + idx), discriminative);
    if (!examples) continue;
    out.records.push_back(make_record(p, std::move(*examples)));
  }
  out.header.count = static_cast<int>(out.records.size());
  return out;
}

}  // namespace pbe
