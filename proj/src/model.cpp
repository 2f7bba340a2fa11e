// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "pbesynth/random.hpp"

namespace pbe {
namespace {

constexpr char kMagic[8] = {'P', 'B', 'S', 'N', 'N', 'E', 'T', '1'};

int slot_offset(const ModelConfig& c, int slot) { return slot * (3 + kMaxLength * c.embedding); }
int output_offset(const ModelConfig& c) { return slot_offset(c, kNumSlots); }

// Position of token t's embedding inside the input vector.
int token_offset(const ModelConfig& c, int t) {
  const int slot = t / kMaxLength;
  const int pos = t % kMaxLength;
  if (slot < kNumSlots) return slot_offset(c, slot) + 3 + pos * c.embedding;
  return output_offset(c) + 2 + pos * c.embedding;
}

void fill_tokens(const Value& v, std::uint16_t* tokens) {
  std::fill(tokens, tokens + kMaxLength, static_cast<std::uint16_t>(kNullToken));
  if (v.is_int()) {
    tokens[0] = static_cast<std::uint16_t>(token_of(v.as_int()));
  } else if (v.is_array()) {
    auto xs = v.elements();
    const std::size_t n = std::min<std::size_t>(xs.size(), kMaxLength);
    for (std::size_t i = 0; i < n; ++i) tokens[i] = static_cast<std::uint16_t>(token_of(xs[i]));
  }
}

bool encoded_less(const EncodedExample& a, const EncodedExample& b) {
  if (a.types != b.types) return a.types < b.types;
  return a.tokens < b.tokens;
}

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

// Activations of one batch: layer 0 is the input matrix, one column per example.
struct Forward {
  std::vector<int> set_of_column;
  std::vector<int> set_size;
  std::vector<Eigen::MatrixXd> activations;
  Eigen::MatrixXd pooled;  // K x B
  Eigen::MatrixXd logits;  // C x B
};

void fill_input(const ModelParams& params, const EncodedExample& ex, double* col) {
  const ModelConfig& c = params.config();
  const auto emb = params.embedding();
  std::fill(col, col + c.input_width(), 0.0);
  for (int s = 0; s < kNumSlots; ++s) col[slot_offset(c, s) + ex.types[s]] = 1.0;
  col[output_offset(c) + ex.types[kNumSlots]] = 1.0;
  for (int t = 0; t < kTokensPerExample; ++t) {
    std::memcpy(col + token_offset(c, t), emb.col(ex.tokens[t]).data(), sizeof(double) * c.embedding);
  }
}

Forward forward(const ModelParams& params, std::span<const std::span<const EncodedExample>> sets) {
  const ModelConfig& c = params.config();
  Forward f;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    if (sets[j].empty()) throw std::invalid_argument("cannot encode an empty example set");
    f.set_size.push_back(static_cast<int>(sets[j].size()));
    for (std::size_t k = 0; k < sets[j].size(); ++k) f.set_of_column.push_back(static_cast<int>(j));
  }
  const int n = static_cast<int>(f.set_of_column.size());
  Eigen::MatrixXd x(c.input_width(), n);
  int col = 0;
  for (const auto& set : sets) {
    for (const EncodedExample& ex : set) fill_input(params, ex, x.col(col++).data());
  }
  f.activations.push_back(std::move(x));
  for (int l = 0; l < c.layers; ++l) {
    Eigen::MatrixXd z = params.weight(l) * f.activations.back();
    z.colwise() += params.bias(l);
    f.activations.push_back(sigmoid(z.array()).matrix());
  }
  const Eigen::MatrixXd& top = f.activations.back();
  f.pooled = Eigen::MatrixXd::Zero(c.hidden, static_cast<Eigen::Index>(sets.size()));
  for (int k = 0; k < n; ++k) f.pooled.col(f.set_of_column[k]) += top.col(k);
  for (std::size_t j = 0; j < sets.size(); ++j) f.pooled.col(j) /= f.set_size[j];
  f.logits = params.decoder_weight() * f.pooled;
  f.logits.colwise() += params.decoder_bias();
  return f;
}

std::vector<std::span<const EncodedExample>> example_spans(std::span<const EncodedSet* const> batch) {
  std::vector<std::span<const EncodedExample>> out;
  out.reserve(batch.size());
  for (const EncodedSet* s : batch) out.emplace_back(s->examples);
  return out;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double logits_loss(const Forward& f, std::span<const EncodedSet* const> batch) {
  double total = 0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    for (int a = 0; a < kNumAttributes; ++a) {
      const double z = f.logits(a, static_cast<Eigen::Index>(j));
      total += softplus(z) - batch[j]->target[a] * z;
    }
  }
  return total / static_cast<double>(batch.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(std::istream& in, int bytes) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes)) throw CorruptFile("weights file is truncated");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config) : config_(config) {
  if (config.embedding < 1 || config.hidden < 1 || config.layers < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  data_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(decoder_offset() + kNumAttributes * (config.hidden + 1)));
}

std::size_t ModelParams::offset_of_layer(int layer) const {
  std::size_t off = static_cast<std::size_t>(kEmbeddingRows) * config_.embedding;
  std::size_t fan_in = config_.input_width();
  for (int l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(config_.hidden) * (fan_in + 1);
    fan_in = config_.hidden;
  }
  return off;
}

std::size_t ModelParams::decoder_offset() const { return offset_of_layer(config_.layers); }

Eigen::Map<Eigen::MatrixXd> ModelParams::embedding() {
  return {data_.data(), config_.embedding, kEmbeddingRows};
}
Eigen::Map<const Eigen::MatrixXd> ModelParams::embedding() const {
  return {data_.data(), config_.embedding, kEmbeddingRows};
}
Eigen::Map<Eigen::MatrixXd> ModelParams::weight(int l) {
  return {data_.data() + offset_of_layer(l), config_.hidden, l == 0 ? config_.input_width() : config_.hidden};
}
Eigen::Map<const Eigen::MatrixXd> ModelParams::weight(int l) const {
  return {data_.data() + offset_of_layer(l), config_.hidden, l == 0 ? config_.input_width() : config_.hidden};
}
Eigen::Map<Eigen::VectorXd> ModelParams::bias(int l) {
  const int fan_in = l == 0 ? config_.input_width() : config_.hidden;
  return {data_.data() + offset_of_layer(l) + static_cast<std::size_t>(config_.hidden) * fan_in, config_.hidden};
}
Eigen::Map<const Eigen::VectorXd> ModelParams::bias(int l) const {
  const int fan_in = l == 0 ? config_.input_width() : config_.hidden;
  return {data_.data() + offset_of_layer(l) + static_cast<std::size_t>(config_.hidden) * fan_in, config_.hidden};
}
Eigen::Map<Eigen::MatrixXd> ModelParams::decoder_weight() {
  return {data_.data() + decoder_offset(), kNumAttributes, config_.hidden};
}
Eigen::Map<const Eigen::MatrixXd> ModelParams::decoder_weight() const {
  return {data_.data() + decoder_offset(), kNumAttributes, config_.hidden};
}
Eigen::Map<Eigen::VectorXd> ModelParams::decoder_bias() {
  return {data_.data() + decoder_offset() + static_cast<std::size_t>(kNumAttributes) * config_.hidden, kNumAttributes};
}
Eigen::Map<const Eigen::VectorXd> ModelParams::decoder_bias() const {
  return {data_.data() + decoder_offset() + static_cast<std::size_t>(kNumAttributes) * config_.hidden, kNumAttributes};
}

std::vector<ModelParams::Group> ModelParams::groups() const {
  std::vector<Group> g;
  g.push_back({"embedding", 0, static_cast<std::size_t>(kEmbeddingRows) * config_.embedding});
  for (int l = 0; l < config_.layers; ++l) {
    const std::size_t fan_in = l == 0 ? config_.input_width() : config_.hidden;
    const std::size_t w = static_cast<std::size_t>(config_.hidden) * fan_in;
    g.push_back({"layer" + std::to_string(l) + ".weight", offset_of_layer(l), w});
    g.push_back({"layer" + std::to_string(l) + ".bias", offset_of_layer(l) + w, static_cast<std::size_t>(config_.hidden)});
  }
  const std::size_t dw = static_cast<std::size_t>(kNumAttributes) * config_.hidden;
  g.push_back({"decoder.weight", decoder_offset(), dw});
  g.push_back({"decoder.bias", decoder_offset() + dw, static_cast<std::size_t>(kNumAttributes)});
  return g;
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p(config);
  Rng rng(seed);
  auto fill = [&](double* first, std::size_t n, double bound) {
    for (std::size_t i = 0; i < n; ++i) first[i] = (2.0 * uniform_unit(rng) - 1.0) * bound;
  };
  auto emb = p.embedding();
  fill(emb.data(), static_cast<std::size_t>(emb.size()), 1.0);
  for (int l = 0; l < config.layers; ++l) {
    auto w = p.weight(l);
    fill(w.data(), static_cast<std::size_t>(w.size()), 1.0 / std::sqrt(static_cast<double>(w.cols())));
  }
  auto d = p.decoder_weight();
  fill(d.data(), static_cast<std::size_t>(d.size()), 1.0 / std::sqrt(static_cast<double>(d.cols())));
  return p;
}

int token_of(std::int64_t v) {
  return static_cast<int>(std::clamp<std::int64_t>(v, kMinInt, kMaxInt) - kMinInt);
}

EncodedExample encode_example(const Example& example) {
  if (example.inputs.size() > static_cast<std::size_t>(kNumSlots)) {
    throw std::invalid_argument("too many inputs to encode");
  }
  EncodedExample out;
  for (int s = 0; s < kNumSlots; ++s) {
    std::uint16_t* tokens = out.tokens.data() + s * kMaxLength;
    if (s < static_cast<int>(example.inputs.size())) {
      out.types[s] = example.inputs[s].is_int() ? 0 : 1;
      fill_tokens(example.inputs[s], tokens);
    } else {
      out.types[s] = 2;
      std::fill(tokens, tokens + kMaxLength, static_cast<std::uint16_t>(kNullToken));
    }
  }
  out.types[kNumSlots] = example.output.is_int() ? 0 : 1;
  fill_tokens(example.output, out.tokens.data() + kNumSlots * kMaxLength);
  return out;
}

std::vector<EncodedExample> encode_set(const ExampleSet& set) {
  std::vector<EncodedExample> out;
  out.reserve(set.size());
  for (const Example& e : set.examples) out.push_back(encode_example(e));
  std::sort(out.begin(), out.end(), encoded_less);
  return out;
}

Eigen::VectorXd input_vector(const EncodedExample& example, const ModelParams& params) {
  Eigen::VectorXd v(params.config().input_width());
  fill_input(params, example, v.data());
  return v;
}

EncodedSet encode_record(const DatasetRecord& record) {
  EncodedSet s;
  s.examples = encode_set(record.examples);
  for (int a = 0; a < kNumAttributes; ++a) s.target[a] = record.attributes[a] ? 1.0 : 0.0;
  return s;
}

std::vector<EncodedSet> encode_records(std::span<const DatasetRecord> records) {
  std::vector<EncodedSet> out;
  out.reserve(records.size());
  for (const DatasetRecord& r : records) out.push_back(encode_record(r));
  return out;
}

AttributeScores predict_encoded(const ModelParams& params, std::span<const EncodedExample> examples) {
  const std::span<const EncodedExample> sets[1] = {examples};
  const Forward f = forward(params, sets);
  AttributeScores p;
  for (int a = 0; a < kNumAttributes; ++a) {
    const double s = 1.0 / (1.0 + std::exp(-f.logits(a, 0)));
    p[a] = std::clamp(s, kProbabilityClamp, 1.0 - kProbabilityClamp);
  }
  return p;
}

AttributeScores predict(const ModelParams& params, const ExampleSet& set) {
  return predict_encoded(params, encode_set(set));
}

double loss(const AttributeScores& prediction, std::span<const double, kNumAttributes> target) {
  double total = 0;
  for (int a = 0; a < kNumAttributes; ++a) {
    const double p = std::clamp(prediction[a], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= target[a] * std::log(p) + (1.0 - target[a]) * std::log(1.0 - p);
  }
  return total;
}

double batch_loss(const ModelParams& params, std::span<const EncodedSet* const> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto spans = example_spans(batch);
  return logits_loss(forward(params, spans), batch);
}

double loss_and_gradient(const ModelParams& params, std::span<const EncodedSet* const> batch,
                         Eigen::VectorXd& gradient) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const ModelConfig& c = params.config();
  const auto spans = example_spans(batch);
  const Forward f = forward(params, spans);
  const double value = logits_loss(f, batch);

  ModelParams grad(c);
  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd g(kNumAttributes, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (int a = 0; a < kNumAttributes; ++a) {
      const double p = 1.0 / (1.0 + std::exp(-f.logits(a, j)));
      g(a, j) = (p - batch[j]->target[a]) / static_cast<double>(b);
    }
  }
  grad.decoder_weight().noalias() = g * f.pooled.transpose();
  grad.decoder_bias() = g.rowwise().sum();
  const Eigen::MatrixXd d_pooled = params.decoder_weight().transpose() * g;

  const Eigen::Index n = static_cast<Eigen::Index>(f.set_of_column.size());
  Eigen::MatrixXd d_act(c.hidden, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int j = f.set_of_column[k];
    d_act.col(k) = d_pooled.col(j) / f.set_size[j];
  }
  for (int l = c.layers - 1; l >= 0; --l) {
    const Eigen::ArrayXXd& a = f.activations[l + 1].array();
    const Eigen::MatrixXd dz = (d_act.array() * a * (1.0 - a)).matrix();
    grad.weight(l).noalias() = dz * f.activations[l].transpose();
    grad.bias(l) = dz.rowwise().sum();
    d_act.noalias() = params.weight(l).transpose() * dz;
  }
  auto d_emb = grad.embedding();
  Eigen::Index col = 0;
  for (const auto& set : spans) {
    for (const EncodedExample& ex : set) {
      for (int t = 0; t < kTokensPerExample; ++t) {
        d_emb.col(ex.tokens[t]) += d_act.col(col).segment(token_offset(c, t), c.embedding);
      }
      ++col;
    }
  }
  gradient = std::move(grad.data());
  return value;
}

void save_params(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const ModelConfig& c = params.config();
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kWeightsVersion);
  for (int v : {c.embedding, c.hidden, c.layers, kNumAttributes, kMaxLength, kNumSlots}) {
    put_u32(out, static_cast<std::uint32_t>(v));
  }
  put_u64(out, params.size());
  for (double x : params.data()) put_u64(out, std::bit_cast<std::uint64_t>(x));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ModelParams load_params(const std::filesystem::path& path, const ModelConfig* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic)) throw CorruptFile(path.string() + ": truncated header");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw CorruptFile(path.string() + ": not a weights file");
  const auto version = static_cast<std::uint32_t>(get_uint(in, 4));
  if (version != kWeightsVersion) {
    throw FormatVersionError(path.string() + ": unsupported weights version " + std::to_string(version));
  }
  std::uint32_t dims[6];
  for (auto& d : dims) d = static_cast<std::uint32_t>(get_uint(in, 4));
  ModelConfig c{static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2])};
  if (dims[3] != kNumAttributes || dims[4] != kMaxLength || dims[5] != kNumSlots) {
    throw DimensionMismatch(path.string() + ": attribute count, max length or slot count differs");
  }
  if (c.embedding < 1 || c.hidden < 1 || c.layers < 1 || c.embedding > 4096 || c.hidden > 65536 || c.layers > 64) {
    throw CorruptFile(path.string() + ": implausible dimensions");
  }
  if (expected && !(*expected == c)) {
    throw DimensionMismatch(path.string() + ": file has E=" + std::to_string(c.embedding) +
                            " K=" + std::to_string(c.hidden) + " H=" + std::to_string(c.layers) +
                            ", expected E=" + std::to_string(expected->embedding) +
                            " K=" + std::to_string(expected->hidden) + " H=" + std::to_string(expected->layers));
  }
  ModelParams p(c);
  const std::uint64_t count = get_uint(in, 8);
  if (count != p.size()) throw CorruptFile(path.string() + ": parameter count does not match dimensions");
  for (double& x : p.data()) x = std::bit_cast<double>(get_uint(in, 8));
  if (in.peek() != std::char_traits<char>::eof()) throw CorruptFile(path.string() + ": trailing bytes");
  return p;
}

ConfusionMatrix confusion_matrix(const ModelParams& params, std::span<const DatasetRecord> records) {
  ConfusionMatrix m;
  std::array<std::array<double, kNumAttributes>, kNumAttributes> sum{};
  for (const DatasetRecord& r : records) {
    const AttributeScores p = predict(params, r.examples);
    for (int i = 0; i < kNumAttributes; ++i) {
      if (!r.attributes[i]) continue;
      for (int j = 0; j < kNumAttributes; ++j) {
        if (r.attributes[j]) continue;
        sum[i][j] += p[j];
        ++m.support[i][j];
      }
    }
  }
  for (int i = 0; i < kNumAttributes; ++i) {
    for (int j = 0; j < kNumAttributes; ++j) {
      m.value[i][j] = m.support[i][j] ? sum[i][j] / m.support[i][j] : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return m;
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# pbesynth-confusion version=1\n";
  out << "present,absent,mean_probability,support\n";
  for (int i = 0; i < kNumAttributes; ++i) {
    for (int j = 0; j < kNumAttributes; ++j) {
      out << attribute_name(i) << ',' << attribute_name(j) << ','
          << (m.support[i][j] ? format_double(m.value[i][j]) : std::string("undefined")) << ','
          << m.support[i][j] << '\n';
    }
  }
}

void write_embeddings_csv(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto emb = params.embedding();
  out << "# pbesynth-embeddings version=1 E=" << params.config().embedding << '\n' << "value";
  for (int e = 0; e < params.config().embedding; ++e) out << ",e" << e;
  out << '\n';
  for (int t = 0; t < kEmbeddingRows; ++t) {
    if (t == kNullToken) out << "null";
    else out << (t + kMinInt);
    for (int e = 0; e < params.config().embedding; ++e) out << ',' << format_double(emb(e, t));
    out << '\n';
  }
}

}  // namespace pbe
