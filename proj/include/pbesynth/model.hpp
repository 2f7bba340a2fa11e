// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Feed-forward attribute predictor. Each example is encoded as a fixed
// vector (per input slot: type one-hot {int, array, absent} and L padded
// integer embeddings; then output type one-hot {int, array} and L output
// embeddings), passed through sigmoid layers, mean-pooled over the examples
// of a set and decoded into 34 independent attribute probabilities.
//
// Weights file layout (all integers little-endian):
//   8 bytes  magic "PBSNNET1"
//   u32      format version
//   u32 x 6  E, K, H, C, L, slots
//   u64      parameter count
//   f64 ...  parameters, little-endian, in ModelParams::data order:
//            embedding (513 rows of E: integers -256..255, then Null),
//            per hidden layer: weight (K x fan_in, column-major), bias (K),
//            decoder weight (C x K, column-major), decoder bias (C).

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbesynth/datagen.hpp"
#include "pbesynth/value.hpp"

namespace pbe {

inline constexpr int kNumSlots = kMaxInputs;
inline constexpr int kEmbeddingRows = kMaxInt - kMinInt + 2;  // integers, then Null
inline constexpr int kNullToken = kEmbeddingRows - 1;
inline constexpr int kTokensPerExample = (kNumSlots + 1) * kMaxLength;
inline constexpr std::uint32_t kWeightsVersion = 1;

struct ModelConfig {
  int embedding = 20;
  int hidden = 256;
  int layers = 3;

  int input_width() const { return kNumSlots * (3 + kMaxLength * embedding) + 2 + kMaxLength * embedding; }
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Flat parameter vector with typed views.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(const ModelConfig& config);

  // Fan-in scaled uniform weights, zero biases, uniform [-1, 1] embeddings.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }
  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  // Column t is the embedding of token t.
  Eigen::Map<Eigen::MatrixXd> embedding();
  Eigen::Map<const Eigen::MatrixXd> embedding() const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> decoder_weight();
  Eigen::Map<const Eigen::MatrixXd> decoder_weight() const;
  Eigen::Map<Eigen::VectorXd> decoder_bias();
  Eigen::Map<const Eigen::VectorXd> decoder_bias() const;

  // Named contiguous parameter groups in storage order:
  // "embedding", "layer<i>.weight", "layer<i>.bias", "decoder.weight", "decoder.bias".
  struct Group {
    std::string name;
    std::size_t offset;
    std::size_t size;
  };
  std::vector<Group> groups() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.config_ == b.config_ && a.data_.size() == b.data_.size() && a.data_ == b.data_;
  }

 private:
  std::size_t offset_of_layer(int layer) const;
  std::size_t decoder_offset() const;

  ModelConfig config_;
  Eigen::VectorXd data_;
};

// Token index of an integer; values outside the working range saturate to
// the nearest end.
int token_of(std::int64_t v);

// One example as embedding tokens plus slot type codes (0 int, 1 array,
// 2 absent for inputs; 0 int, 1 array for the output). Arrays longer than
// kMaxLength are truncated.
struct EncodedExample {
  std::array<std::uint8_t, kNumSlots + 1> types{};
  std::array<std::uint16_t, kTokensPerExample> tokens{};
};

EncodedExample encode_example(const Example& example);

// Examples of a set in canonical order, so that the pooled encoding does
// not depend on the order in which examples were given.
std::vector<EncodedExample> encode_set(const ExampleSet& set);

// Dense input vector of one encoded example.
Eigen::VectorXd input_vector(const EncodedExample& example, const ModelParams& params);

// Encoded sets with targets, the unit of training.
struct EncodedSet {
  std::vector<EncodedExample> examples;
  std::array<double, kNumAttributes> target{};
};

EncodedSet encode_record(const DatasetRecord& record);

// Attribute probabilities, clamped to [1e-12, 1 - 1e-12].
AttributeScores predict(const ModelParams& params, const ExampleSet& set);
AttributeScores predict_encoded(const ModelParams& params, std::span<const EncodedExample> examples);

inline constexpr double kProbabilityClamp = 1e-12;

// Summed binary cross-entropy over the 34 attributes; probabilities are
// clamped to [1e-12, 1 - 1e-12].
double loss(const AttributeScores& prediction, std::span<const double, kNumAttributes> target);

// Mean over sets of the summed cross-entropy, computed from logits.
double batch_loss(const ModelParams& params, std::span<const EncodedSet* const> batch);

// Mean batch loss and its exact gradient (same layout as params.data()).
double loss_and_gradient(const ModelParams& params, std::span<const EncodedSet* const> batch,
                         Eigen::VectorXd& gradient);

class FormatVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DimensionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CorruptFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_params(const std::filesystem::path& path, const ModelParams& params);
// With `expected`, a file of different dimensions raises DimensionMismatch.
ModelParams load_params(const std::filesystem::path& path, const ModelConfig* expected = nullptr);

struct TrainConfig {
  int max_epochs = 30;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double validation_fraction = 0.1;
  int patience = 3;  // epochs without validation improvement before stopping
  std::uint64_t seed = 1;
};

struct EpochLog {
  int epoch;
  double train_loss;
  double validation_loss;
  double seconds;
};

struct TrainResult {
  ModelParams params;  // at the best validation loss
  std::vector<EpochLog> log;
  double initial_train_loss = 0;
  double best_validation_loss = 0;
  int best_epoch = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adam on minibatches of encoded sets. Without an explicit validation set,
// `validation_fraction` of `train` is held out (seeded). Deterministic given
// config.seed.
TrainResult train(const ModelConfig& model, const TrainConfig& config, std::vector<EncodedSet> train,
                  std::vector<EncodedSet> validation = {},
                  const std::function<void(const EpochLog&)>& on_epoch = {});

std::vector<EncodedSet> encode_records(std::span<const DatasetRecord> records);

// Mean loss over sets, evaluated in batches.
double mean_loss(const ModelParams& params, std::span<const EncodedSet> sets);

void write_training_log(const std::filesystem::path& path, std::span<const EpochLog> log,
                        const ModelConfig& model, const TrainConfig& config);

// Entry (i, j): mean predicted probability of attribute j over records that
// have attribute i and lack attribute j. Cells with no such record (always
// the diagonal) are NaN with support 0.
struct ConfusionMatrix {
  std::array<std::array<double, kNumAttributes>, kNumAttributes> value{};
  std::array<std::array<int, kNumAttributes>, kNumAttributes> support{};
};
ConfusionMatrix confusion_matrix(const ModelParams& params, std::span<const DatasetRecord> records);
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& m);

// CSV "value,e0,...": rows -256..255, then "null".
void write_embeddings_csv(const std::filesystem::path& path, const ModelParams& params);

}  // namespace pbe
