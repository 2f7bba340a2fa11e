// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pbesynth/model.hpp"
#include "pbesynth/random.hpp"

namespace pbe {
namespace {

constexpr std::size_t kEvalBatch = 256;

std::string describe(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

double mean_loss(const ModelParams& params, std::span<const EncodedSet> sets) {
  if (sets.empty()) throw std::invalid_argument("mean_loss of an empty set");
  double total = 0;
  std::vector<const EncodedSet*> batch;
  for (std::size_t i = 0; i < sets.size(); i += kEvalBatch) {
    batch.clear();
    for (std::size_t k = i; k < std::min(sets.size(), i + kEvalBatch); ++k) batch.push_back(&sets[k]);
    total += batch_loss(params, batch) * static_cast<double>(batch.size());
  }
  return total / static_cast<double>(sets.size());
}

TrainResult train(const ModelConfig& model, const TrainConfig& config, std::vector<EncodedSet> train_sets,
                  std::vector<EncodedSet> validation, const std::function<void(const EpochLog&)>& on_epoch) {
  if (train_sets.empty()) throw std::invalid_argument("training set is empty");
  if (config.batch_size < 1 || config.max_epochs < 1) throw std::invalid_argument("bad training config");

  if (validation.empty() && config.validation_fraction > 0 && train_sets.size() >= 2) {
    std::vector<std::size_t> order(train_sets.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(config.seed, 1));
    shuffle_in_place(order, split_rng);
    const auto held = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(config.validation_fraction * train_sets.size())), 1,
        train_sets.size() - 1);
    std::vector<EncodedSet> kept;
    kept.reserve(train_sets.size() - held);
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < held ? validation : kept).push_back(std::move(train_sets[order[i]]));
    }
    train_sets = std::move(kept);
  }

  TrainResult result;
  ModelParams params = ModelParams::initialize(model, derive_seed(config.seed, 2));
  result.initial_train_loss = mean_loss(params, train_sets);
  result.params = params;
  result.best_validation_loss = validation.empty() ? result.initial_train_loss : mean_loss(params, validation);

  const auto n_params = static_cast<Eigen::Index>(params.size());
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(n_params);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(n_params);
  Eigen::VectorXd grad;
  double beta1_t = 1, beta2_t = 1;

  Rng rng(derive_seed(config.seed, 3));
  std::vector<std::size_t> order(train_sets.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const EncodedSet*> batch;
  int stale = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_in_place(order, rng);
    double running = 0;
    for (std::size_t i = 0; i < order.size(); i += config.batch_size) {
      batch.clear();
      for (std::size_t k = i; k < std::min(order.size(), i + config.batch_size); ++k) {
        batch.push_back(&train_sets[order[k]]);
      }
      const double l = loss_and_gradient(params, batch, grad);
      if (!std::isfinite(l) || !grad.allFinite()) {
        throw TrainingDiverged("non-finite loss or gradient in epoch " + std::to_string(epoch) +
                               " at batch " + std::to_string(i / config.batch_size) + " (loss " + describe(l) + ")");
      }
      running += l * static_cast<double>(batch.size());
      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      m = config.beta1 * m + (1 - config.beta1) * grad.array();
      v = config.beta2 * v + (1 - config.beta2) * grad.array().square();
      params.data().array() -= config.learning_rate * (m / (1 - beta1_t)) /
                               ((v / (1 - beta2_t)).sqrt() + config.epsilon);
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = running / static_cast<double>(order.size());
    log.validation_loss = validation.empty() ? log.train_loss : mean_loss(params, validation);
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!std::isfinite(log.validation_loss)) throw TrainingDiverged("non-finite validation loss");
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (log.validation_loss < result.best_validation_loss || result.best_epoch == 0) {
      result.best_validation_loss = log.validation_loss;
      result.best_epoch = epoch;
      result.params = params;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

void write_training_log(const std::filesystem::path& path, std::span<const EpochLog> log,
                        const ModelConfig& model, const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# pbesynth-training-log version=1 E=" << model.embedding << " K=" << model.hidden
      << " H=" << model.layers << " optimizer=adam lr=" << config.learning_rate
      << " beta1=" << config.beta1 << " beta2=" << config.beta2 << " eps=" << config.epsilon
      << " batch=" << config.batch_size << " max_epochs=" << config.max_epochs
      << " patience=" << config.patience << " validation_fraction=" << config.validation_fraction
      << " seed=" << config.seed << '\n';
  out << "epoch,train_loss,validation_loss,seconds\n";
  out.precision(17);
  for (const EpochLog& e : log) {
    out << e.epoch << ',' << e.train_loss << ',' << e.validation_loss << ',' << e.seconds << '\n';
  }
}

}  // namespace pbe
