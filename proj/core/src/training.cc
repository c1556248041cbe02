// wsid/training.cc

// Copyright 2026  The wsid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "wsid/training.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "wsid/error.h"
#include "wsid/loss.h"
#include "wsid/random.h"

namespace wsid {

void TrainConfig::Validate() const {
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (!(lr_start > 0.0) || !(lr_end > 0.0))
    throw UsageError("learning rates must be positive");
  if (lr_start < lr_end) throw UsageError("lr_start must be >= lr_end");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw UsageError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw UsageError("weight_decay must be >= 0");
}

double LearningRate(int epoch_index, const TrainConfig &config) {
  if (epoch_index < 0 || epoch_index >= config.epochs)
    throw UsageError("epoch index " + std::to_string(epoch_index) +
                     " out of range [0, " + std::to_string(config.epochs) + ")");
  if (config.epochs == 1) return config.lr_start;
  const double frac =
      static_cast<double>(epoch_index) / static_cast<double>(config.epochs - 1);
  return config.lr_start + (config.lr_end - config.lr_start) * frac;
}

TrainResult Train(const std::vector<Recording> &recordings,
                  const LabelVocabulary &vocab, const ModelConfig &model_config,
                  const TrainConfig &train_config, const TrainHooks *hooks) {
  train_config.Validate();
  model_config.Validate();
  if (recordings.empty()) throw DataError("cannot train on an empty corpus");
  if (static_cast<std::size_t>(model_config.num_outputs) != vocab.num_outputs())
    throw UsageError("model num_outputs (" +
                     std::to_string(model_config.num_outputs) +
                     ") does not match vocabulary size plus <unk> (" +
                     std::to_string(vocab.num_outputs()) + ")");

  const std::size_t n = recordings.size();
  std::vector<Eigen::MatrixXd> bags;
  std::vector<Distribution> expected;
  bags.reserve(n);
  expected.reserve(n);
  for (const auto &rec : recordings) {
    if (rec.embeddings.empty())
      throw DataError("recording '" + rec.id + "' has no embeddings");
    if (rec.labels.empty())
      throw DataError("recording '" + rec.id + "' has no labels");
    if (static_cast<int>(rec.dim()) != model_config.input_dim)
      throw DataError("recording '" + rec.id + "' has embedding dimension " +
                      std::to_string(rec.dim()) + ", model expects " +
                      std::to_string(model_config.input_dim));
    bags.push_back(rec.BagMatrix());
    expected.push_back(ExpectedDistribution(rec.labels, rec.bag_size(), vocab));
  }

  TrainResult result{InitModel(model_config, train_config.seed), {}, 0};
  Model &model = result.model;
  Rng shuffle_rng(train_config.seed, RngStream::kShuffle);
  Rng dropout_rng(train_config.seed, RngStream::kDropout);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Parameters velocity;
  if (train_config.momentum > 0.0) velocity = Parameters::Zeros(model_config);

  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    const double lr = LearningRate(epoch, train_config);
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    if (hooks && hooks->on_epoch_order) hooks->on_epoch_order(epoch, order);

    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      BagActivations cache = model.ForwardTrain(bags[idx], &dropout_rng);
      RecordingLoss rl = RecordingLossGrad(expected[idx], cache.probs);
      if (!std::isfinite(rl.loss))
        throw NumericError("non-finite loss on recording '" +
                           recordings[idx].id + "' in epoch " +
                           std::to_string(epoch));
      loss_sum += rl.loss;
      ParameterGradients grad = model.Backward(cache, rl.grad);
      Parameters &params = model.mutable_params();
      if (train_config.weight_decay > 0.0)
        grad.AddScaled(params, train_config.weight_decay);
      if (train_config.momentum > 0.0) {
        velocity.Scale(train_config.momentum);
        velocity.AddScaled(grad, -lr);
        params.AddScaled(velocity, 1.0);
      } else {
        params.AddScaled(grad, -lr);
      }
      ++result.num_updates;
    }
    if (!model.params().AllFinite())
      throw NumericError("model parameters became non-finite in epoch " +
                         std::to_string(epoch));
    EpochStats stats{epoch, loss_sum / static_cast<double>(n), lr};
    result.trace.push_back(stats);
    if (hooks && hooks->on_epoch_end) hooks->on_epoch_end(stats);
  }
  return result;
}

void WriteLossTrace(std::ostream &os, std::span<const EpochStats> trace) {
  os << "epoch,mean_loss,learning_rate\n";
  char buf[96];
  for (const auto &s : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", s.epoch, s.mean_loss,
                  s.learning_rate);
    os << buf;
  }
}

}  // namespace wsid
