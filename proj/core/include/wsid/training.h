// wsid/training.h

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

#ifndef WSID_TRAINING_H_
#define WSID_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "wsid/corpus.h"
#include "wsid/model.h"

namespace wsid {

struct TrainConfig {
  int epochs = 100;
  double lr_start = 0.01;
  double lr_end = 0.001;
  /// Classical momentum coefficient; 0 gives plain SGD.
  double momentum = 0.0;
  /// L2 penalty coefficient added to the gradient; 0 disables it.
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

/// Linear decay from lr_start at epoch 0 to lr_end at the last epoch.
double LearningRate(int epoch_index, const TrainConfig &config);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> trace;
  std::size_t num_updates = 0;
};

/// Optional observation points, mainly for tests and progress reporting.
struct TrainHooks {
  /// Called at the start of each epoch with the recording visitation order.
  std::function<void(int epoch, std::span<const std::size_t> order)> on_epoch_order;
  /// Called after each epoch.
  std::function<void(const EpochStats &)> on_epoch_end;
};

/**
   Trains a model from recording-level label sets.

   The expected distribution of every recording is computed once up front.
   Each epoch visits all recordings in a freshly shuffled order; for each one
   the whole bag is run through the network in training mode, the outputs are
   averaged, and one SGD step is taken on the KL divergence between the
   expected and the averaged distribution, using the epoch's learning rate.

   Shuffling, initialization and dropout draw from separate streams of
   `train_config.seed`, so the result is fully determined by the inputs.
   Throws DataError for an empty or inconsistent corpus and NumericError if a
   loss becomes non-finite.
*/
TrainResult Train(const std::vector<Recording> &recordings,
                  const LabelVocabulary &vocab, const ModelConfig &model_config,
                  const TrainConfig &train_config,
                  const TrainHooks *hooks = nullptr);

/// CSV with header `epoch,mean_loss,learning_rate`.
void WriteLossTrace(std::ostream &os, std::span<const EpochStats> trace);

}  // namespace wsid

#endif  // WSID_TRAINING_H_
