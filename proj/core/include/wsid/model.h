// wsid/model.h

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

#ifndef WSID_MODEL_H_
#define WSID_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "wsid/corpus.h"
#include "wsid/random.h"

namespace wsid {

struct ModelConfig {
  int input_dim = 0;
  int hidden_dim = 1024;
  /// Number of target labels plus one for `<unk>`.
  int num_outputs = 0;
  /// Fraction of hidden units dropped at training time, in [0, 1).
  double dropout_rate = 0.0;
  /// Slope of the leaky ReLU for negative inputs.
  double leaky_slope = 0.01;

  /// Throws UsageError on an invalid configuration.
  void Validate() const;
  bool operator==(const ModelConfig &) const = default;
};

/// Weights and biases of the three dense layers.  Also used for gradients.
struct Parameters {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // hidden x hidden
  Eigen::VectorXd b2;
  Eigen::MatrixXd w3;  // outputs x hidden
  Eigen::VectorXd b3;

  static Parameters Zeros(const ModelConfig &config);
  /// this += alpha * other
  void AddScaled(const Parameters &other, double alpha);
  void Scale(double alpha);
  bool AllFinite() const;
  std::size_t NumParameters() const;
  bool operator==(const Parameters &other) const;
};

using ParameterGradients = Parameters;

enum class Mode { kTrain, kInfer };

/// Inverted-dropout masks, hidden x bag_size, entries 0 or 1/(1 - rate).
struct DropoutMasks {
  Eigen::MatrixXd hidden1;
  Eigen::MatrixXd hidden2;
};

/// Everything Backward() needs from a training-mode forward pass over a bag.
/// Columns index bag members.
struct BagActivations {
  Eigen::MatrixXd input;
  Eigen::MatrixXd pre1, out1;  // out1 = mask1 .* leaky(pre1)
  Eigen::MatrixXd pre2, out2;
  Eigen::MatrixXd probs;
  DropoutMasks masks;

  bool empty() const { return probs.size() == 0; }
};

/**
   Feedforward classifier: input -> dense -> leaky ReLU -> dropout -> dense ->
   leaky ReLU -> dropout -> dense -> softmax over the target labels and
   `<unk>`.  All arithmetic is double precision.
*/
class Model {
 public:
  Model(ModelConfig config, Parameters params);

  const ModelConfig &config() const { return config_; }
  const Parameters &params() const { return params_; }
  Parameters &mutable_params() { return params_; }

  /// Inference-mode output distribution for a single embedding.
  Eigen::VectorXd Predict(const Embedding &x) const;
  /// Inference-mode outputs for the columns of `bag`.
  Eigen::MatrixXd PredictBag(const Eigen::MatrixXd &bag) const;

  /// Single-embedding forward pass.  `rng` is required when mode is kTrain
  /// and dropout_rate > 0.
  Eigen::VectorXd Forward(const Embedding &x, Mode mode, Rng *rng) const;

  /// Training-mode pass over a bag, drawing fresh dropout masks from `rng`.
  BagActivations ForwardTrain(const Eigen::MatrixXd &bag, Rng *rng) const;
  /// Training-mode pass with caller-supplied masks.
  BagActivations ForwardWithMasks(const Eigen::MatrixXd &bag,
                                  DropoutMasks masks) const;

  /// Gradient of the loss with respect to every parameter, given the cache of
  /// a training-mode pass and dLoss/dProbs (outputs x bag_size).
  ParameterGradients Backward(const BagActivations &cache,
                              const Eigen::MatrixXd &dloss_dprobs) const;

  bool operator==(const Model &other) const {
    return config_ == other.config_ && params_ == other.params_;
  }

 private:
  void CheckInput(const Eigen::MatrixXd &bag) const;

  ModelConfig config_;
  Parameters params_;
};

/// Glorot-uniform weights, zero biases.  Same (config, seed) gives a
/// bit-identical model.
Model InitModel(const ModelConfig &config, std::uint64_t seed);

/// Column-wise softmax; entries are kept strictly inside (0, 1).
Eigen::MatrixXd Softmax(const Eigen::MatrixXd &logits);

/// A trained model together with the vocabulary its outputs are indexed by.
struct ModelBundle {
  Model model;
  LabelVocabulary vocab;
};

/// JSON model container: format tag, version, config, vocabulary and
/// parameters.  Doubles are written in shortest round-trip form, so reading
/// a written model reproduces it bit for bit.
void WriteModel(std::ostream &os, const Model &model,
                const LabelVocabulary &vocab);
ModelBundle ReadModel(std::istream &is);
void SaveModel(const std::string &path, const Model &model,
               const LabelVocabulary &vocab);
ModelBundle LoadModel(const std::string &path);

}  // namespace wsid

#endif  // WSID_MODEL_H_
