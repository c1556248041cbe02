// wsid/loss.h

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

#ifndef WSID_LOSS_H_
#define WSID_LOSS_H_

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "wsid/corpus.h"

namespace wsid {

/// A probability vector over the vocabulary outputs (targets, then `<unk>`).
using Distribution = Eigen::VectorXd;

/// Floor applied to the model distribution inside the logarithm only.
inline constexpr double kLogFloor = 1e-12;

/// True when all entries are non-negative and they sum to 1 within `tol`.
bool IsDistribution(const Distribution &p, double tol = 1e-9);

/**
   Target distribution of a recording with `bag_size` embeddings whose
   annotation lists `labels`.

   Each listed label receives 1/bag_size and `<unk>` receives the remaining
   mass max(0, 1 - |labels| / bag_size); everything else is 0.  When the
   annotation lists more labels than there are embeddings the listed labels
   would sum past 1, so the vector is rescaled to sum to 1 (every listed label
   then gets 1/|labels|).

   Throws DataError if a label is outside the vocabulary or listed twice, and
   UsageError if bag_size is 0.
*/
Distribution ExpectedDistribution(std::span<const std::string> labels,
                                  std::size_t bag_size,
                                  const LabelVocabulary &vocab);

/// Index-based form; `num_outputs` includes `<unk>` as the last entry.
Distribution ExpectedDistribution(std::span<const std::size_t> label_indices,
                                  std::size_t bag_size,
                                  std::size_t num_outputs);

/// Elementwise mean of the columns of `bag_outputs` (outputs x bag_size).
Distribution AveragePrediction(const Eigen::MatrixXd &bag_outputs);

/// D(p || q) = sum_y p(y) log(p(y) / max(q(y), kLogFloor)).  Terms with
/// p(y) = 0 contribute exactly 0.
double KlDivergence(const Distribution &p, const Distribution &q);

struct RecordingLoss {
  double loss = 0.0;
  /// dLoss/d(bag_outputs), same shape as the outputs.
  Eigen::MatrixXd grad;
};

/**
   Recording-level objective: KL divergence between the expected distribution
   and the average of the bag members' output distributions, together with its
   gradient with respect to every member's output vector,
   (1/M) * (-p(y) / max(qbar(y), kLogFloor)).
*/
RecordingLoss RecordingLossGrad(const Distribution &expected,
                                const Eigen::MatrixXd &bag_outputs);

}  // namespace wsid

#endif  // WSID_LOSS_H_
