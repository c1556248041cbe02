// wsid/loss.cc

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

#include "wsid/loss.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wsid/error.h"

namespace wsid {

bool IsDistribution(const Distribution &p, double tol) {
  if (p.size() == 0 || !p.allFinite() || p.minCoeff() < 0.0) return false;
  return std::abs(p.sum() - 1.0) <= tol;
}

Distribution ExpectedDistribution(std::span<const std::size_t> label_indices,
                                  std::size_t bag_size,
                                  std::size_t num_outputs) {
  if (bag_size == 0) throw UsageError("bag_size must be at least 1");
  if (num_outputs < 2) throw UsageError("num_outputs must be at least 2");
  const std::size_t unk = num_outputs - 1;
  Distribution p = Distribution::Zero(static_cast<Eigen::Index>(num_outputs));
  const double share = 1.0 / static_cast<double>(bag_size);
  for (std::size_t idx : label_indices) {
    if (idx >= unk) throw DataError("label index outside target vocabulary");
    if (p[idx] != 0.0) throw DataError("label listed twice in one recording");
    p[idx] = share;
  }
  const std::size_t n = label_indices.size();
  if (n <= bag_size) {
    // Computed as (M - n) / M so the n == M case is exactly 0.
    p[unk] = static_cast<double>(bag_size - n) / static_cast<double>(bag_size);
  } else {
    // More listed speakers than embeddings: rescale the listed labels so
    // they share the unit mass equally.
    const double listed = 1.0 / static_cast<double>(n);
    for (std::size_t idx : label_indices) p[idx] = listed;
  }
  return p;
}

Distribution ExpectedDistribution(std::span<const std::string> labels,
                                  std::size_t bag_size,
                                  const LabelVocabulary &vocab) {
  std::vector<std::size_t> indices;
  indices.reserve(labels.size());
  for (const auto &label : labels) {
    auto idx = vocab.IndexOf(label);
    if (!idx) throw DataError("label '" + label + "' is not in the vocabulary");
    indices.push_back(*idx);
  }
  return ExpectedDistribution(indices, bag_size, vocab.num_outputs());
}

Distribution AveragePrediction(const Eigen::MatrixXd &bag_outputs) {
  if (bag_outputs.cols() == 0) throw UsageError("empty bag");
  // Summing each row in sorted order makes the result independent of the
  // order of bag members, bit for bit.
  const Eigen::Index m = bag_outputs.cols();
  Distribution mean(bag_outputs.rows());
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index y = 0; y < bag_outputs.rows(); ++y) {
    for (Eigen::Index j = 0; j < m; ++j) row[j] = bag_outputs(y, j);
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += v;
    mean[y] = sum / static_cast<double>(m);
  }
  return mean;
}

namespace {

// Unclamped sum; stays smooth when q is perturbed off the simplex.
double RawKl(const Distribution &p, const Distribution &q) {
  double sum = 0.0;
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    if (p[y] == 0.0) continue;
    sum += p[y] * std::log(p[y] / std::max(q[y], kLogFloor));
  }
  return sum;
}

}  // namespace

double KlDivergence(const Distribution &p, const Distribution &q) {
  if (p.size() != q.size())
    throw UsageError("KL divergence between distributions of different size");
  // Rounding can leave a tiny negative value when p == q.
  return std::max(RawKl(p, q), 0.0);
}

RecordingLoss RecordingLossGrad(const Distribution &expected,
                                const Eigen::MatrixXd &bag_outputs) {
  if (bag_outputs.cols() == 0) throw UsageError("empty bag");
  if (bag_outputs.rows() != expected.size())
    throw UsageError("bag outputs and expected distribution differ in size");
  const Distribution qbar = AveragePrediction(bag_outputs);
  RecordingLoss out;
  out.loss = RawKl(expected, qbar);
  const double inv_m = 1.0 / static_cast<double>(bag_outputs.cols());
  Eigen::VectorXd dq(expected.size());
  for (Eigen::Index y = 0; y < expected.size(); ++y)
    dq[y] = expected[y] == 0.0
                ? 0.0
                : -inv_m * expected[y] / std::max(qbar[y], kLogFloor);
  out.grad = dq.replicate(1, bag_outputs.cols());
  return out;
}

}  // namespace wsid
