// wsid/embedding.cc

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

#include "wsid/embedding.h"

#include <cmath>
#include <string>

#include "wsid/error.h"

namespace wsid {

namespace {
constexpr double kMinMeanNorm = 1e-12;
}

Embedding LengthNormalize(const Embedding &v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw DataError("cannot length-normalize a zero or non-finite vector");
  return v / norm;
}

Embedding AggregateSpeakerEmbedding(std::span<const Embedding> utterances) {
  if (utterances.empty())
    throw DataError("cannot aggregate an empty list of utterances");
  const auto dim = utterances.front().size();
  // Sum of normalized vectors in a fixed index order; the order dependence is
  // limited to floating point rounding, which the final normalization absorbs.
  Embedding sum = Embedding::Zero(dim);
  for (const auto &u : utterances) {
    if (u.size() != dim)
      throw DataError("utterance dimension mismatch: " +
                      std::to_string(u.size()) + " vs " + std::to_string(dim));
    sum += LengthNormalize(u);
  }
  Embedding mean = sum / static_cast<double>(utterances.size());
  if (mean.norm() < kMinMeanNorm)
    throw DataError("utterance vectors cancel out; mean has zero norm");
  return LengthNormalize(mean);
}

}  // namespace wsid
