// wsid/synthgen.h

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

#ifndef WSID_SYNTHGEN_H_
#define WSID_SYNTHGEN_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wsid/corpus.h"
#include "wsid/inference.h"
#include "wsid/random.h"

namespace wsid {

struct GenConfig {
  int num_speakers = 200;
  int embedding_dim = 16;
  double zipf_exponent = 1.0;
  int num_recordings = 500;
  int bag_min = 3;
  int bag_max = 8;
  /// Per-coordinate standard deviation of the within-speaker noise.
  double noise_stddev = 0.1;
  /// Probability that a bag member is an unlabelled background speaker.
  double distractor_fraction = 0.1;
  /// Size of the background speaker pool; 0 means num_speakers.
  int num_background_speakers = 0;
  /// Speaker index pairs that always appear together.
  std::vector<std::pair<int, int>> cooccur_pairs;
  std::uint64_t seed = 0;

  /// Throws UsageError naming the offending field.
  void Validate() const;
  int background_pool() const {
    return num_background_speakers > 0 ? num_background_speakers : num_speakers;
  }
};

struct SyntheticCorpus {
  std::vector<Recording> recordings;
  TimelineMap timelines;
  /// Target speaker names; index i has Zipf rank i + 1.
  std::vector<std::string> speaker_names;
  /// Unit-norm prototypes, one column per target speaker.
  Eigen::MatrixXd prototypes;
  std::vector<std::string> background_names;
  Eigen::MatrixXd background_prototypes;
};

/**
   Generates a corpus with ground truth.  Speaker prototypes are uniform on
   the unit sphere.  Each recording draws a bag size uniformly from
   [bag_min, bag_max]; every member is a background distractor with
   probability distractor_fraction, and the labelled members are distinct
   speakers drawn without replacement with Zipf weights (co-occurring pairs
   are drawn as a unit).  An embedding is the length-normalized sum of its
   speaker's prototype and isotropic Gaussian noise.  Each member also gets a
   contiguous 5-60 s segment in the recording's reference timeline.
   Identical configs produce identical output.
*/
SyntheticCorpus Generate(const GenConfig &config);

/// One fresh embedding of a speaker: normalize(prototype + noise).
Embedding SampleEmbedding(const Eigen::VectorXd &prototype, double noise_stddev,
                          Rng &rng);

/// CSV `speaker,index,c0,c1,...`; background speakers follow the targets.
void WritePrototypes(std::ostream &os, const SyntheticCorpus &corpus);

}  // namespace wsid

#endif  // WSID_SYNTHGEN_H_
