// tests/oracles.h

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

// Reference computations used by the tests.  Nothing here calls into the
// library code path it is used to check: the forward pass and the objective
// are re-derived with plain loops, and the time metrics are brute-forced on a
// 10 ms frame grid.

#ifndef WSID_TESTS_ORACLES_H_
#define WSID_TESTS_ORACLES_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wsid/inference.h"
#include "wsid/model.h"
#include "wsid/random.h"

namespace wsid::testing {

/// Loop-based softmax network forward pass (no dropout) for one input.
std::vector<double> ReferenceForward(const Parameters &p, double slope,
                                     const std::vector<double> &x);

/// Direct evaluation of sum_y p log(p / max(q, 1e-12)), skipping p == 0.
double ReferenceKl(const std::vector<double> &p, const std::vector<double> &q);

/// Recording objective evaluated from scratch: KL(expected || mean of
/// ReferenceForward over the bag columns).
double ReferenceRecordingLoss(const Parameters &p, double slope,
                              const Eigen::MatrixXd &bag,
                              const std::vector<double> &expected);

/// Central finite-difference gradient of the recording loss with respect to
/// every parameter, flattened in w1, b1, w2, b2, w3, b3 order.  The loss is
/// evaluated in long double so cancellation in (up - down) stays well below
/// the tolerance even for near-zero partials.
std::vector<double> FiniteDifferenceGradient(const Parameters &p, double slope,
                                             const Eigen::MatrixXd &bag,
                                             const std::vector<double> &expected,
                                             double step);

/// Flattens parameters in the same order as FiniteDifferenceGradient.
std::vector<double> Flatten(const Parameters &p);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
double MaxRelativeError(const std::vector<double> &a,
                        const std::vector<double> &b, double floor);

/// Time-weighted totals by sampling the midpoint of every 10 ms frame.
MetricReport FrameSampledMetrics(
    const Timeline &reference, const Timeline &hypothesis, double collar,
    const std::optional<std::set<std::string>> &filter = std::nullopt,
    double frame = 0.01);

/// Random disjoint reference and free-form hypothesis over a short span.
struct TimelinePair {
  Timeline reference;
  Timeline hypothesis;
};
TimelinePair RandomTimelinePair(Rng &rng, int max_segments, double span);

/// A random probability vector of length n with all entries positive.
Eigen::VectorXd RandomDistribution(Rng &rng, int n);

}  // namespace wsid::testing

#endif  // WSID_TESTS_ORACLES_H_
