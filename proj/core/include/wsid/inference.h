// wsid/inference.h

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

#ifndef WSID_INFERENCE_H_
#define WSID_INFERENCE_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wsid/corpus.h"
#include "wsid/model.h"

namespace wsid {

struct RankedLabel {
  std::size_t index = 0;
  std::string label;
  double probability = 0.0;
};

/**
   Closed-set identification: the `<unk>` output is discarded and the target
   labels are ranked by probability, descending, ties going to the lower
   vocabulary index.  Returns the top `k` (1 <= k <= number of targets).
*/
std::vector<RankedLabel> IdentifyClosedSet(const Eigen::VectorXd &probs,
                                           const LabelVocabulary &vocab, int k);
std::vector<RankedLabel> IdentifyClosedSet(const Model &model,
                                           const LabelVocabulary &vocab,
                                           const Embedding &x, int k);

/// Open-set identification.  Returns the winning target index, or nullopt
/// (UNKNOWN) when `<unk>` wins or the winning probability is below
/// `threshold`.
std::optional<std::size_t> IdentifyOpenSet(const Eigen::VectorXd &probs,
                                           double threshold);
std::optional<std::size_t> IdentifyOpenSet(const Model &model,
                                           const Embedding &x,
                                           double threshold);

/// Fraction of items whose truth is among the first `k` labels of its
/// ranked prediction list.
double TopKAccuracy(std::span<const std::vector<std::string>> predictions,
                    std::span<const std::string> truths, int k);

/// One decision unit.  `predicted` empty means UNKNOWN; `truth` empty
/// means the item is not any target speaker.
struct Decision {
  std::optional<std::string> predicted;
  std::optional<std::string> truth;
};

/// Undefined ratios (zero denominators) are reported as nullopt.
struct PrecisionRecall {
  std::optional<double> precision;
  std::optional<double> recall;
  std::size_t num_known_decisions = 0;
  std::size_t num_correct = 0;
  std::size_t num_target_items = 0;
};

PrecisionRecall ComputePrecisionRecall(std::span<const Decision> decisions);

struct Segment {
  double onset = 0.0;
  double duration = 0.0;
  std::string label;

  double end() const { return onset + duration; }
  bool operator==(const Segment &) const = default;
};

/// Speaker segments of one recording; order is not significant.
struct Timeline {
  std::vector<Segment> segments;
  bool operator==(const Timeline &) const = default;
};

/// Throws DataError for negative onsets, non-positive durations, non-finite
/// times or (when `require_disjoint`) segments overlapping by more than 1 us.
void ValidateTimeline(const Timeline &timeline, bool require_disjoint);

/// Time-weighted scoring totals, in seconds.
struct MetricReport {
  double correct_time = 0.0;
  /// Reference speech attributed to a different known label.
  double confusion_time = 0.0;
  /// Known labels asserted where the reference has no scored speech.
  double false_alarm_time = 0.0;
  /// Reference speech where no known label is asserted.
  double missed_time = 0.0;
  double total_reference_time = 0.0;

  double false_time() const { return confusion_time + false_alarm_time; }
  /// (confusion + false alarm + miss) / total reference time.
  std::optional<double> ier() const;
  /// correct / (correct + confusion + false alarm).
  std::optional<double> precision() const;
  /// correct / total reference time.
  std::optional<double> recall() const;

  MetricReport &operator+=(const MetricReport &other);
};

/**
   Time-weighted identification error rate, precision and recall.

   The scored region spans both timelines, minus a window of collar/2 on
   each side of every reference segment boundary.  A hypothesis segment
   labelled `<unk>` asserts nothing.  When `target_filter` is given, reference
   segments of other speakers are removed from the scored region.  All
   quantities are computed exactly over the elementary intervals between
   boundaries.

   Throws DataError if the reference has overlapping segments.
*/
MetricReport TimeWeightedMetrics(
    const Timeline &reference, const Timeline &hypothesis, double collar,
    const std::optional<std::set<std::string>> &target_filter = std::nullopt);

/// Timelines keyed by recording id.
using TimelineMap = std::map<std::string, Timeline>;

/// RTTM lines: SPEAKER <rec> 1 <onset> <dur> <NA> <NA> <label> <NA> <NA>.
TimelineMap ReadRttm(std::istream &is, const std::string &source = "<stream>");
TimelineMap LoadRttm(const std::string &path);
void WriteRttm(std::ostream &os, const TimelineMap &timelines);

/// "undefined" for nullopt, otherwise a fixed 10-significant-digit format.
std::string FormatMetric(std::optional<double> value);

}  // namespace wsid

#endif  // WSID_INFERENCE_H_
