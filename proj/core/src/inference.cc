// wsid/inference.cc

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

#include "wsid/inference.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "wsid/error.h"

namespace wsid {

std::vector<RankedLabel> IdentifyClosedSet(const Eigen::VectorXd &probs,
                                           const LabelVocabulary &vocab,
                                           int k) {
  const std::size_t c = vocab.num_targets();
  if (static_cast<std::size_t>(probs.size()) != vocab.num_outputs())
    throw UsageError("probability vector does not match vocabulary");
  if (k < 1 || static_cast<std::size_t>(k) > c)
    throw UsageError("k must lie in [1, " + std::to_string(c) + "]");
  std::vector<std::size_t> idx(c);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&probs](std::size_t a, std::size_t b) {
                      if (probs[a] != probs[b]) return probs[a] > probs[b];
                      return a < b;
                    });
  std::vector<RankedLabel> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r)
    out.push_back({idx[r], vocab.Label(idx[r]), probs[idx[r]]});
  return out;
}

std::vector<RankedLabel> IdentifyClosedSet(const Model &model,
                                           const LabelVocabulary &vocab,
                                           const Embedding &x, int k) {
  return IdentifyClosedSet(model.Predict(x), vocab, k);
}

std::optional<std::size_t> IdentifyOpenSet(const Eigen::VectorXd &probs,
                                           double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw UsageError("threshold must lie in [0, 1]");
  if (probs.size() < 2) throw UsageError("probability vector too short");
  Eigen::Index best = 0;
  probs.maxCoeff(&best);  // first maximum, i.e. lowest index on ties
  const auto unk = probs.size() - 1;
  if (best == unk || probs[best] < threshold) return std::nullopt;
  return static_cast<std::size_t>(best);
}

std::optional<std::size_t> IdentifyOpenSet(const Model &model,
                                           const Embedding &x,
                                           double threshold) {
  return IdentifyOpenSet(model.Predict(x), threshold);
}

double TopKAccuracy(std::span<const std::vector<std::string>> predictions,
                    std::span<const std::string> truths, int k) {
  if (predictions.size() != truths.size())
    throw UsageError("predictions and truths differ in length");
  if (predictions.empty()) throw UsageError("top-k accuracy of an empty set");
  if (k < 1) throw UsageError("k must be positive");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto &ranked = predictions[i];
    const auto stop =
        ranked.begin() + std::min<std::ptrdiff_t>(k, std::ssize(ranked));
    if (std::find(ranked.begin(), stop, truths[i]) != stop) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

PrecisionRecall ComputePrecisionRecall(std::span<const Decision> decisions) {
  if (decisions.empty()) throw UsageError("precision/recall of no decisions");
  PrecisionRecall pr;
  for (const auto &d : decisions) {
    if (d.truth) ++pr.num_target_items;
    if (d.predicted) {
      ++pr.num_known_decisions;
      if (d.truth && *d.predicted == *d.truth) ++pr.num_correct;
    }
  }
  if (pr.num_known_decisions > 0)
    pr.precision = static_cast<double>(pr.num_correct) /
                   static_cast<double>(pr.num_known_decisions);
  if (pr.num_target_items > 0)
    pr.recall = static_cast<double>(pr.num_correct) /
                static_cast<double>(pr.num_target_items);
  return pr;
}

namespace {
// Decimal onsets and durations do not add up exactly in binary.
constexpr double kOverlapTolerance = 1e-6;
}  // namespace

void ValidateTimeline(const Timeline &timeline, bool require_disjoint) {
  for (const auto &s : timeline.segments) {
    if (!std::isfinite(s.onset) || !std::isfinite(s.duration))
      throw DataError("timeline segment with non-finite time");
    if (s.onset < 0.0) throw DataError("timeline segment with negative onset");
    if (!(s.duration > 0.0))
      throw DataError("timeline segment with non-positive duration");
  }
  if (!require_disjoint) return;
  std::vector<const Segment *> sorted;
  for (const auto &s : timeline.segments) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const Segment *a, const Segment *b) { return a->onset < b->onset; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->onset < sorted[i - 1]->end() - kOverlapTolerance)
      throw DataError("overlapping reference segments at " +
                      std::to_string(sorted[i]->onset) + " s ('" +
                      sorted[i - 1]->label + "' and '" + sorted[i]->label +
                      "')");
  }
}

namespace {

std::optional<double> Ratio(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

}  // namespace

std::optional<double> MetricReport::ier() const {
  return Ratio(confusion_time + false_alarm_time + missed_time,
               total_reference_time);
}

std::optional<double> MetricReport::precision() const {
  return Ratio(correct_time, correct_time + confusion_time + false_alarm_time);
}

std::optional<double> MetricReport::recall() const {
  return Ratio(correct_time, total_reference_time);
}

MetricReport &MetricReport::operator+=(const MetricReport &o) {
  correct_time += o.correct_time;
  confusion_time += o.confusion_time;
  false_alarm_time += o.false_alarm_time;
  missed_time += o.missed_time;
  total_reference_time += o.total_reference_time;
  return *this;
}

MetricReport TimeWeightedMetrics(
    const Timeline &reference, const Timeline &hypothesis, double collar,
    const std::optional<std::set<std::string>> &target_filter) {
  if (!(collar >= 0.0) || !std::isfinite(collar))
    throw UsageError("collar must be a non-negative number of seconds");
  ValidateTimeline(reference, true);
  ValidateTimeline(hypothesis, false);

  MetricReport report;
  if (reference.segments.empty() && hypothesis.segments.empty()) return report;

  const double half = collar / 2.0;
  std::vector<double> cuts;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto *tl : {&reference, &hypothesis}) {
    for (const auto &s : tl->segments) {
      cuts.push_back(s.onset);
      cuts.push_back(s.end());
      lo = std::min(lo, s.onset);
      hi = std::max(hi, s.end());
    }
  }
  // Collar windows around every reference boundary.
  std::vector<std::pair<double, double>> excluded;
  if (half > 0.0) {
    for (const auto &s : reference.segments) {
      for (double b : {s.onset, s.end()}) {
        excluded.emplace_back(b - half, b + half);
        cuts.push_back(b - half);
        cuts.push_back(b + half);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::string unk(kUnknownLabel);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t0 = std::max(cuts[i], lo), t1 = std::min(cuts[i + 1], hi);
    if (!(t1 > t0)) continue;
    const double dt = t1 - t0;
    const double mid = 0.5 * (t0 + t1);
    bool in_collar = false;
    for (const auto &[a, b] : excluded) {
      if (mid > a && mid < b) {
        in_collar = true;
        break;
      }
    }
    if (in_collar) continue;

    const Segment *ref = nullptr;
    for (const auto &s : reference.segments) {
      if (mid >= s.onset && mid < s.end()) {
        ref = &s;
        break;
      }
    }
    // Speech of speakers outside the filter is not scored at all.
    if (ref && target_filter && !target_filter->count(ref->label)) continue;

    bool asserted = false, matched = false;
    for (const auto &s : hypothesis.segments) {
      if (mid >= s.onset && mid < s.end() && s.label != unk) {
        asserted = true;
        if (ref && s.label == ref->label) matched = true;
      }
    }
    if (ref) {
      report.total_reference_time += dt;
      if (matched)
        report.correct_time += dt;
      else if (asserted)
        report.confusion_time += dt;
      else
        report.missed_time += dt;
    } else if (asserted) {
      report.false_alarm_time += dt;
    }
  }
  return report;
}

TimelineMap ReadRttm(std::istream &is, const std::string &source) {
  TimelineMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty() || tok[0].starts_with(";;") || tok[0].starts_with("#"))
      continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (tok[0] != "SPEAKER") continue;  // other RTTM record types are ignored
    if (tok.size() < 8) throw DataError(where + ": too few RTTM fields");
    Segment seg;
    try {
      std::size_t pos = 0;
      seg.onset = std::stod(tok[3], &pos);
      if (pos != tok[3].size()) throw std::invalid_argument("onset");
      seg.duration = std::stod(tok[4], &pos);
      if (pos != tok[4].size()) throw std::invalid_argument("duration");
    } catch (const std::exception &) {
      throw DataError(where + ": bad onset or duration");
    }
    seg.label = tok[7];
    if (!std::isfinite(seg.onset) || seg.onset < 0.0 || !(seg.duration > 0.0) ||
        !std::isfinite(seg.duration))
      throw DataError(where + ": invalid segment times");
    out[tok[1]].segments.push_back(std::move(seg));
  }
  return out;
}

TimelineMap LoadRttm(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open timeline file '" + path + "'");
  return ReadRttm(is, path);
}

void WriteRttm(std::ostream &os, const TimelineMap &timelines) {
  char buf[64];
  for (const auto &[rec, tl] : timelines) {
    for (const auto &s : tl.segments) {
      std::snprintf(buf, sizeof(buf), " 1 %.3f %.3f <NA> <NA> ", s.onset,
                    s.duration);
      os << "SPEAKER " << rec << buf << s.label << " <NA> <NA>\n";
    }
  }
}

std::string FormatMetric(std::optional<double> value) {
  if (!value) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", *value);
  return buf;
}

}  // namespace wsid
