// wsid/evaluation.cc

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

#include "wsid/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "wsid/error.h"

namespace wsid {

std::vector<EmbeddingDecision> IdentifyCorpus(
    const Model &model, const LabelVocabulary &vocab,
    const std::vector<Recording> &corpus, const IdentifyOptions &options) {
  std::vector<EmbeddingDecision> out;
  for (const auto &rec : corpus) {
    const Eigen::MatrixXd probs = model.PredictBag(rec.BagMatrix());
    for (Eigen::Index m = 0; m < probs.cols(); ++m) {
      EmbeddingDecision d;
      d.recording_id = rec.id;
      d.embedding_index = static_cast<std::size_t>(m);
      const Eigen::VectorXd p = probs.col(m);
      if (options.closed_set) {
        const auto top = IdentifyClosedSet(p, vocab, 1);
        d.label_index = top[0].index;
        d.probability = top[0].probability;
      } else {
        d.label_index = IdentifyOpenSet(p, options.threshold);
        d.probability = p.maxCoeff();
      }
      out.push_back(std::move(d));
    }
  }
  return out;
}

void WriteDecisions(std::ostream &os, std::span<const EmbeddingDecision> decisions,
                    const LabelVocabulary &vocab) {
  os << "recording_id,embedding_index,decision,probability\n";
  char buf[32];
  for (const auto &d : decisions) {
    std::snprintf(buf, sizeof(buf), "%.17g", d.probability);
    os << d.recording_id << ',' << d.embedding_index << ','
       << (d.label_index ? vocab.Label(*d.label_index) : std::string("UNKNOWN"))
       << ',' << buf << '\n';
  }
}

TimelineMap HypothesisTimelines(const TimelineMap &reference,
                                const std::vector<Recording> &corpus,
                                std::span<const EmbeddingDecision> decisions,
                                const LabelVocabulary &vocab) {
  std::unordered_map<std::string, const Recording *> by_id;
  for (const auto &rec : corpus) by_id[rec.id] = &rec;
  std::unordered_map<std::string, std::vector<const EmbeddingDecision *>> dec;
  for (const auto &d : decisions) dec[d.recording_id].push_back(&d);

  TimelineMap hyp;
  for (const auto &[rec_id, ref] : reference) {
    auto it = by_id.find(rec_id);
    if (it == by_id.end())
      throw DataError("timeline recording '" + rec_id + "' not in corpus");
    std::vector<Segment> segs = ref.segments;
    std::stable_sort(segs.begin(), segs.end(),
                     [](const Segment &a, const Segment &b) {
                       return a.onset < b.onset;
                     });
    const auto &ds = dec[rec_id];
    if (segs.size() != it->second->bag_size() || ds.size() != segs.size())
      throw DataError("recording '" + rec_id + "' has " +
                      std::to_string(segs.size()) + " timeline segments but " +
                      std::to_string(it->second->bag_size()) + " embeddings");
    for (const auto *d : ds) {
      segs[d->embedding_index].label =
          d->label_index ? vocab.Label(*d->label_index)
                         : std::string(kUnknownLabel);
    }
    hyp[rec_id].segments = std::move(segs);
  }
  return hyp;
}

EvaluationReport Evaluate(const Model &model, const LabelVocabulary &vocab,
                          const std::vector<Recording> &corpus,
                          const TimelineMap *reference,
                          const EvaluationOptions &options) {
  EvaluationReport report;
  const int k = std::min<int>(options.top_k, static_cast<int>(vocab.num_targets()));
  report.top_k = k;
  const auto decisions = IdentifyCorpus(model, vocab, corpus, options.identify);

  std::vector<std::vector<std::string>> ranked;
  std::vector<std::string> ranked_truth;
  std::vector<Decision> units;
  std::size_t next = 0;
  for (const auto &rec : corpus) {
    if (!rec.truth)
      throw DataError("recording '" + rec.id + "' has no ground truth");
    const Eigen::MatrixXd probs = model.PredictBag(rec.BagMatrix());
    for (std::size_t m = 0; m < rec.bag_size(); ++m, ++next) {
      const std::string &truth = (*rec.truth)[m];
      const bool is_target = vocab.Contains(truth);
      const auto &d = decisions[next];
      Decision unit;
      if (d.label_index) unit.predicted = vocab.Label(*d.label_index);
      if (is_target) {
        unit.truth = truth;
        std::vector<std::string> labels;
        for (const auto &r :
             IdentifyClosedSet(probs.col(static_cast<Eigen::Index>(m)), vocab, k))
          labels.push_back(r.label);
        ranked.push_back(std::move(labels));
        ranked_truth.push_back(truth);
      }
      units.push_back(std::move(unit));
    }
  }
  report.num_embeddings = units.size();
  report.num_target_embeddings = ranked.size();
  if (!ranked.empty()) {
    report.top1_accuracy = TopKAccuracy(ranked, ranked_truth, 1);
    report.topk_accuracy = TopKAccuracy(ranked, ranked_truth, k);
  }
  if (!units.empty()) report.speaker_level = ComputePrecisionRecall(units);

  if (reference) {
    const TimelineMap hyp =
        HypothesisTimelines(*reference, corpus, decisions, vocab);
    MetricReport total;
    for (const auto &[rec_id, ref] : *reference)
      total += TimeWeightedMetrics(ref, hyp.at(rec_id), options.collar,
                                   options.target_filter);
    report.time_weighted = total;
  }
  return report;
}

namespace {

std::string Seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void WriteEvaluationCsv(std::ostream &os, const EvaluationReport &r) {
  os << "metric,value\n";
  os << "num_embeddings," << r.num_embeddings << '\n';
  os << "num_target_embeddings," << r.num_target_embeddings << '\n';
  os << "top1_accuracy," << FormatMetric(r.top1_accuracy) << '\n';
  os << "top" << r.top_k << "_accuracy," << FormatMetric(r.topk_accuracy)
     << '\n';
  os << "precision," << FormatMetric(r.speaker_level.precision) << '\n';
  os << "recall," << FormatMetric(r.speaker_level.recall) << '\n';
  if (r.time_weighted) {
    const auto &t = *r.time_weighted;
    os << "time_ier," << FormatMetric(t.ier()) << '\n';
    os << "time_precision," << FormatMetric(t.precision()) << '\n';
    os << "time_recall," << FormatMetric(t.recall()) << '\n';
    os << "correct_time," << Seconds(t.correct_time) << '\n';
    os << "confusion_time," << Seconds(t.confusion_time) << '\n';
    os << "false_alarm_time," << Seconds(t.false_alarm_time) << '\n';
    os << "missed_time," << Seconds(t.missed_time) << '\n';
    os << "total_reference_time," << Seconds(t.total_reference_time) << '\n';
  }
}

void WriteEvaluationText(std::ostream &os, const EvaluationReport &r) {
  os << "Scored " << r.num_embeddings << " embeddings ("
     << r.num_target_embeddings << " of target speakers)\n";
  os << "  closed-set top-1 accuracy: " << FormatMetric(r.top1_accuracy) << '\n';
  os << "  closed-set top-" << r.top_k
     << " accuracy: " << FormatMetric(r.topk_accuracy) << '\n';
  os << "  speaker-level precision:   " << FormatMetric(r.speaker_level.precision)
     << " (" << r.speaker_level.num_correct << "/"
     << r.speaker_level.num_known_decisions << ")\n";
  os << "  speaker-level recall:      " << FormatMetric(r.speaker_level.recall)
     << " (" << r.speaker_level.num_correct << "/"
     << r.speaker_level.num_target_items << ")\n";
  if (r.time_weighted) {
    const auto &t = *r.time_weighted;
    os << "Time-weighted (" << Seconds(t.total_reference_time)
       << " s scored reference speech)\n";
    os << "  IER:       " << FormatMetric(t.ier()) << '\n';
    os << "  precision: " << FormatMetric(t.precision()) << '\n';
    os << "  recall:    " << FormatMetric(t.recall()) << '\n';
  }
}

}  // namespace wsid
