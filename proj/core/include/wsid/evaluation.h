// wsid/evaluation.h

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

#ifndef WSID_EVALUATION_H_
#define WSID_EVALUATION_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wsid/corpus.h"
#include "wsid/inference.h"
#include "wsid/model.h"

namespace wsid {

struct IdentifyOptions {
  /// Closed-set mode never answers UNKNOWN.
  bool closed_set = true;
  double threshold = 0.5;
};

/// Per-embedding identification result.
struct EmbeddingDecision {
  std::string recording_id;
  std::size_t embedding_index = 0;
  /// Target label index, or nullopt for UNKNOWN.
  std::optional<std::size_t> label_index;
  /// Probability of the winning output.
  double probability = 0.0;
};

/// Decisions for every embedding of every recording, in corpus order.
std::vector<EmbeddingDecision> IdentifyCorpus(
    const Model &model, const LabelVocabulary &vocab,
    const std::vector<Recording> &corpus, const IdentifyOptions &options);

/// CSV: recording_id,embedding_index,decision,probability (UNKNOWN rows use
/// the literal decision "UNKNOWN").
void WriteDecisions(std::ostream &os, std::span<const EmbeddingDecision> decisions,
                    const LabelVocabulary &vocab);

struct EvaluationOptions {
  IdentifyOptions identify;
  int top_k = 5;
  double collar = 0.5;
  std::optional<std::set<std::string>> target_filter;
};

struct EvaluationReport {
  std::size_t num_embeddings = 0;
  /// Embeddings whose truth is a vocabulary label.
  std::size_t num_target_embeddings = 0;
  int top_k = 5;
  std::optional<double> top1_accuracy;
  std::optional<double> topk_accuracy;
  /// Per (embedding, recording) decisions against truth.
  PrecisionRecall speaker_level;
  std::optional<MetricReport> time_weighted;
};

/**
   Scores a corpus that carries per-embedding truth.  Closed-set accuracies are
   computed over embeddings whose truth is in the vocabulary.  When reference
   timelines are given, the i-th segment (by onset) of a recording is taken to
   be the speech of its i-th embedding, the hypothesis timeline relabels
   those segments with the decisions, and time-weighted metrics are summed
   over recordings.  Throws DataError when truth is missing or segment counts
   disagree with bag sizes.
*/
EvaluationReport Evaluate(const Model &model, const LabelVocabulary &vocab,
                          const std::vector<Recording> &corpus,
                          const TimelineMap *reference,
                          const EvaluationOptions &options);

/// Hypothesis timelines built from per-embedding decisions as described above.
TimelineMap HypothesisTimelines(const TimelineMap &reference,
                                const std::vector<Recording> &corpus,
                                std::span<const EmbeddingDecision> decisions,
                                const LabelVocabulary &vocab);

/// CSV `metric,value`.
void WriteEvaluationCsv(std::ostream &os, const EvaluationReport &report);
void WriteEvaluationText(std::ostream &os, const EvaluationReport &report);

}  // namespace wsid

#endif  // WSID_EVALUATION_H_
