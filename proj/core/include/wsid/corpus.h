// wsid/corpus.h

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

#ifndef WSID_CORPUS_H_
#define WSID_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace wsid {

/// Reserved output label absorbing speakers outside a recording's label set.
inline constexpr std::string_view kUnknownLabel = "<unk>";
/// Ground-truth marker for bag members that are not any target speaker.
inline constexpr std::string_view kNoneOfTargets = "<none>";

/// One diarized speaker in one recording, as a fixed-dimensional vector.
using Embedding = Eigen::VectorXd;

/**
   A recording: a bag of embeddings plus the unordered set of speaker names
   annotated for the whole recording.  Which embedding belongs to which name
   is not known.  `truth`, when present, gives the generating speaker of each
   embedding (kNoneOfTargets for distractors) and is only used for scoring.
*/
struct Recording {
  std::string id;
  std::vector<Embedding> embeddings;
  std::vector<std::string> labels;
  std::optional<std::vector<std::string>> truth;

  std::size_t bag_size() const { return embeddings.size(); }
  std::size_t dim() const {
    return embeddings.empty() ? 0 : static_cast<std::size_t>(embeddings[0].size());
  }
  /// Embeddings packed as columns of a dim() x bag_size() matrix.
  Eigen::MatrixXd BagMatrix() const;

  bool operator==(const Recording &other) const;
};

/**
   Target label set plus the implicit `<unk>` entry.  Indices 0..C-1 are the
   target labels in lexicographic order; index C is always `<unk>`.
*/
class LabelVocabulary {
 public:
  LabelVocabulary() = default;
  /// Labels are sorted and must be distinct and not `<unk>`.
  explicit LabelVocabulary(std::vector<std::string> labels);

  std::size_t num_targets() const { return labels_.size(); }
  std::size_t num_outputs() const { return labels_.size() + 1; }
  std::size_t unk_index() const { return labels_.size(); }

  const std::string &Label(std::size_t index) const;
  std::optional<std::size_t> IndexOf(std::string_view label) const;
  bool Contains(std::string_view label) const { return IndexOf(label).has_value(); }
  const std::vector<std::string> &labels() const { return labels_; }

  bool operator==(const LabelVocabulary &other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Checks the Recording invariants; throws DataError naming `where`.
void ValidateRecording(const Recording &rec, const std::string &where);

/// Parses one JSON-lines record.  Throws DataError on malformed input.
Recording ParseRecordingLine(std::string_view line);
/// Serializes one record as a single JSON line (no trailing newline).
std::string FormatRecordingLine(const Recording &rec);

/// Reads a JSON-lines corpus.  `source` is used in error messages.
std::vector<Recording> ReadCorpus(std::istream &is,
                                  const std::string &source = "<stream>");
std::vector<Recording> LoadCorpus(const std::string &path);
void WriteCorpus(std::ostream &os, const std::vector<Recording> &corpus);
void SaveCorpus(const std::string &path, const std::vector<Recording> &corpus);

/**
   Keeps the labels that occur in at least `min_occurrences` distinct
   recordings.  Result is lexicographically ordered.  Throws DataError when
   the corpus is empty or nothing survives the threshold.
*/
LabelVocabulary BuildVocabulary(const std::vector<Recording> &corpus,
                                int min_occurrences);

/// Number of distinct recordings each label appears in.
std::unordered_map<std::string, int> CountAppearances(
    const std::vector<Recording> &corpus);

struct FilterResult {
  std::vector<Recording> recordings;
  std::size_t num_dropped = 0;
};

/// Restricts label sets to the vocabulary and drops recordings left empty.
FilterResult FilterRecordings(const std::vector<Recording> &corpus,
                              const LabelVocabulary &vocab);

/// Plain text, one target label per line; `<unk>` is implicit.
LabelVocabulary ReadVocabulary(std::istream &is);
void WriteVocabulary(std::ostream &os, const LabelVocabulary &vocab);

}  // namespace wsid

#endif  // WSID_CORPUS_H_
