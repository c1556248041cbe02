// wsid/corpus.cc

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

#include "wsid/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "wsid/error.h"

namespace wsid {

using nlohmann::json;

Eigen::MatrixXd Recording::BagMatrix() const {
  Eigen::MatrixXd bag(dim(), bag_size());
  for (std::size_t m = 0; m < embeddings.size(); ++m)
    bag.col(static_cast<Eigen::Index>(m)) = embeddings[m];
  return bag;
}

bool Recording::operator==(const Recording &other) const {
  if (id != other.id || labels != other.labels || truth != other.truth ||
      embeddings.size() != other.embeddings.size())
    return false;
  for (std::size_t m = 0; m < embeddings.size(); ++m) {
    if (embeddings[m].size() != other.embeddings[m].size() ||
        embeddings[m] != other.embeddings[m])
      return false;
  }
  return true;
}

LabelVocabulary::LabelVocabulary(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == kUnknownLabel)
      throw DataError("vocabulary may not contain the reserved label <unk>");
    if (labels_[i].empty())
      throw DataError("vocabulary contains an empty label");
    if (!index_.emplace(labels_[i], i).second)
      throw DataError("duplicate vocabulary label '" + labels_[i] + "'");
  }
}

const std::string &LabelVocabulary::Label(std::size_t index) const {
  static const std::string unk(kUnknownLabel);
  if (index == labels_.size()) return unk;
  if (index > labels_.size())
    throw UsageError("label index " + std::to_string(index) +
                     " out of range for vocabulary of size " +
                     std::to_string(num_outputs()));
  return labels_[index];
}

std::optional<std::size_t> LabelVocabulary::IndexOf(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ValidateRecording(const Recording &rec, const std::string &where) {
  if (rec.id.empty()) throw DataError(where + ": empty recording_id");
  if (rec.embeddings.empty())
    throw DataError(where + ": recording '" + rec.id + "' has no embeddings");
  const auto dim = rec.embeddings[0].size();
  if (dim < 1)
    throw DataError(where + ": recording '" + rec.id + "' has 0-dim embedding");
  for (std::size_t m = 0; m < rec.embeddings.size(); ++m) {
    const auto &e = rec.embeddings[m];
    if (e.size() != dim)
      throw DataError(where + ": dimension mismatch inside recording '" +
                      rec.id + "' (embedding " + std::to_string(m) + " has " +
                      std::to_string(e.size()) + ", expected " +
                      std::to_string(dim) + ")");
    if (!e.allFinite())
      throw DataError(where + ": non-finite value in recording '" + rec.id +
                      "' embedding " + std::to_string(m));
  }
  std::unordered_set<std::string> seen;
  for (const auto &label : rec.labels) {
    if (label.empty()) throw DataError(where + ": empty label");
    if (label == kUnknownLabel)
      throw DataError(where + ": label set contains reserved label <unk>");
    if (!seen.insert(label).second)
      throw DataError(where + ": duplicate label '" + label +
                      "' in recording '" + rec.id + "'");
  }
  if (rec.truth && rec.truth->size() != rec.embeddings.size())
    throw DataError(where + ": truth has " + std::to_string(rec.truth->size()) +
                    " entries but recording has " +
                    std::to_string(rec.embeddings.size()) + " embeddings");
}

namespace {

std::vector<std::string> StringArray(const json &j, const char *field) {
  if (!j.is_array())
    throw DataError(std::string("field '") + field + "' must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto &v : j) {
    if (!v.is_string())
      throw DataError(std::string("field '") + field +
                      "' must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Recording ParseRecordingLine(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw DataError("invalid JSON");
  if (!j.is_object()) throw DataError("record must be a JSON object");
  Recording rec;
  auto id = j.find("recording_id");
  if (id == j.end() || !id->is_string())
    throw DataError("missing or non-string 'recording_id'");
  rec.id = id->get<std::string>();
  auto labels = j.find("labels");
  if (labels == j.end()) throw DataError("missing 'labels'");
  rec.labels = StringArray(*labels, "labels");
  auto embs = j.find("embeddings");
  if (embs == j.end() || !embs->is_array())
    throw DataError("missing or non-array 'embeddings'");
  for (const auto &row : *embs) {
    if (!row.is_array()) throw DataError("each embedding must be an array");
    Embedding e(static_cast<Eigen::Index>(row.size()));
    Eigen::Index k = 0;
    for (const auto &v : row) {
      if (!v.is_number()) throw DataError("embedding entries must be numbers");
      e[k++] = v.get<double>();
    }
    rec.embeddings.push_back(std::move(e));
  }
  auto truth = j.find("truth");
  if (truth != j.end() && !truth->is_null())
    rec.truth = StringArray(*truth, "truth");
  return rec;
}

std::string FormatRecordingLine(const Recording &rec) {
  json j;
  j["recording_id"] = rec.id;
  j["labels"] = rec.labels;
  json embs = json::array();
  for (const auto &e : rec.embeddings)
    embs.push_back(std::vector<double>(e.data(), e.data() + e.size()));
  j["embeddings"] = std::move(embs);
  if (rec.truth) j["truth"] = *rec.truth;
  return j.dump();
}

std::vector<Recording> ReadCorpus(std::istream &is, const std::string &source) {
  std::vector<Recording> corpus;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  Eigen::Index dim = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    Recording rec;
    try {
      rec = ParseRecordingLine(line);
    } catch (const DataError &e) {
      throw DataError(where + ": malformed record: " + e.what());
    }
    ValidateRecording(rec, where);
    const auto d = static_cast<Eigen::Index>(rec.dim());
    if (dim < 0) {
      dim = d;
    } else if (d != dim) {
      throw DataError(where + ": dimension mismatch: embedding dimension " +
                      std::to_string(d) + " but corpus dimension is " +
                      std::to_string(dim));
    }
    if (!ids.insert(rec.id).second)
      throw DataError(where + ": duplicate recording_id '" + rec.id + "'");
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

std::vector<Recording> LoadCorpus(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open corpus file '" + path + "'");
  return ReadCorpus(is, path);
}

void WriteCorpus(std::ostream &os, const std::vector<Recording> &corpus) {
  for (const auto &rec : corpus) os << FormatRecordingLine(rec) << '\n';
}

void SaveCorpus(const std::string &path, const std::vector<Recording> &corpus) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write corpus file '" + path + "'");
  WriteCorpus(os, corpus);
  if (!os) throw DataError("error writing corpus file '" + path + "'");
}

std::unordered_map<std::string, int> CountAppearances(
    const std::vector<Recording> &corpus) {
  std::unordered_map<std::string, int> counts;
  for (const auto &rec : corpus) {
    // Label sets are validated duplicate-free, so each label counts once.
    for (const auto &label : rec.labels) ++counts[label];
  }
  return counts;
}

LabelVocabulary BuildVocabulary(const std::vector<Recording> &corpus,
                                int min_occurrences) {
  if (corpus.empty()) throw DataError("cannot build vocabulary: empty corpus");
  if (min_occurrences < 1)
    throw UsageError("min_occurrences must be positive");
  std::vector<std::string> kept;
  for (const auto &[label, count] : CountAppearances(corpus))
    if (count >= min_occurrences) kept.push_back(label);
  if (kept.empty())
    throw DataError("no label occurs in at least " +
                    std::to_string(min_occurrences) + " recordings");
  return LabelVocabulary(std::move(kept));
}

FilterResult FilterRecordings(const std::vector<Recording> &corpus,
                              const LabelVocabulary &vocab) {
  FilterResult result;
  for (const auto &rec : corpus) {
    Recording kept = rec;
    kept.labels.clear();
    for (const auto &label : rec.labels)
      if (vocab.Contains(label)) kept.labels.push_back(label);
    if (kept.labels.empty()) {
      ++result.num_dropped;
      continue;
    }
    result.recordings.push_back(std::move(kept));
  }
  return result;
}

LabelVocabulary ReadVocabulary(std::istream &is) {
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    labels.push_back(line);
  }
  return LabelVocabulary(std::move(labels));
}

void WriteVocabulary(std::ostream &os, const LabelVocabulary &vocab) {
  for (const auto &label : vocab.labels()) os << label << '\n';
}

}  // namespace wsid
