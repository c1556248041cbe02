// wsid/synthgen.cc

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

#include "wsid/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "wsid/embedding.h"
#include "wsid/error.h"

namespace wsid {

void GenConfig::Validate() const {
  if (num_speakers < 1) throw UsageError("num_speakers must be >= 1");
  if (embedding_dim < 1) throw UsageError("embedding_dim must be >= 1");
  if (!(zipf_exponent > 0.0) || !std::isfinite(zipf_exponent))
    throw UsageError("zipf_exponent must be positive");
  if (num_recordings < 1) throw UsageError("num_recordings must be >= 1");
  if (bag_min < 1) throw UsageError("bag_min must be >= 1");
  if (bag_min > num_speakers)
    throw UsageError("bag_min (" + std::to_string(bag_min) +
                     ") exceeds num_speakers (" + std::to_string(num_speakers) +
                     ")");
  if (bag_max < bag_min) throw UsageError("bag_max must be >= bag_min");
  if (bag_max > num_speakers)
    throw UsageError("bag_max (" + std::to_string(bag_max) +
                     ") exceeds num_speakers (" + std::to_string(num_speakers) +
                     ")");
  if (!(noise_stddev >= 0.0) || !std::isfinite(noise_stddev))
    throw UsageError("noise_stddev must be >= 0");
  if (!(distractor_fraction >= 0.0 && distractor_fraction <= 1.0))
    throw UsageError("distractor_fraction must lie in [0, 1]");
  if (num_background_speakers < 0)
    throw UsageError("num_background_speakers must be >= 0");
  if (background_pool() < bag_max)
    throw UsageError("num_background_speakers must be >= bag_max");
  for (const auto &[a, b] : cooccur_pairs) {
    if (a < 0 || b < 0 || a >= num_speakers || b >= num_speakers)
      throw UsageError("cooccur_pairs index out of range");
    if (a == b) throw UsageError("cooccur_pairs must join distinct speakers");
  }
}

namespace {

Eigen::MatrixXd SpherePoints(int dim, int count, Rng &rng) {
  Eigen::MatrixXd pts(dim, count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(dim);
    do {
      for (int d = 0; d < dim; ++d) v[d] = rng.Normal();
    } while (v.norm() == 0.0);
    pts.col(i) = v / v.norm();
  }
  return pts;
}

std::vector<std::string> Names(const char *prefix, int count) {
  const int width = std::max(3, static_cast<int>(std::to_string(count - 1).size()));
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) {
    std::string digits = std::to_string(i);
    if (static_cast<int>(digits.size()) < width)
      digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    names.push_back(prefix + digits);
  }
  return names;
}

// Speakers joined by co-occurrence constraints, as connected components.
std::vector<std::vector<int>> SpeakerGroups(const GenConfig &config) {
  std::vector<int> parent(config.num_speakers);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto &[a, b] : config.cooccur_pairs) parent[find(a)] = find(b);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(config.num_speakers, -1);
  for (int s = 0; s < config.num_speakers; ++s) {
    const int root = find(s);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(s);
  }
  return groups;
}

}  // namespace

Embedding SampleEmbedding(const Eigen::VectorXd &prototype, double noise_stddev,
                          Rng &rng) {
  Eigen::VectorXd v = prototype;
  if (noise_stddev > 0.0)
    for (Eigen::Index d = 0; d < v.size(); ++d)
      v[d] += noise_stddev * rng.Normal();
  return LengthNormalize(v);
}

SyntheticCorpus Generate(const GenConfig &config) {
  config.Validate();
  Rng rng(config.seed, RngStream::kGenerate);
  SyntheticCorpus out;
  out.speaker_names = Names("spk", config.num_speakers);
  out.background_names = Names("bg", config.background_pool());
  out.prototypes = SpherePoints(config.embedding_dim, config.num_speakers, rng);
  out.background_prototypes =
      SpherePoints(config.embedding_dim, config.background_pool(), rng);

  const auto groups = SpeakerGroups(config);
  std::vector<double> group_weight(groups.size(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int s : groups[g])
      group_weight[g] += std::pow(static_cast<double>(s + 1), -config.zipf_exponent);
  for (const auto &g : groups)
    if (static_cast<int>(g.size()) > config.bag_max)
      throw UsageError("cooccur_pairs form a group of " +
                       std::to_string(g.size()) +
                       " speakers, larger than bag_max");

  const auto rec_names = Names("rec", config.num_recordings);
  const std::string none(kNoneOfTargets);
  for (int n = 0; n < config.num_recordings; ++n) {
    const int bag = config.bag_min + static_cast<int>(rng.UniformInt(
                                         config.bag_max - config.bag_min + 1));
    int distractors = 0;
    for (int m = 0; m < bag; ++m)
      if (rng.Bernoulli(config.distractor_fraction)) ++distractors;

    // Zipf-weighted draws of whole groups without replacement.
    int slots = bag - distractors;
    std::vector<char> used(groups.size(), 0);
    std::vector<int> members;  // target speaker indices, or -1 - background
    while (slots > 0) {
      double total = 0.0;
      for (std::size_t g = 0; g < groups.size(); ++g)
        if (!used[g] && static_cast<int>(groups[g].size()) <= slots)
          total += group_weight[g];
      if (total <= 0.0) break;
      double r = rng.Uniform() * total;
      std::size_t pick = groups.size();
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (used[g] || static_cast<int>(groups[g].size()) > slots) continue;
        pick = g;
        r -= group_weight[g];
        if (r < 0.0) break;
      }
      used[pick] = 1;
      for (int s : groups[pick]) members.push_back(s);
      slots -= static_cast<int>(groups[pick].size());
    }
    distractors += slots;  // slots no group could fill

    std::vector<int> pool(config.background_pool());
    std::iota(pool.begin(), pool.end(), 0);
    for (int d = 0; d < distractors; ++d) {
      const auto j = d + static_cast<int>(rng.UniformInt(pool.size() - d));
      std::swap(pool[d], pool[j]);
      members.push_back(-1 - pool[d]);
    }
    rng.Shuffle(std::span<int>(members));

    Recording rec;
    rec.id = rec_names[n];
    rec.truth.emplace();
    Timeline timeline;
    long onset_ms = 0;
    for (int who : members) {
      const bool target = who >= 0;
      const Eigen::VectorXd proto = target ? out.prototypes.col(who)
                                           : out.background_prototypes.col(-1 - who);
      rec.embeddings.push_back(SampleEmbedding(proto, config.noise_stddev, rng));
      const std::string &name = target ? out.speaker_names[who] : none;
      rec.truth->push_back(name);
      if (target) rec.labels.push_back(name);
      const long dur_ms = 5000 + static_cast<long>(rng.UniformInt(55001));
      timeline.segments.push_back({onset_ms / 1000.0, dur_ms / 1000.0, name});
      onset_ms += dur_ms;
    }
    std::sort(rec.labels.begin(), rec.labels.end());
    out.timelines[rec.id] = std::move(timeline);
    out.recordings.push_back(std::move(rec));
  }
  return out;
}

void WritePrototypes(std::ostream &os, const SyntheticCorpus &corpus) {
  os << "speaker,index";
  for (Eigen::Index d = 0; d < corpus.prototypes.rows(); ++d) os << ",c" << d;
  os << '\n';
  char buf[32];
  auto rows = [&](const std::vector<std::string> &names,
                  const Eigen::MatrixXd &protos) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      os << names[i] << ',' << i;
      for (Eigen::Index d = 0; d < protos.rows(); ++d) {
        std::snprintf(buf, sizeof(buf), "%.17g", protos(d, static_cast<Eigen::Index>(i)));
        os << ',' << buf;
      }
      os << '\n';
    }
  };
  rows(corpus.speaker_names, corpus.prototypes);
  rows(corpus.background_names, corpus.background_prototypes);
}

}  // namespace wsid
