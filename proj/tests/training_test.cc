// tests/training_test.cc

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

#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "wsid/error.h"
#include "wsid/synthgen.h"
#include "wsid/training.h"

namespace wsid {
namespace {

// One speaker per recording and one embedding per bag.
std::vector<Recording> SingletonCorpus(int speakers, int per_speaker, std::uint64_t seed) {
  GenConfig g;
  g.num_speakers = speakers;
  g.embedding_dim = 6;
  Rng rng(seed);
  Eigen::MatrixXd protos(g.embedding_dim, speakers);
  for (int s = 0; s < speakers; ++s) {
    for (int d = 0; d < g.embedding_dim; ++d) protos(d, s) = rng.Normal();
    protos.col(s).normalize();
  }
  std::vector<Recording> corpus;
  for (int s = 0; s < speakers; ++s) {
    for (int r = 0; r < per_speaker; ++r) {
      Recording rec;
      rec.id = "s" + std::to_string(s) + "r" + std::to_string(r);
      rec.embeddings.push_back(SampleEmbedding(protos.col(s), 0.05, rng));
      rec.labels.push_back("spk" + std::to_string(s));
      corpus.push_back(rec);
    }
  }
  return corpus;
}

struct Setup {
  std::vector<Recording> corpus;
  LabelVocabulary vocab;
  ModelConfig model;
  TrainConfig train;
};

Setup SmallSetup(double dropout = 0.0) {
  Setup s;
  s.corpus = SingletonCorpus(5, 4, 1);
  s.vocab = BuildVocabulary(s.corpus, 1);
  s.model.input_dim = 6;
  s.model.hidden_dim = 16;
  s.model.num_outputs = static_cast<int>(s.vocab.num_outputs());
  s.model.dropout_rate = dropout;
  s.train.epochs = 10;
  s.train.lr_start = 0.05;
  s.train.lr_end = 0.01;
  s.train.seed = 42;
  return s;
}

TEST_CASE("learning rate schedule") {
  TrainConfig c;
  c.epochs = 100;
  CHECK(LearningRate(0, c) == 0.01);
  CHECK(LearningRate(99, c) == doctest::Approx(0.001).epsilon(1e-15));
  c.epochs = 101;
  CHECK(LearningRate(50, c) == doctest::Approx(0.0055).epsilon(1e-15));
  CHECK_THROWS_AS(LearningRate(101, c), UsageError);
  CHECK_THROWS_AS(LearningRate(-1, c), UsageError);
  c.epochs = 1;
  CHECK(LearningRate(0, c) == 0.01);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  c.epochs = 0;
  CHECK_THROWS_AS(c.Validate(), UsageError);
  c = TrainConfig{};
  c.lr_end = 0.1;
  CHECK_THROWS_AS(c.Validate(), UsageError);
  c = TrainConfig{};
  c.momentum = 1.0;
  CHECK_THROWS_AS(c.Validate(), UsageError);
}

TEST_CASE("training is deterministic and makes one update per recording") {
  Setup s = SmallSetup(0.3);
  s.train.momentum = 0.5;
  const TrainResult a = Train(s.corpus, s.vocab, s.model, s.train);
  const TrainResult b = Train(s.corpus, s.vocab, s.model, s.train);
  CHECK(a.model == b.model);
  CHECK(a.num_updates == s.corpus.size() * 10);
  REQUIRE(a.trace.size() == 10);
  for (std::size_t e = 0; e < a.trace.size(); ++e) {
    CHECK(a.trace[e].mean_loss == b.trace[e].mean_loss);
    CHECK(std::isfinite(a.trace[e].mean_loss));
  }
  s.train.seed = 43;
  CHECK(!(Train(s.corpus, s.vocab, s.model, s.train).model == a.model));
}

TEST_CASE("every epoch visits each recording once, independent of dropout") {
  std::vector<std::vector<std::size_t>> orders, orders_dropout;
  TrainHooks hooks;
  hooks.on_epoch_order = [&](int, std::span<const std::size_t> o) {
    orders.emplace_back(o.begin(), o.end());
  };
  Setup s = SmallSetup(0.0);
  Train(s.corpus, s.vocab, s.model, s.train, &hooks);
  hooks.on_epoch_order = [&](int, std::span<const std::size_t> o) {
    orders_dropout.emplace_back(o.begin(), o.end());
  };
  s.model.dropout_rate = 0.5;
  Train(s.corpus, s.vocab, s.model, s.train, &hooks);

  REQUIRE(orders.size() == 10);
  CHECK(orders == orders_dropout);
  bool any_change = false;
  for (std::size_t e = 0; e < orders.size(); ++e) {
    auto sorted = orders[e];
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
    if (e > 0 && orders[e] != orders[e - 1]) any_change = true;
  }
  CHECK(any_change);
}

TEST_CASE("loss decreases on a separable set") {
  const Setup s = SmallSetup();
  std::vector<EpochStats> seen;
  TrainHooks hooks;
  hooks.on_epoch_end = [&](const EpochStats &st) { seen.push_back(st); };
  const TrainResult r = Train(s.corpus, s.vocab, s.model, s.train, &hooks);
  REQUIRE(seen.size() == 10);
  for (std::size_t e = 1; e < seen.size(); ++e)
    CHECK(seen[e].mean_loss < seen[e - 1].mean_loss);
  CHECK(r.trace.back().mean_loss < r.trace.front().mean_loss);
  CHECK(seen[3].learning_rate == doctest::Approx(LearningRate(3, s.train)));
}

TEST_CASE("divergence aborts with a numeric error") {
  Setup s = SmallSetup();
  s.train.lr_start = s.train.lr_end = 1e305;
  CHECK_THROWS_AS(Train(s.corpus, s.vocab, s.model, s.train), NumericError);
}

TEST_CASE("bad training inputs") {
  Setup s = SmallSetup();
  CHECK_THROWS_AS(Train({}, s.vocab, s.model, s.train), DataError);
  auto corpus = s.corpus;
  corpus[0].labels = {"nobody"};
  CHECK_THROWS_AS(Train(corpus, s.vocab, s.model, s.train), DataError);
  corpus = s.corpus;
  corpus[1].labels.clear();
  CHECK_THROWS_AS(Train(corpus, s.vocab, s.model, s.train), DataError);
  ModelConfig wrong = s.model;
  wrong.num_outputs = 3;
  CHECK_THROWS_AS(Train(s.corpus, s.vocab, wrong, s.train), UsageError);
}

TEST_CASE("loss trace csv") {
  std::vector<EpochStats> trace = {{0, 0.5, 0.01}, {1, 0.25, 0.001}};
  std::ostringstream os;
  WriteLossTrace(os, trace);
  CHECK(os.str() ==
        "epoch,mean_loss,learning_rate\n"
        "0,0.5,0.01\n"
        "1,0.25,0.001\n");
}

}  // namespace
}  // namespace wsid
