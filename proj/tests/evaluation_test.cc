// tests/evaluation_test.cc

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

#include <sstream>

#include "doctest.h"
#include "wsid/error.h"
#include "wsid/evaluation.h"

namespace wsid {
namespace {

// Two targets whose outputs are fully determined by the sign of input 0:
// positive inputs go to "a", negative ones to "b".
Model SignModel() {
  ModelConfig c;
  c.input_dim = 1;
  c.hidden_dim = 2;
  c.num_outputs = 3;
  c.leaky_slope = 0.01;
  Parameters p = Parameters::Zeros(c);
  p.w1(0, 0) = 1.0;
  p.w1(1, 0) = -1.0;
  p.w2.setIdentity();
  p.w3(0, 0) = 10.0;
  p.w3(1, 1) = 10.0;
  return Model(c, p);
}

Recording Rec(std::string id, std::vector<double> xs, std::vector<std::string> truth) {
  Recording r;
  r.id = std::move(id);
  for (double x : xs) r.embeddings.push_back(Embedding::Constant(1, x));
  r.truth = std::move(truth);
  return r;
}

TEST_CASE("evaluate a hand-built model") {
  const Model m = SignModel();
  const LabelVocabulary vocab({"a", "b"});
  const std::vector<Recording> corpus = {Rec("r1", {1.0, -1.0, 1.0}, {"a", "b", "b"}),
                                         Rec("r2", {-1.0, 1.0}, {"b", "<none>"})};
  TimelineMap ref;
  ref["r1"] = Timeline{{{0, 10, "a"}, {10, 10, "b"}, {20, 10, "b"}}};
  ref["r2"] = Timeline{{{5, 10, "<none>"}, {0, 5, "b"}}};

  EvaluationOptions opt;
  opt.collar = 0.0;
  opt.top_k = 2;
  const EvaluationReport r = Evaluate(m, vocab, corpus, &ref, opt);
  CHECK(r.num_embeddings == 5);
  CHECK(r.num_target_embeddings == 4);
  CHECK(*r.top1_accuracy == 0.75);
  CHECK(*r.topk_accuracy == 1.0);
  CHECK(*r.speaker_level.precision == doctest::Approx(3.0 / 5.0));
  CHECK(*r.speaker_level.recall == 0.75);
  REQUIRE(r.time_weighted);
  // r2's segments are matched to embeddings by onset, not listing order.
  CHECK(r.time_weighted->correct_time == 25.0);
  CHECK(r.time_weighted->confusion_time == 20.0);
  CHECK(r.time_weighted->total_reference_time == 45.0);

  std::ostringstream csv;
  WriteEvaluationCsv(csv, r);
  CHECK(csv.str().find("top2_accuracy,1\n") != std::string::npos);

  TimelineMap short_ref = ref;
  short_ref["r1"].segments.pop_back();
  CHECK_THROWS_AS(Evaluate(m, vocab, corpus, &short_ref, opt), DataError);
  auto no_truth = corpus;
  no_truth[0].truth.reset();
  CHECK_THROWS_AS(Evaluate(m, vocab, no_truth, nullptr, opt), DataError);
}

TEST_CASE("identify corpus and decisions csv") {
  const Model m = SignModel();
  const LabelVocabulary vocab({"a", "b"});
  const std::vector<Recording> corpus = {Rec("r1", {1.0, -1.0}, {"a", "b"})};
  IdentifyOptions closed;
  auto d = IdentifyCorpus(m, vocab, corpus, closed);
  REQUIRE(d.size() == 2);
  CHECK(*d[0].label_index == 0);
  CHECK(*d[1].label_index == 1);
  IdentifyOptions strict{false, 1.0};
  d = IdentifyCorpus(m, vocab, corpus, strict);
  std::ostringstream os;
  WriteDecisions(os, d, vocab);
  CHECK(os.str().rfind("recording_id,embedding_index,decision,probability\n", 0) == 0);
  CHECK(os.str().find("r1,0,UNKNOWN,") != std::string::npos);
  CHECK(os.str().find("r1,1,UNKNOWN,") != std::string::npos);
}

}  // namespace
}  // namespace wsid
