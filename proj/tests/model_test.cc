// tests/model_test.cc

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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "wsid/error.h"
#include "wsid/loss.h"
#include "wsid/model.h"

namespace wsid {
namespace {

ModelConfig SmallConfig(double dropout = 0.0) {
  ModelConfig c;
  c.input_dim = 3;
  c.hidden_dim = 4;
  c.num_outputs = 3;
  c.dropout_rate = dropout;
  return c;
}

Eigen::MatrixXd RandomBag(Rng &rng, int dim, int size) {
  Eigen::MatrixXd bag(dim, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < dim; ++i) bag(i, j) = rng.Normal();
  return bag;
}

// Glorot init leaves biases at zero; tests of the backward pass want them
// exercised too.
Model Perturbed(const ModelConfig &config, std::uint64_t seed) {
  Model m = InitModel(config, seed);
  Rng rng(seed + 1000);
  Parameters &p = m.mutable_params();
  for (auto *b : {&p.b1, &p.b2, &p.b3})
    for (Eigen::Index i = 0; i < b->size(); ++i) (*b)[i] = rng.Uniform(-0.5, 0.5);
  return m;
}

TEST_CASE("init_model") {
  const ModelConfig c = SmallConfig();
  const Model a = InitModel(c, 7), b = InitModel(c, 7), other = InitModel(c, 8);
  CHECK(a == b);
  CHECK(!(a.params() == other.params()));
  CHECK(a.params().b1.isZero(0.0));
  CHECK(a.params().b2.isZero(0.0));
  CHECK(a.params().b3.isZero(0.0));
  const double limit = std::sqrt(6.0 / (3 + 4));
  CHECK(a.params().w1.cwiseAbs().maxCoeff() <= limit);
  CHECK(a.params().w1.rows() == 4);
  CHECK(a.params().w3.rows() == 3);
  CHECK(a.params().NumParameters() == 4 * 3 + 4 + 4 * 4 + 4 + 3 * 4 + 3);
}

TEST_CASE("config validation") {
  ModelConfig c = SmallConfig();
  c.num_outputs = 1;
  CHECK_THROWS_AS(c.Validate(), UsageError);
  c = SmallConfig(1.0);
  CHECK_THROWS_AS(c.Validate(), UsageError);
  c = SmallConfig();
  c.leaky_slope = 0.0;
  CHECK_THROWS_AS(c.Validate(), UsageError);
}

TEST_CASE("forward outputs are distributions") {
  Rng rng(1);
  const Model m = Perturbed(SmallConfig(), 2);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x = RandomBag(rng, 3, 1).col(0) * 10.0;
    const Eigen::VectorXd p = m.Predict(x);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
    CHECK(p.minCoeff() > 0.0);
    CHECK(p.maxCoeff() < 1.0);
  }
  CHECK_THROWS_AS(m.Predict(Eigen::VectorXd::Ones(4)), DataError);
}

TEST_CASE("forward agrees with the loop oracle") {
  Rng rng(4);
  ModelConfig c = SmallConfig();
  c.input_dim = 5;
  c.hidden_dim = 7;
  c.num_outputs = 4;
  c.leaky_slope = 0.1;
  const Model m = Perturbed(c, 5);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x = RandomBag(rng, 5, 1).col(0);
    const Eigen::VectorXd p = m.Predict(x);
    const auto ref = testing::ReferenceForward(
        m.params(), c.leaky_slope, std::vector<double>(x.data(), x.data() + x.size()));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(p[k] - ref[k]) <= 1e-14);
  }
}

TEST_CASE("dropout 0 makes train and infer modes identical") {
  Rng rng(3);
  const Model m = Perturbed(SmallConfig(0.0), 3);
  const Eigen::MatrixXd bag = RandomBag(rng, 3, 4);
  const BagActivations train = m.ForwardTrain(bag, nullptr);
  CHECK(train.probs == m.PredictBag(bag));
  CHECK(m.Forward(bag.col(0), Mode::kTrain, nullptr) == m.Predict(bag.col(0)));
}

TEST_CASE("training mode with dropout needs a generator") {
  const Model m = InitModel(SmallConfig(0.5), 1);
  CHECK_THROWS_AS(m.ForwardTrain(Eigen::MatrixXd::Ones(3, 2), nullptr), UsageError);
}

TEST_CASE("zero weights give a uniform output") {
  ModelConfig c = SmallConfig();
  c.num_outputs = 5;
  const Model m(c, Parameters::Zeros(c));
  const Eigen::VectorXd p = m.Predict(Eigen::VectorXd::Constant(3, 0.7));
  for (int k = 0; k < 5; ++k) CHECK(p[k] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("inverted dropout preserves the expected activation") {
  ModelConfig c = SmallConfig(0.3);
  c.hidden_dim = 32;
  const Model m = Perturbed(c, 11);
  Rng data(12);
  const Eigen::MatrixXd x = RandomBag(data, 3, 1);
  const Eigen::VectorXd pre = m.params().w1 * x.col(0) + m.params().b1;
  const Eigen::VectorXd act =
      pre.unaryExpr([&](double v) { return v > 0 ? v : c.leaky_slope * v; });

  constexpr int kDraws = 4000;
  Rng rng(13);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.hidden_dim);
  for (int d = 0; d < kDraws; ++d) sum += m.ForwardTrain(x, &rng).out1.col(0);
  const Eigen::VectorXd mean = sum / kDraws;

  // Each unit's mean is act * (mask mean); its standard error is
  // |act| * sqrt(r / (1 - r) / n).  The standardized deviations are
  // averaged across units and compared against 3 sigma of that average.
  const double r = c.dropout_rate;
  double z_sum = 0.0;
  int counted = 0;
  for (int h = 0; h < c.hidden_dim; ++h) {
    const double sigma = std::abs(act[h]) * std::sqrt(r / (1 - r) / kDraws);
    if (sigma == 0.0) continue;
    const double z = (mean[h] - act[h]) / sigma;
    CHECK(std::abs(z) < 5.0);
    z_sum += z;
    ++counted;
  }
  REQUIRE(counted > 0);
  CHECK(std::abs(z_sum / counted) <= 3.0 / std::sqrt(counted));
}

TEST_CASE("backward matches finite differences of the recording loss") {
  Rng rng(21);
  for (int instance = 0; instance < 10; ++instance) {
    ModelConfig c = SmallConfig();
    const Model m = Perturbed(c, 100 + instance);
    const Eigen::MatrixXd bag = RandomBag(rng, 3, 2);
    const std::vector<std::size_t> labels = {static_cast<std::size_t>(instance % 2)};
    const Distribution expected = ExpectedDistribution(labels, 2, 3);

    const BagActivations cache = m.ForwardTrain(bag, nullptr);
    const RecordingLoss rl = RecordingLossGrad(expected, cache.probs);
    const ParameterGradients g = m.Backward(cache, rl.grad);

    const std::vector<double> fd = testing::FiniteDifferenceGradient(
        m.params(), c.leaky_slope, bag,
        std::vector<double>(expected.data(), expected.data() + expected.size()), 1e-5);
    CHECK(testing::MaxRelativeError(testing::Flatten(g), fd, 1e-7) < 1e-5);
  }
}

TEST_CASE("zero loss gradient gives zero parameter gradients") {
  Rng rng(2);
  const Model m = Perturbed(SmallConfig(), 4);
  const BagActivations cache = m.ForwardTrain(RandomBag(rng, 3, 3), nullptr);
  const ParameterGradients g = m.Backward(cache, Eigen::MatrixXd::Zero(3, 3));
  CHECK(g == Parameters::Zeros(m.config()));
}

TEST_CASE("a unit dropped for every bag member gets no incoming gradient") {
  Rng rng(8);
  ModelConfig c = SmallConfig(0.5);
  const Model m = Perturbed(c, 9);
  const Eigen::MatrixXd bag = RandomBag(rng, 3, 3);
  DropoutMasks masks;
  masks.hidden1 = Eigen::MatrixXd::Constant(4, 3, 2.0);
  masks.hidden2 = Eigen::MatrixXd::Constant(4, 3, 2.0);
  masks.hidden1.row(1).setZero();
  masks.hidden2.row(2).setZero();
  const BagActivations cache = m.ForwardWithMasks(bag, masks);
  const Distribution expected = ExpectedDistribution(std::vector<std::size_t>{0}, 3, 3);
  const ParameterGradients g = m.Backward(cache, RecordingLossGrad(expected, cache.probs).grad);
  CHECK(g.w1.row(1).isZero(0.0));
  CHECK(g.b1[1] == 0.0);
  CHECK(g.w2.row(2).isZero(0.0));
  CHECK(g.b2[2] == 0.0);
  CHECK(!g.w1.row(0).isZero(0.0));
}

TEST_CASE("backward without a cache is an error") {
  const Model m = InitModel(SmallConfig(), 1);
  CHECK_THROWS_AS(m.Backward(BagActivations{}, Eigen::MatrixXd::Zero(3, 1)), UsageError);
}

TEST_CASE("saved models reload bit for bit") {
  Rng rng(30);
  ModelConfig c = SmallConfig(0.2);
  c.leaky_slope = 0.123456789;
  Model m = Perturbed(c, 31);
  m.mutable_params().w2(0, 0) = 1e-300;
  m.mutable_params().w2(1, 0) = -0.1;
  const LabelVocabulary vocab({"alice", "bob"});
  std::stringstream ss;
  WriteModel(ss, m, vocab);
  const ModelBundle back = ReadModel(ss);
  CHECK(back.model == m);
  CHECK(back.vocab == vocab);
  const Eigen::MatrixXd bag = RandomBag(rng, 3, 5);
  CHECK(back.model.PredictBag(bag) == m.PredictBag(bag));

  std::istringstream garbage("{\"format\": \"other\"}");
  CHECK_THROWS_AS(ReadModel(garbage), DataError);
  std::stringstream mismatched;
  CHECK_THROWS_AS(WriteModel(mismatched, m, LabelVocabulary({"a"})), UsageError);
}

}  // namespace
}  // namespace wsid
