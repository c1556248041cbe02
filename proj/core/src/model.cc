// wsid/model.cc

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

#include "wsid/model.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "wsid/error.h"

namespace wsid {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void ModelConfig::Validate() const {
  if (input_dim < 1) throw UsageError("input_dim must be >= 1");
  if (hidden_dim < 1) throw UsageError("hidden_dim must be >= 1");
  if (num_outputs < 2)
    throw UsageError("num_outputs must be >= 2 (one target label plus <unk>)");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw UsageError("dropout_rate must lie in [0, 1)");
  if (!(leaky_slope > 0.0) || !std::isfinite(leaky_slope))
    throw UsageError("leaky_slope must be positive");
}

Parameters Parameters::Zeros(const ModelConfig &config) {
  Parameters p;
  p.w1 = MatrixXd::Zero(config.hidden_dim, config.input_dim);
  p.b1 = VectorXd::Zero(config.hidden_dim);
  p.w2 = MatrixXd::Zero(config.hidden_dim, config.hidden_dim);
  p.b2 = VectorXd::Zero(config.hidden_dim);
  p.w3 = MatrixXd::Zero(config.num_outputs, config.hidden_dim);
  p.b3 = VectorXd::Zero(config.num_outputs);
  return p;
}

void Parameters::AddScaled(const Parameters &other, double alpha) {
  w1 += alpha * other.w1;
  b1 += alpha * other.b1;
  w2 += alpha * other.w2;
  b2 += alpha * other.b2;
  w3 += alpha * other.w3;
  b3 += alpha * other.b3;
}

void Parameters::Scale(double alpha) {
  w1 *= alpha;
  b1 *= alpha;
  w2 *= alpha;
  b2 *= alpha;
  w3 *= alpha;
  b3 *= alpha;
}

bool Parameters::AllFinite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() &&
         b2.allFinite() && w3.allFinite() && b3.allFinite();
}

std::size_t Parameters::NumParameters() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() +
                                  b2.size() + w3.size() + b3.size());
}

namespace {

template <typename T>
bool SameArray(const T &a, const T &b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

bool Parameters::operator==(const Parameters &o) const {
  return SameArray(w1, o.w1) && SameArray(b1, o.b1) && SameArray(w2, o.w2) &&
         SameArray(b2, o.b2) && SameArray(w3, o.w3) && SameArray(b3, o.b3);
}

Model::Model(ModelConfig config, Parameters params)
    : config_(config), params_(std::move(params)) {
  config_.Validate();
  const auto h = config_.hidden_dim, d = config_.input_dim,
             k = config_.num_outputs;
  if (params_.w1.rows() != h || params_.w1.cols() != d ||
      params_.b1.size() != h || params_.w2.rows() != h ||
      params_.w2.cols() != h || params_.b2.size() != h ||
      params_.w3.rows() != k || params_.w3.cols() != h ||
      params_.b3.size() != k)
    throw DataError("model parameter shapes do not match the configuration");
  if (!params_.AllFinite())
    throw DataError("model parameters contain non-finite values");
}

MatrixXd Softmax(const MatrixXd &logits) {
  constexpr double kMax = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  constexpr double kMin = std::numeric_limits<double>::min();
  MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double peak = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - peak).exp();
    out.col(j) /= out.col(j).sum();
    // Saturated logits would otherwise round to exactly 0 or 1.
    out.col(j) = out.col(j).cwiseMax(kMin).cwiseMin(kMax);
  }
  return out;
}

namespace {

MatrixXd Leaky(const MatrixXd &z, double slope) {
  return z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

MatrixXd LeakyDerivative(const MatrixXd &z, double slope) {
  return z.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

MatrixXd DrawMask(Eigen::Index rows, Eigen::Index cols, double rate,
                  Rng *rng) {
  MatrixXd mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = rng->Uniform() < rate ? 0.0 : keep_scale;
  return mask;
}

}  // namespace

void Model::CheckInput(const MatrixXd &bag) const {
  if (bag.rows() != config_.input_dim)
    throw DataError("embedding dimension " + std::to_string(bag.rows()) +
                    " does not match model input_dim " +
                    std::to_string(config_.input_dim));
  if (bag.cols() < 1) throw DataError("empty bag");
}

MatrixXd Model::PredictBag(const MatrixXd &bag) const {
  CheckInput(bag);
  const double s = config_.leaky_slope;
  MatrixXd h1 = Leaky((params_.w1 * bag).colwise() + params_.b1, s);
  MatrixXd h2 = Leaky((params_.w2 * h1).colwise() + params_.b2, s);
  return Softmax((params_.w3 * h2).colwise() + params_.b3);
}

VectorXd Model::Predict(const Embedding &x) const {
  return PredictBag(x);
}

VectorXd Model::Forward(const Embedding &x, Mode mode, Rng *rng) const {
  if (mode == Mode::kInfer) return Predict(x);
  return ForwardTrain(x, rng).probs.col(0);
}

BagActivations Model::ForwardTrain(const MatrixXd &bag, Rng *rng) const {
  CheckInput(bag);
  const auto h = config_.hidden_dim;
  DropoutMasks masks;
  if (config_.dropout_rate > 0.0) {
    if (rng == nullptr)
      throw UsageError("training-mode forward with dropout needs a generator");
    masks.hidden1 = DrawMask(h, bag.cols(), config_.dropout_rate, rng);
    masks.hidden2 = DrawMask(h, bag.cols(), config_.dropout_rate, rng);
  } else {
    masks.hidden1 = MatrixXd::Ones(h, bag.cols());
    masks.hidden2 = MatrixXd::Ones(h, bag.cols());
  }
  return ForwardWithMasks(bag, std::move(masks));
}

BagActivations Model::ForwardWithMasks(const MatrixXd &bag,
                                       DropoutMasks masks) const {
  CheckInput(bag);
  const auto h = config_.hidden_dim;
  if (masks.hidden1.rows() != h || masks.hidden1.cols() != bag.cols() ||
      masks.hidden2.rows() != h || masks.hidden2.cols() != bag.cols())
    throw UsageError("dropout mask shape does not match bag");
  const double s = config_.leaky_slope;
  BagActivations a;
  a.input = bag;
  a.pre1 = (params_.w1 * bag).colwise() + params_.b1;
  a.out1 = Leaky(a.pre1, s).cwiseProduct(masks.hidden1);
  a.pre2 = (params_.w2 * a.out1).colwise() + params_.b2;
  a.out2 = Leaky(a.pre2, s).cwiseProduct(masks.hidden2);
  a.probs = Softmax((params_.w3 * a.out2).colwise() + params_.b3);
  a.masks = std::move(masks);
  return a;
}

ParameterGradients Model::Backward(const BagActivations &cache,
                                   const MatrixXd &dloss_dprobs) const {
  if (cache.empty())
    throw UsageError("backward pass requires a cached training-mode forward");
  if (dloss_dprobs.rows() != cache.probs.rows() ||
      dloss_dprobs.cols() != cache.probs.cols())
    throw UsageError("loss gradient shape does not match cached outputs");
  const double s = config_.leaky_slope;
  const MatrixXd &p = cache.probs;

  // Softmax Jacobian-vector product per column: p .* (g - <p, g>).
  Eigen::RowVectorXd inner = p.cwiseProduct(dloss_dprobs).colwise().sum();
  MatrixXd d3 =
      p.cwiseProduct(dloss_dprobs - MatrixXd::Ones(p.rows(), 1) * inner);

  ParameterGradients g;
  g.w3 = d3 * cache.out2.transpose();
  g.b3 = d3.rowwise().sum();

  MatrixXd d2 = (params_.w3.transpose() * d3)
                    .cwiseProduct(cache.masks.hidden2)
                    .cwiseProduct(LeakyDerivative(cache.pre2, s));
  g.w2 = d2 * cache.out1.transpose();
  g.b2 = d2.rowwise().sum();

  MatrixXd d1 = (params_.w2.transpose() * d2)
                    .cwiseProduct(cache.masks.hidden1)
                    .cwiseProduct(LeakyDerivative(cache.pre1, s));
  g.w1 = d1 * cache.input.transpose();
  g.b1 = d1.rowwise().sum();
  return g;
}

Model InitModel(const ModelConfig &config, std::uint64_t seed) {
  config.Validate();
  Parameters p = Parameters::Zeros(config);
  Rng rng(seed, RngStream::kInit);
  auto fill = [&rng](MatrixXd &w) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w.data()[i] = rng.Uniform(-limit, limit);
  };
  fill(p.w1);
  fill(p.w2);
  fill(p.w3);
  return Model(config, std::move(p));
}

namespace {

using nlohmann::json;

constexpr const char *kModelFormat = "wsid-model";
constexpr int kModelVersion = 1;

json ArrayToJson(const MatrixXd &m) {
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

MatrixXd ArrayFromJson(const json &j, const char *name) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 ||
        static_cast<std::size_t>(rows * cols) != data.size())
      throw DataError(std::string("array '") + name + "' has inconsistent size");
    MatrixXd m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
  } catch (const json::exception &e) {
    throw DataError(std::string("bad array '") + name + "': " + e.what());
  }
}

}  // namespace

void WriteModel(std::ostream &os, const Model &model,
                const LabelVocabulary &vocab) {
  if (static_cast<int>(vocab.num_outputs()) != model.config().num_outputs)
    throw UsageError("vocabulary size does not match model outputs");
  const auto &c = model.config();
  const auto &p = model.params();
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["config"] = {{"input_dim", c.input_dim},
                 {"hidden_dim", c.hidden_dim},
                 {"num_outputs", c.num_outputs},
                 {"dropout_rate", c.dropout_rate},
                 {"leaky_slope", c.leaky_slope}};
  j["vocabulary"] = vocab.labels();
  j["parameters"] = {{"w1", ArrayToJson(p.w1)}, {"b1", ArrayToJson(p.b1)},
                     {"w2", ArrayToJson(p.w2)}, {"b2", ArrayToJson(p.b2)},
                     {"w3", ArrayToJson(p.w3)}, {"b3", ArrayToJson(p.b3)}};
  os << j.dump() << '\n';
}

ModelBundle ReadModel(std::istream &is) {
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataError("model file is not valid JSON");
  if (j.value("format", "") != kModelFormat)
    throw DataError("not a wsid model file");
  if (j.value("version", 0) != kModelVersion)
    throw DataError("unsupported model file version");
  try {
    ModelConfig c;
    const auto &jc = j.at("config");
    c.input_dim = jc.at("input_dim").get<int>();
    c.hidden_dim = jc.at("hidden_dim").get<int>();
    c.num_outputs = jc.at("num_outputs").get<int>();
    c.dropout_rate = jc.at("dropout_rate").get<double>();
    c.leaky_slope = jc.at("leaky_slope").get<double>();
    LabelVocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
    const auto &jp = j.at("parameters");
    Parameters p;
    p.w1 = ArrayFromJson(jp.at("w1"), "w1");
    p.b1 = ArrayFromJson(jp.at("b1"), "b1");
    p.w2 = ArrayFromJson(jp.at("w2"), "w2");
    p.b2 = ArrayFromJson(jp.at("b2"), "b2");
    p.w3 = ArrayFromJson(jp.at("w3"), "w3");
    p.b3 = ArrayFromJson(jp.at("b3"), "b3");
    if (static_cast<int>(vocab.num_outputs()) != c.num_outputs)
      throw DataError("model vocabulary size does not match num_outputs");
    try {
      return ModelBundle{Model(c, std::move(p)), std::move(vocab)};
    } catch (const UsageError &e) {
      throw DataError(std::string("invalid model config: ") + e.what());
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void SaveModel(const std::string &path, const Model &model,
               const LabelVocabulary &vocab) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write model file '" + path + "'");
  WriteModel(os, model, vocab);
  if (!os) throw DataError("error writing model file '" + path + "'");
}

ModelBundle LoadModel(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open model file '" + path + "'");
  return ReadModel(is);
}

}  // namespace wsid
