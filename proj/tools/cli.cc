// tools/cli.cc

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

#include "cli.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "wsid/corpus.h"
#include "wsid/error.h"
#include "wsid/evaluation.h"
#include "wsid/inference.h"
#include "wsid/model.h"
#include "wsid/synthgen.h"
#include "wsid/training.h"

namespace wsid {

std::string FileSha256(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot read '" + path + "' for hashing");
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string data = buf.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw DataError("SHA-256 computation failed for '" + path + "'");
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string NormalizeKey(std::string key) {
  for (auto &c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  return key;
}

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Fills options that were not given on the command line from a
// `key = value` file.  Keys are long option names; '-' and '_' are
// interchangeable.  '#' and ';' start comments at the beginning of a line
// or after whitespace.
void ApplyConfigFile(CLI::App *cmd, const std::string &path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config file '" + path + "'");
  std::map<std::string, CLI::Option *> by_key;
  for (auto *opt : cmd->get_options()) {
    const auto name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    by_key[NormalizeKey(name)] = opt;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    line = Trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(where + ": expected 'key = value'");
    const std::string key = NormalizeKey(Trim(line.substr(0, eq)));
    std::string value = Trim(line.substr(eq + 1));
    if (value.empty() || value.front() != '"') {
      for (std::size_t i = 1; i < value.size(); ++i) {
        if ((value[i] == '#' || value[i] == ';') &&
            std::isspace(static_cast<unsigned char>(value[i - 1]))) {
          value = Trim(value.substr(0, i));
          break;
        }
      }
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw UsageError(where + ": unknown config key '" + key + "'");
    if (it->second->count() > 0) continue;  // command-line flag wins
    try {
      it->second->add_result(value);
      it->second->run_callback();
    } catch (const CLI::Error &e) {
      throw UsageError(where + ": bad value for '" + key + "': " + e.what());
    }
  }
}

json ConfigSnapshot(const CLI::App *cmd) {
  json j = json::object();
  for (const auto *opt : cmd->get_options()) {
    const auto name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      std::string joined;
      for (const auto &r : opt->results()) {
        if (!joined.empty()) joined += ',';
        joined += r;
      }
      j[NormalizeKey(name)] = joined;
    } else {
      j[NormalizeKey(name)] = opt->get_default_str();
    }
  }
  return j;
}

class Manifest {
 public:
  Manifest(std::string command, const CLI::App *cmd)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["tool_version"] = "0.1.0";
    j_["config"] = ConfigSnapshot(cmd);
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }
  void SetSeed(std::uint64_t seed) { j_["seed"] = seed; }
  void AddInput(const std::string &path) {
    j_["inputs"].push_back({{"path", path}, {"sha256", FileSha256(path)}});
  }
  void AddOutput(const std::string &path) {
    j_["outputs"].push_back({{"path", path}, {"sha256", FileSha256(path)}});
  }
  void Write(const std::string &path) {
    j_["elapsed_seconds"] = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start_)
                                .count();
    std::ofstream os(path);
    if (!os) throw DataError("cannot write manifest '" + path + "'");
    os << j_.dump(2) << '\n';
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write '" + path + "'");
  return os;
}

void RequireSet(const std::string &value, const char *flag) {
  if (value.empty()) throw UsageError(std::string("missing required ") + flag);
}

std::vector<std::pair<int, int>> ParsePairs(const std::string &text) {
  std::vector<std::pair<int, int>> pairs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(item);
      std::size_t p1 = 0, p2 = 0;
      const std::string a = item.substr(0, colon), b = item.substr(colon + 1);
      const int x = std::stoi(a, &p1), y = std::stoi(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument(item);
      pairs.emplace_back(x, y);
    } catch (const std::exception &) {
      throw UsageError("cooccur_pairs: expected 'i:j' items, got '" + item + "'");
    }
  }
  return pairs;
}

std::set<std::string> ParseLabelList(const std::string &text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.insert(item);
  }
  return out;
}

// ---------------------------------------------------------------- generate

struct GenerateCommand {
  CLI::App *app = nullptr;
  std::string config_path, out_dir, pairs;
  GenConfig gen;

  void Register(CLI::App &parent) {
    app = parent.add_subcommand("generate", "Generate a synthetic corpus");
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--out-dir", out_dir, "Output directory");
    app->add_option("--seed", gen.seed, "Random seed");
    app->add_option("--num-speakers", gen.num_speakers);
    app->add_option("--embedding-dim", gen.embedding_dim);
    app->add_option("--zipf-exponent", gen.zipf_exponent);
    app->add_option("--num-recordings", gen.num_recordings);
    app->add_option("--bag-min", gen.bag_min);
    app->add_option("--bag-max", gen.bag_max);
    app->add_option("--noise-stddev", gen.noise_stddev);
    app->add_option("--distractor-fraction", gen.distractor_fraction);
    app->add_option("--num-background-speakers", gen.num_background_speakers);
    app->add_option("--cooccur-pairs", pairs, "Comma list of i:j speaker pairs");
  }

  int Run(std::ostream &out) {
    if (!config_path.empty()) ApplyConfigFile(app, config_path);
    RequireSet(out_dir, "--out-dir");
    gen.cooccur_pairs = ParsePairs(pairs);
    Manifest manifest("generate", app);
    manifest.SetSeed(gen.seed);
    if (!config_path.empty()) manifest.AddInput(config_path);
    const SyntheticCorpus syn = Generate(gen);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create '" + out_dir + "': " + ec.message());
    const std::string corpus_path = (fs::path(out_dir) / "corpus.jsonl").string();
    const std::string rttm_path = (fs::path(out_dir) / "timelines.rttm").string();
    const std::string proto_path = (fs::path(out_dir) / "prototypes.csv").string();
    SaveCorpus(corpus_path, syn.recordings);
    {
      auto os = OpenOutput(rttm_path);
      WriteRttm(os, syn.timelines);
    }
    {
      auto os = OpenOutput(proto_path);
      WritePrototypes(os, syn);
    }
    for (const auto &p : {corpus_path, rttm_path, proto_path}) manifest.AddOutput(p);
    manifest.Write((fs::path(out_dir) / "manifest.json").string());
    out << "wrote " << syn.recordings.size() << " recordings to " << out_dir
        << '\n';
    return 0;
  }
};

// ------------------------------------------------------------------- train

struct TrainCommand {
  CLI::App *app = nullptr;
  std::string config_path, corpus_path, model_path, loss_path, vocab_path;
  int min_occurrences = 2;
  ModelConfig model;
  TrainConfig train;

  void Register(CLI::App &parent) {
    app = parent.add_subcommand("train", "Train a model from recording-level labels");
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--corpus", corpus_path, "Training corpus (JSON lines)");
    app->add_option("--model", model_path, "Output model file");
    app->add_option("--loss-csv", loss_path, "Loss trace (default <model>.loss.csv)");
    app->add_option("--vocab-out", vocab_path, "Optional vocabulary output");
    app->add_option("--seed", train.seed, "Random seed");
    app->add_option("--min-occurrences", min_occurrences,
                    "Keep labels seen in at least this many recordings");
    model.hidden_dim = 1024;
    model.dropout_rate = 0.5;
    app->add_option("--hidden-dim", model.hidden_dim);
    app->add_option("--dropout", model.dropout_rate);
    app->add_option("--leaky-slope", model.leaky_slope);
    app->add_option("--epochs", train.epochs);
    app->add_option("--lr-start", train.lr_start);
    app->add_option("--lr-end", train.lr_end);
    app->add_option("--momentum", train.momentum);
    app->add_option("--weight-decay", train.weight_decay);
  }

  int Run(std::ostream &out) {
    if (!config_path.empty()) ApplyConfigFile(app, config_path);
    RequireSet(corpus_path, "--corpus");
    RequireSet(model_path, "--model");
    if (loss_path.empty()) loss_path = model_path + ".loss.csv";
    train.Validate();
    Manifest manifest("train", app);
    manifest.SetSeed(train.seed);
    if (!config_path.empty()) manifest.AddInput(config_path);

    const auto corpus = LoadCorpus(corpus_path);
    manifest.AddInput(corpus_path);
    if (corpus.empty()) throw DataError("corpus '" + corpus_path + "' is empty");
    const LabelVocabulary vocab = BuildVocabulary(corpus, min_occurrences);
    const FilterResult filtered = FilterRecordings(corpus, vocab);
    out << "vocabulary: " << vocab.num_targets() << " labels; dropped "
        << filtered.num_dropped << " of " << corpus.size()
        << " recordings with no remaining labels\n";

    model.input_dim = static_cast<int>(corpus.front().dim());
    model.num_outputs = static_cast<int>(vocab.num_outputs());
    TrainHooks hooks;
    hooks.on_epoch_end = [&out](const EpochStats &s) {
      out << "epoch " << s.epoch << " loss " << s.mean_loss << " lr "
          << s.learning_rate << '\n';
    };
    const TrainResult result =
        Train(filtered.recordings, vocab, model, train, &hooks);

    SaveModel(model_path, result.model, vocab);
    {
      auto os = OpenOutput(loss_path);
      WriteLossTrace(os, result.trace);
    }
    manifest.AddOutput(model_path);
    manifest.AddOutput(loss_path);
    if (!vocab_path.empty()) {
      auto os = OpenOutput(vocab_path);
      WriteVocabulary(os, vocab);
      os.close();
      manifest.AddOutput(vocab_path);
    }
    manifest.Write(model_path + ".manifest.json");
    return 0;
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCommand {
  CLI::App *app = nullptr;
  std::string config_path, model_path, corpus_path, timelines_path,
      report_path, filter, filter_file;
  bool closed_set = false;
  EvaluationOptions options;

  void Register(CLI::App &parent) {
    app = parent.add_subcommand("evaluate", "Score a model on a corpus with truth");
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--model", model_path, "Model file");
    app->add_option("--corpus", corpus_path, "Corpus with per-embedding truth");
    app->add_option("--timelines", timelines_path, "Reference RTTM timelines");
    auto *cs = app->add_flag("--closed-set", closed_set,
                             "Discard <unk> and always name a target");
    auto *th = app->add_option("--threshold", options.identify.threshold,
                               "Open-set probability threshold");
    cs->excludes(th);
    app->add_option("--collar", options.collar, "Collar in seconds");
    app->add_option("--filter", filter, "Comma list of reference labels to score");
    app->add_option("--filter-file", filter_file,
                    "File with reference labels to score, one per line");
    app->add_option("--top-k", options.top_k);
    app->add_option("--report", report_path, "CSV report output");
  }

  int Run(std::ostream &out) {
    if (!config_path.empty()) ApplyConfigFile(app, config_path);
    RequireSet(model_path, "--model");
    RequireSet(corpus_path, "--corpus");
    options.identify.closed_set = closed_set;
    if (!filter.empty() || !filter_file.empty()) {
      std::set<std::string> labels = ParseLabelList(filter);
      if (!filter_file.empty()) {
        std::ifstream is(filter_file);
        if (!is) throw DataError("cannot open filter file '" + filter_file + "'");
        for (std::string line; std::getline(is, line);)
          if (!Trim(line).empty()) labels.insert(Trim(line));
      }
      options.target_filter = std::move(labels);
    }
    Manifest manifest("evaluate", app);
    const ModelBundle bundle = LoadModel(model_path);
    const auto corpus = LoadCorpus(corpus_path);
    manifest.AddInput(model_path);
    manifest.AddInput(corpus_path);
    std::optional<TimelineMap> timelines;
    if (!timelines_path.empty()) {
      timelines = LoadRttm(timelines_path);
      manifest.AddInput(timelines_path);
    }
    const EvaluationReport report =
        Evaluate(bundle.model, bundle.vocab, corpus,
                 timelines ? &*timelines : nullptr, options);
    WriteEvaluationText(out, report);
    if (!report_path.empty()) {
      {
        auto os = OpenOutput(report_path);
        WriteEvaluationCsv(os, report);
      }
      manifest.AddOutput(report_path);
      manifest.Write(report_path + ".manifest.json");
    }
    return 0;
  }
};

// ---------------------------------------------------------------- identify

struct IdentifyCommand {
  CLI::App *app = nullptr;
  std::string config_path, model_path, corpus_path, output_path;
  bool closed_set = false;
  IdentifyOptions options;

  void Register(CLI::App &parent) {
    app = parent.add_subcommand("identify", "Label every embedding of a corpus");
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--model", model_path, "Model file");
    app->add_option("--corpus", corpus_path, "Corpus (JSON lines)");
    auto *cs = app->add_flag("--closed-set", closed_set,
                             "Discard <unk> and always name a target");
    auto *th = app->add_option("--threshold", options.threshold,
                               "Open-set probability threshold");
    cs->excludes(th);
    app->add_option("--output", output_path, "Decisions CSV (default stdout)");
  }

  int Run(std::ostream &out) {
    if (!config_path.empty()) ApplyConfigFile(app, config_path);
    RequireSet(model_path, "--model");
    RequireSet(corpus_path, "--corpus");
    options.closed_set = closed_set;
    Manifest manifest("identify", app);
    const ModelBundle bundle = LoadModel(model_path);
    const auto corpus = LoadCorpus(corpus_path);
    manifest.AddInput(model_path);
    manifest.AddInput(corpus_path);
    const auto decisions = IdentifyCorpus(bundle.model, bundle.vocab, corpus, options);
    if (output_path.empty()) {
      WriteDecisions(out, decisions, bundle.vocab);
    } else {
      {
        auto os = OpenOutput(output_path);
        WriteDecisions(os, decisions, bundle.vocab);
      }
      manifest.AddOutput(output_path);
      manifest.Write(output_path + ".manifest.json");
    }
    return 0;
  }
};

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Weakly supervised speaker identification from recording-level labels"};
  app.name("wsid");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenerateCommand generate;
  TrainCommand train;
  EvaluateCommand evaluate;
  IdentifyCommand identify;
  generate.Register(app);
  train.Register(app);
  evaluate.Register(app);
  identify.Register(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : ExitCode(ErrorKind::kUsage);
  }

  try {
    if (generate.app->parsed()) return generate.Run(out);
    if (train.app->parsed()) return train.Run(out);
    if (evaluate.app->parsed()) return evaluate.Run(out);
    if (identify.app->parsed()) return identify.Run(out);
  } catch (const Error &e) {
    err << "wsid: " << e.what() << '\n';
    return ExitCode(e.kind());
  } catch (const std::exception &e) {
    err << "wsid: " << e.what() << '\n';
    return ExitCode(ErrorKind::kData);
  }
  return ExitCode(ErrorKind::kUsage);
}

}  // namespace wsid
