// Copyright 2026 The delhate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "run_config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "delhate/errors.h"
#include "json.hpp"

namespace delhate::cli {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) {
      throw InvalidConfig("config: '" + name_ + "' must be an object");
    }
    for (const auto& [key, value] : j_.items()) unknown_.push_back(key);
  }

  template <typename T>
  void Get(const char* key, T& target) {
    const auto it = j_.find(key);
    std::erase(unknown_, key);
    if (it == j_.end()) return;
    try {
      target = it->template get<T>();
    } catch (const json::exception&) {
      throw InvalidConfig("config: '" + name_ + "." + key +
                          "' has the wrong type");
    }
  }

  const json* Child(const char* key) {
    std::erase(unknown_, key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Finish() const {
    if (!unknown_.empty()) {
      throw InvalidConfig("config: unknown key '" +
                          (name_.empty() ? "" : name_ + ".") + unknown_.front() +
                          "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::vector<std::string> unknown_;
};

void MergeTopology(TopologyConfig& t, const json& j) {
  Section s(j, "topology");
  std::string variant = VariantName(t.variant);
  std::string rnn = RnnKindName(t.rnn);
  std::string axis = ConvAxisName(t.conv_axis);
  s.Get("variant", variant);
  s.Get("rnn", rnn);
  s.Get("conv_axis", axis);
  t.variant = ParseVariant(variant);
  t.rnn = ParseRnnKind(rnn);
  t.conv_axis = ParseConvAxis(axis);
  s.Get("seq_len", t.seq_len);
  s.Get("emb_dim", t.emb_dim);
  s.Get("conv_filters", t.conv_filters);
  s.Get("conv_width", t.conv_width);
  s.Get("conv_pad", t.conv_pad);
  s.Get("pool_rate", t.pool_rate);
  s.Get("rnn_hidden", t.rnn_hidden);
  s.Get("fc_hidden", t.fc_hidden);
  s.Get("dropout", t.dropout);
  s.Get("n_classes", t.n_classes);
  s.Finish();
}

void MergeTrain(RunConfig& c, const json& j) {
  Section s(j, "train");
  TrainConfig& t = c.train;
  s.Get("ensemble_size", t.ensemble_size);
  s.Get("epochs", t.epochs);
  s.Get("tune_epochs", t.tune_epochs);
  s.Get("batch_size", t.batch_size);
  s.Get("base_lr", t.base_lr);
  s.Get("tune_lr", t.tune_lr);
  s.Get("seed", t.seed);
  s.Get("jobs", t.jobs);
  s.Get("trials", c.trials);
  s.Get("class_weights", c.class_weights);
  s.Finish();
}

void MergeSplit(SplitSpec& sp, const json& j) {
  Section s(j, "split");
  s.Get("seed", sp.seed);
  s.Get("train", sp.train);
  s.Get("valid", sp.valid);
  s.Get("test", sp.test);
  s.Get("stratified", sp.stratified);
  s.Finish();
}

void MergeData(DataPaths& d, const json& j) {
  Section s(j, "data");
  s.Get("hon", d.hon);
  s.Get("olid", d.olid);
  s.Get("gab", d.gab);
  s.Get("unlabeled", d.unlabeled);
  s.Get("eval", d.eval);
  s.Get("target", d.target);
  s.Get("input", d.input);
  s.Finish();
}

void MergeLexicon(LexiconPaths& l, const json& j) {
  Section s(j, "lexicon");
  s.Get("hate", l.hate);
  s.Get("offensive", l.offensive);
  s.Get("positive", l.positive);
  s.Get("bound_scale", l.bound_scale);
  s.Finish();
}

}  // namespace

void MergeJson(RunConfig& config, std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  Section root(j, "");
  if (const json* t = root.Child("topology")) MergeTopology(config.topology, *t);
  if (const json* t = root.Child("train")) MergeTrain(config, *t);
  if (const json* t = root.Child("split")) MergeSplit(config.split, *t);
  if (const json* t = root.Child("data")) MergeData(config.data, *t);
  if (const json* t = root.Child("lexicon")) MergeLexicon(config.lexicon, *t);
  root.Get("embeddings", config.embeddings);
  root.Get("out", config.out);
  root.Get("bundle", config.bundle);
  root.Finish();
}

void MergeJsonFile(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  MergeJson(config, ss.str());
}

std::string ToJson(const RunConfig& c) {
  const TopologyConfig& t = c.topology;
  json j = {
      {"topology",
       {{"variant", VariantName(t.variant)},
        {"rnn", RnnKindName(t.rnn)},
        {"conv_axis", ConvAxisName(t.conv_axis)},
        {"seq_len", t.seq_len},
        {"emb_dim", t.emb_dim},
        {"conv_filters", t.conv_filters},
        {"conv_width", t.conv_width},
        {"conv_pad", t.conv_pad},
        {"pool_rate", t.pool_rate},
        {"rnn_hidden", t.rnn_hidden},
        {"fc_hidden", t.fc_hidden},
        {"dropout", t.dropout},
        {"n_classes", t.n_classes}}},
      {"train",
       {{"ensemble_size", c.train.ensemble_size},
        {"epochs", c.train.epochs},
        {"tune_epochs", c.train.tune_epochs},
        {"batch_size", c.train.batch_size},
        {"base_lr", c.train.base_lr},
        {"tune_lr", c.train.tune_lr},
        {"seed", c.train.seed},
        {"jobs", c.train.jobs},
        {"trials", c.trials},
        {"class_weights", c.class_weights}}},
      {"split",
       {{"seed", c.split.seed},
        {"train", c.split.train},
        {"valid", c.split.valid},
        {"test", c.split.test},
        {"stratified", c.split.stratified}}},
      {"data",
       {{"hon", c.data.hon},
        {"olid", c.data.olid},
        {"gab", c.data.gab},
        {"unlabeled", c.data.unlabeled},
        {"eval", c.data.eval},
        {"target", c.data.target},
        {"input", c.data.input}}},
      {"lexicon",
       {{"hate", c.lexicon.hate},
        {"offensive", c.lexicon.offensive},
        {"positive", c.lexicon.positive},
        {"bound_scale", c.lexicon.bound_scale}}},
      {"embeddings", c.embeddings},
      {"out", c.out},
      {"bundle", c.bundle},
  };
  return j.dump(2) + "\n";
}

ClassWeights ParseClassWeights(std::string_view spec,
                               const WeakLabelStats* stats) {
  if (spec.empty() || spec == "uniform") return ClassWeights{};
  if (spec == "imbalance") {
    if (stats == nullptr) {
      throw InvalidConfig("class weights 'imbalance' need a weak-label pool");
    }
    return ImbalanceWeights(*stats);
  }
  ClassWeights w;
  std::size_t c = 0;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string_view part =
        spec.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                           : comma - start);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (c >= kNumClasses || ec != std::errc() ||
        ptr != part.data() + part.size() || !(value > 0.0)) {
      throw InvalidConfig("class weights must be 'uniform', 'imbalance' or "
                          "three positive numbers 'wH,wO,wN'");
    }
    w.w[c++] = value;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (c != kNumClasses) {
    throw InvalidConfig("class weights need exactly three values");
  }
  return w;
}

LabeledCorpus LoadLabeledAny(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return LoadHon(path);
  if (ext == ".tsv") return LoadOlid(path);
  return LoadLabeledLines(path);
}

}  // namespace delhate::cli
