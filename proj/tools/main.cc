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


#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.h"
#include "cli/run_config.h"
#include "delhate/errors.h"

namespace {

using delhate::cli::RunConfig;

// Flag values; only the ones given override the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> hon, olid, gab, unlabeled, eval, target, input;
  std::optional<std::string> embeddings, out, bundle;
  std::optional<std::string> lex_hate, lex_offensive, lex_positive;
  std::optional<std::string> class_weights;
  std::optional<double> bound_scale, lr, tune_lr;
  std::optional<std::string> variant, rnn, conv_axis;
  std::optional<std::size_t> emb_dim, seq_len, ensemble_size, epochs,
      tune_epochs, batch_size, trials, jobs;
  std::optional<std::uint64_t> seed, split_seed;
  std::string layer;
  bool all = false;
};

void AddTopologyFlags(CLI::App* app, Overrides& o) {
  app->add_option("--variant", o.variant, "cnn_rnn_fc or cnn_fc");
  app->add_option("--rnn", o.rnn, "gru or lstm");
  app->add_option("--conv-axis", o.conv_axis, "sequence or embedding");
  app->add_option("--seq-len", o.seq_len, "Tokens per post (L)");
}

void AddTrainFlags(CLI::App* app, Overrides& o) {
  app->add_option("--embeddings", o.embeddings,
                  "Vector file or synthetic:<seed>:<dim>");
  app->add_option("--emb-dim", o.emb_dim, "Dimension of the vector file");
  app->add_option("--ensemble-size", o.ensemble_size, "Members (K)");
  app->add_option("--epochs", o.epochs, "Training epochs per member");
  app->add_option("--batch-size", o.batch_size, "Minibatch size");
  app->add_option("--lr", o.lr, "Adam learning rate");
  app->add_option("--seed", o.seed, "Base seed; member i uses seed+i");
  app->add_option("--split-seed", o.split_seed, "Seed of the data split");
  app->add_option("--trials", o.trials, "Repeat with seeds seed+1000*t");
  app->add_option("--jobs", o.jobs, "Members trained in parallel");
  app->add_option("--class-weights", o.class_weights,
                  "uniform, imbalance or wH,wO,wN");
  app->add_option("--out", o.out, "Output directory");
  AddTopologyFlags(app, o);
}

template <typename T>
void Apply(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

RunConfig Resolve(const Overrides& o) {
  RunConfig c;
  if (!o.config_path.empty()) delhate::cli::MergeJsonFile(c, o.config_path);
  Apply(o.hon, c.data.hon);
  Apply(o.olid, c.data.olid);
  Apply(o.gab, c.data.gab);
  Apply(o.unlabeled, c.data.unlabeled);
  Apply(o.eval, c.data.eval);
  Apply(o.target, c.data.target);
  Apply(o.input, c.data.input);
  Apply(o.embeddings, c.embeddings);
  Apply(o.out, c.out);
  Apply(o.bundle, c.bundle);
  Apply(o.lex_hate, c.lexicon.hate);
  Apply(o.lex_offensive, c.lexicon.offensive);
  Apply(o.lex_positive, c.lexicon.positive);
  Apply(o.bound_scale, c.lexicon.bound_scale);
  Apply(o.class_weights, c.class_weights);
  Apply(o.lr, c.train.base_lr);
  Apply(o.tune_lr, c.train.tune_lr);
  Apply(o.emb_dim, c.topology.emb_dim);
  Apply(o.seq_len, c.topology.seq_len);
  Apply(o.ensemble_size, c.train.ensemble_size);
  Apply(o.epochs, c.train.epochs);
  Apply(o.tune_epochs, c.train.tune_epochs);
  Apply(o.batch_size, c.train.batch_size);
  Apply(o.trials, c.trials);
  Apply(o.jobs, c.train.jobs);
  Apply(o.seed, c.train.seed);
  Apply(o.split_seed, c.split.seed);
  if (o.variant) c.topology.variant = delhate::ParseVariant(*o.variant);
  if (o.rnn) c.topology.rnn = delhate::ParseRnnKind(*o.rnn);
  if (o.conv_axis) c.topology.conv_axis = delhate::ParseConvAxis(*o.conv_axis);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hate speech detection with CNN-RNN ensembles"};
  app.require_subcommand(1);
  // Lets --config appear after the subcommand name as well.
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON run config")
      ->check(CLI::ExistingFile);

  CLI::App* train = app.add_subcommand("train", "Supervised ensemble training");
  train->add_option("--hon", o.hon, "HON-format CSV");
  train->add_option("--olid", o.olid, "OLID-format TSV");
  train->add_option("--gab", o.gab, "Labeled lines '<code>\\t<text>'");
  AddTrainFlags(train, o);

  CLI::App* weak = app.add_subcommand("weak-train", "Lexicon weak supervision");
  weak->add_option("--unlabeled", o.unlabeled, "One post per line");
  weak->add_option("--lex-hate", o.lex_hate, "Hate lexicon");
  weak->add_option("--lex-offensive", o.lex_offensive, "Offensive lexicon");
  weak->add_option("--lex-positive", o.lex_positive, "Positive lexicon");
  weak->add_option("--bound-scale", o.bound_scale, "Bound scale k");
  weak->add_option("--eval", o.eval, "Labeled evaluation file");
  AddTrainFlags(weak, o);

  CLI::App* tune = app.add_subcommand("tune", "Retrain classifier heads");
  tune->add_option("--bundle", o.bundle, "Trained bundle directory");
  tune->add_option("--target", o.target, "Labeled tuning set");
  tune->add_option("--eval", o.eval, "Labeled evaluation file");
  tune->add_option("--embeddings", o.embeddings, "Embedding source");
  tune->add_option("--epochs", o.tune_epochs, "Tuning epochs");
  tune->add_option("--lr", o.tune_lr, "Tuning learning rate");
  tune->add_option("--batch-size", o.batch_size, "Minibatch size");
  tune->add_option("--seed", o.seed, "Seed for tuning order and dropout");
  tune->add_option("--out", o.out, "Output directory for the tuned bundle");

  CLI::App* predict = app.add_subcommand("predict", "Label posts");
  predict->add_option("--bundle", o.bundle, "Bundle directory");
  predict->add_option("--input", o.input, "One post per line");
  predict->add_option("--embeddings", o.embeddings, "Embedding source");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Metrics on labeled data");
  evaluate->add_option("--bundle", o.bundle, "Bundle directory");
  evaluate->add_option("--input", o.input, "Labeled file (.csv, .tsv or lines)");
  evaluate->add_option("--embeddings", o.embeddings, "Embedding source");
  evaluate->add_option("--out", o.out, "Also write report files here");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference checks");
  gradcheck->add_option("--layer", o.layer, "Single registered check");
  gradcheck->add_flag("--all", o.all, "Every registered check");
  gradcheck->add_option("--seed", o.seed, "Sampling seed");

  CLI::App* preprocess = app.add_subcommand("preprocess", "Dump token sequences");
  preprocess->add_option("--input", o.input, "One post per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : delhate::ExitCodeFor(delhate::ErrorCategory::kUsage);
  }

  try {
    const RunConfig config = Resolve(o);
    if (*train) return delhate::cli::CmdTrain(config, std::cout, std::cerr);
    if (*weak) return delhate::cli::CmdWeakTrain(config, std::cout, std::cerr);
    if (*tune) return delhate::cli::CmdTune(config, std::cout, std::cerr);
    if (*predict) return delhate::cli::CmdPredict(config, std::cout, std::cerr);
    if (*evaluate) return delhate::cli::CmdEvaluate(config, std::cout, std::cerr);
    if (*gradcheck) {
      return delhate::cli::CmdGradcheck(config, o.layer, o.all, std::cout,
                                        std::cerr);
    }
    if (*preprocess) {
      return delhate::cli::CmdPreprocess(config, std::cout, std::cerr);
    }
  } catch (const delhate::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return delhate::ExitCodeFor(e.category());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return delhate::ExitCodeFor(delhate::ErrorCategory::kInternal);
  }
  return delhate::ExitCodeFor(delhate::ErrorCategory::kInternal);
}
