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


#ifndef DELHATE_ENSEMBLE_H_
#define DELHATE_ENSEMBLE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delhate/datasets.h"
#include "delhate/embedding.h"
#include "delhate/labels.h"
#include "delhate/rng.h"
#include "delhate/text_prep.h"
#include "delhate/topology.h"
#include "delhate/weak_supervision.h"

namespace delhate {

enum class LossMode { kSupervised, kWeak };

std::string LossModeName(LossMode mode);

struct TrainConfig {
  std::size_t ensemble_size = 5;
  std::size_t epochs = 20;
  std::size_t tune_epochs = 10;
  std::size_t batch_size = 32;
  double base_lr = 1e-3;
  double tune_lr = 5e-4;
  std::uint64_t seed = 0;
  LossMode loss_mode = LossMode::kSupervised;
  ClassWeights class_weights;
  // Worker threads across members; each member trains on one thread.
  std::size_t jobs = 1;

  void Validate() const;  // throws InvalidConfig
};

// A preprocessed post ready for training or evaluation.
struct Example {
  TokenSequence tokens;
  std::optional<ClassLabel> label;
  ClassBounds bounds;  // used in weak mode only
};

std::vector<Example> PrepareLabeled(const LabeledCorpus& corpus);
std::vector<Example> PrepareWeak(std::span<const RawPost> posts,
                                 const Lexicon& lexicon, double bound_scale);

// One balanced epoch: every Hate index once plus m draws with replacement
// from each of Offensive and Neither (m = number of Hate posts), shuffled.
// Throws EmptyClass when a class is absent.
std::vector<std::size_t> BalancedEpochSample(std::span<const ClassLabel> labels,
                                             Rng& rng);

// 1-based epoch with the smallest loss; ties go to the earliest epoch.
std::size_t SelectBestEpoch(std::span<const double> valid_losses);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_loss = 0.0;
  // Hate recall on the validation set (supervised mode only).
  std::optional<double> valid_hate_recall;
};

struct MemberResult {
  ModelParams params;  // snapshot from best_epoch
  std::vector<EpochRecord> trace;
  std::size_t best_epoch = 0;
};

// Called after each epoch with the parameters as they stand at its end.
using EpochObserver = std::function<void(
    std::size_t epoch, const ModelParams& params, double valid_loss)>;

// Mean validation loss: cross-entropy in supervised mode, weak loss in weak
// mode. Eval-mode forward passes.
double ValidationLoss(const ModelParams& params, const TopologyConfig& topology,
                      const EmbeddingTable& table,
                      std::span<const Example> examples, LossMode mode,
                      const ClassWeights& weights);

// Trains one member for config.epochs epochs and returns the snapshot with
// the minimum validation loss. Supervised mode draws a fresh balanced sample
// each epoch; weak mode shuffles the unlabeled pool and takes
// max(1, pool/batch) full minibatches. Throws NonFiniteValue on a NaN or
// infinite loss.
MemberResult TrainMember(std::uint64_t member_seed, const TrainConfig& config,
                         const TopologyConfig& topology,
                         const EmbeddingTable& table,
                         std::span<const Example> train,
                         std::span<const Example> valid,
                         const EpochObserver& observer = {});

struct Fingerprint {
  std::string embedding_name;
  std::size_t emb_dim = 0;
  std::size_t seq_len = 0;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

struct EnsembleBundle {
  TopologyConfig topology;
  Fingerprint fingerprint;
  std::vector<ModelParams> members;
  std::map<std::string, std::string> provenance;

  friend bool operator==(const EnsembleBundle&, const EnsembleBundle&) =
      default;
};

struct EnsembleTrainResult {
  EnsembleBundle bundle;
  std::vector<MemberResult> members;
};

// Trains config.ensemble_size independent members with seeds seed + i,
// spread over config.jobs threads.
EnsembleTrainResult TrainEnsemble(const TrainConfig& config,
                                  const TopologyConfig& topology,
                                  const EmbeddingTable& table,
                                  std::span<const Example> train,
                                  std::span<const Example> valid);

// Lowest ordinal wins ties.
ClassLabel ArgMax(const std::array<double, kNumClasses>& probs);

struct VoteResult {
  ClassLabel label = ClassLabel::kHate;
  std::vector<ClassLabel> votes;
  std::array<double, kNumClasses> summed{};
};

// Each member votes its argmax. Most votes wins; a vote tie goes to the tied
// class with the highest summed probability, then to the lowest ordinal.
VoteResult MajorityVote(
    std::span<const std::array<double, kNumClasses>> member_probs);

struct Prediction {
  ClassLabel label = ClassLabel::kHate;
  std::vector<ClassLabel> votes;
  std::vector<std::array<double, kNumClasses>> member_probs;
  std::array<double, kNumClasses> mean_probs{};
};

// Throws PreprocessingMismatch when the table dimension differs from the
// bundle fingerprint.
void CheckFingerprint(const EnsembleBundle& bundle,
                      const EmbeddingTable& table);

Prediction Predict(const EnsembleBundle& bundle, const EmbeddingTable& table,
                   const TokenSequence& tokens);
Prediction Predict(const EnsembleBundle& bundle, const EmbeddingTable& table,
                   const RawPost& post);

// Retrains the classifier head of every member on `target` for
// config.tune_epochs epochs at config.tune_lr with the feature group frozen.
// Each epoch is one shuffled pass over all target examples. A warning is
// appended when the class counts differ. Throws EmptyClass when a class is
// missing.
EnsembleBundle Tune(const EnsembleBundle& bundle, const EmbeddingTable& table,
                    std::span<const Example> target, const TrainConfig& config,
                    std::vector<std::string>* warnings = nullptr);

}  // namespace delhate

#endif  // DELHATE_ENSEMBLE_H_
