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


#include "delhate/ensemble.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "delhate/errors.h"
#include "delhate/graph.h"
#include "delhate/layers.h"
#include "delhate/metrics.h"
#include "delhate/optimizer.h"

namespace delhate {

std::string LossModeName(LossMode mode) {
  return mode == LossMode::kSupervised ? "supervised" : "weak";
}

void TrainConfig::Validate() const {
  if (ensemble_size < 1) throw InvalidConfig("ensemble_size must be >= 1");
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (jobs < 1) throw InvalidConfig("jobs must be >= 1");
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) {
    throw InvalidConfig("base learning rate must be positive");
  }
  if (!(tune_lr > 0.0) || !std::isfinite(tune_lr)) {
    throw InvalidConfig("tune learning rate must be positive");
  }
  for (double w : class_weights.w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidConfig("class weights must be positive");
    }
  }
}

std::vector<Example> PrepareLabeled(const LabeledCorpus& corpus) {
  std::vector<Example> out;
  out.reserve(corpus.size());
  for (const RawPost& post : corpus.posts) {
    out.push_back(Example{Preprocess(post), post.label, {}});
  }
  return out;
}

std::vector<Example> PrepareWeak(std::span<const RawPost> posts,
                                 const Lexicon& lexicon, double bound_scale) {
  std::vector<Example> out;
  out.reserve(posts.size());
  for (const RawPost& post : posts) {
    Example ex{Preprocess(post), post.label, {}};
    ex.bounds = ComputeBounds(CountLexicon(ex.tokens, lexicon), bound_scale);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<std::size_t> BalancedEpochSample(std::span<const ClassLabel> labels,
                                             Rng& rng) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[Index(labels[i])].push_back(i);
  }
  for (ClassLabel c : kAllLabels) {
    if (by_class[Index(c)].empty()) {
      throw EmptyClass("training set has no " + std::string(LabelName(c)) +
                       " posts");
    }
  }
  const std::size_t m = by_class[Index(ClassLabel::kHate)].size();
  std::vector<std::size_t> sample = by_class[Index(ClassLabel::kHate)];
  sample.reserve(3 * m);
  for (ClassLabel c : {ClassLabel::kOffensive, ClassLabel::kNeither}) {
    const auto& pool = by_class[Index(c)];
    for (std::size_t k = 0; k < m; ++k) {
      sample.push_back(pool[rng.Below(pool.size())]);
    }
  }
  rng.Shuffle(std::span<std::size_t>(sample));
  return sample;
}

std::size_t SelectBestEpoch(std::span<const double> valid_losses) {
  if (valid_losses.empty()) throw InvalidConfig("empty validation trace");
  std::size_t best = 0;
  for (std::size_t i = 1; i < valid_losses.size(); ++i) {
    if (valid_losses[i] < valid_losses[best]) best = i;
  }
  return best + 1;
}

namespace {

double ExampleLoss(Graph& g, Var probs, const Example& ex, LossMode mode,
                   const ClassWeights& weights, Var* loss_out) {
  Var loss;
  if (mode == LossMode::kSupervised) {
    if (!ex.label) throw InvalidConfig("supervised example without label");
    loss = CrossEntropy(g, probs, Index(*ex.label));
  } else {
    loss = WeakLossNode(g, probs, ex.bounds, weights);
  }
  if (loss_out) *loss_out = loss;
  return g.value(loss)[0];
}

void RequireFinite(double v, const char* what, std::size_t epoch) {
  if (!std::isfinite(v)) {
    throw NonFiniteValue(std::string(what) + " is not finite at epoch " +
                         std::to_string(epoch));
  }
}

// One minibatch: mean loss over `batch`, gradients into params, one Adam step.
double MinibatchStep(ModelParams& params, const TopologyConfig& topology,
                     const EmbeddingTable& table,
                     std::span<const Example> examples,
                     std::span<const std::size_t> batch, LossMode mode,
                     const ClassWeights& weights, Adam& adam, Rng& rng,
                     std::size_t epoch) {
  params.ZeroGrad();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t idx : batch) {
    const Example& ex = examples[idx];
    const TokenMatrix input = Embed(ex.tokens, table, topology.seq_len);
    Graph g;
    const Var probs =
        ForwardGraph(g, params, topology, input, Mode::kTrain, &rng, &params);
    Var loss;
    const double value = ExampleLoss(g, probs, ex, mode, weights, &loss);
    RequireFinite(value, "training loss", epoch);
    total += value;
    g.Backward(loss, scale);
  }
  auto groups = params.groups();
  adam.Step(std::span<ParamGroup* const>(groups.data(), groups.size()));
  return total;
}

std::vector<std::vector<std::size_t>> Batches(std::vector<std::size_t> order,
                                              std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    out.emplace_back(order.begin() + start, order.begin() + end);
  }
  return out;
}

}  // namespace

double ValidationLoss(const ModelParams& params, const TopologyConfig& topology,
                      const EmbeddingTable& table,
                      std::span<const Example> examples, LossMode mode,
                      const ClassWeights& weights) {
  if (examples.empty()) throw InvalidConfig("validation set is empty");
  double total = 0.0;
  for (const Example& ex : examples) {
    const TokenMatrix input = Embed(ex.tokens, table, topology.seq_len);
    Graph g;
    const Var probs =
        ForwardGraph(g, params, topology, input, Mode::kEval, nullptr, nullptr);
    total += ExampleLoss(g, probs, ex, mode, weights, nullptr);
  }
  return total / static_cast<double>(examples.size());
}

namespace {

double ValidHateRecall(const ModelParams& params,
                       const TopologyConfig& topology,
                       const EmbeddingTable& table,
                       std::span<const Example> examples) {
  ConfusionMatrix cm;
  for (const Example& ex : examples) {
    if (!ex.label) continue;
    const auto probs =
        Forward(params, topology, Embed(ex.tokens, table, topology.seq_len));
    cm.Add(*ex.label, ArgMax(probs));
  }
  return Report(cm).hate_recall;
}

}  // namespace

MemberResult TrainMember(std::uint64_t member_seed, const TrainConfig& config,
                         const TopologyConfig& topology,
                         const EmbeddingTable& table,
                         std::span<const Example> train,
                         std::span<const Example> valid,
                         const EpochObserver& observer) {
  config.Validate();
  topology.Validate();
  if (valid.empty()) throw InvalidConfig("validation set is empty");
  if (train.empty()) throw InvalidConfig("training set is empty");

  ModelParams params = BuildModel(topology, member_seed);
  Rng rng(MixSeed(member_seed, 1));
  Adam adam(AdamOptions{.learning_rate = config.base_lr});

  std::vector<ClassLabel> labels;
  if (config.loss_mode == LossMode::kSupervised) {
    labels.reserve(train.size());
    for (const Example& ex : train) {
      if (!ex.label) throw InvalidConfig("supervised example without label");
      labels.push_back(*ex.label);
    }
  }

  MemberResult result;
  double best_loss = 0.0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::vector<std::size_t>> batches;
    if (config.loss_mode == LossMode::kSupervised) {
      batches = Batches(BalancedEpochSample(labels, rng), config.batch_size);
    } else {
      std::vector<std::size_t> order(train.size());
      std::iota(order.begin(), order.end(), 0);
      rng.Shuffle(std::span<std::size_t>(order));
      // pool/batch full batches without replacement; a pool smaller than one
      // batch becomes a single batch.
      const std::size_t n_batches =
          std::max<std::size_t>(1, train.size() / config.batch_size);
      order.resize(std::min(order.size(), n_batches * config.batch_size));
      batches = Batches(std::move(order), config.batch_size);
    }
    double train_total = 0.0;
    std::size_t seen = 0;
    for (const auto& batch : batches) {
      train_total += MinibatchStep(params, topology, table, train, batch,
                                   config.loss_mode, config.class_weights,
                                   adam, rng, epoch);
      seen += batch.size();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_total / static_cast<double>(std::max<std::size_t>(seen, 1));
    rec.valid_loss = ValidationLoss(params, topology, table, valid,
                                    config.loss_mode, config.class_weights);
    RequireFinite(rec.valid_loss, "validation loss", epoch);
    if (config.loss_mode == LossMode::kSupervised) {
      rec.valid_hate_recall = ValidHateRecall(params, topology, table, valid);
    }
    if (observer) observer(epoch, params, rec.valid_loss);
    if (epoch == 1 || rec.valid_loss < best_loss) {
      best_loss = rec.valid_loss;
      result.params = params;
      result.best_epoch = epoch;
    }
    result.trace.push_back(rec);
  }
  return result;
}

EnsembleTrainResult TrainEnsemble(const TrainConfig& config,
                                  const TopologyConfig& topology,
                                  const EmbeddingTable& table,
                                  std::span<const Example> train,
                                  std::span<const Example> valid) {
  config.Validate();
  topology.Validate();
  if (table.dim() != topology.emb_dim) {
    throw PreprocessingMismatch(
        "embedding dim " + std::to_string(table.dim()) +
        " does not match topology emb_dim " + std::to_string(topology.emb_dim));
  }
  const std::size_t k = config.ensemble_size;
  std::vector<MemberResult> members(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < k; i = next++) {
      try {
        members[i] =
            TrainMember(config.seed + i, config, topology, table, train, valid);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(config.jobs, k);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EnsembleTrainResult out;
  out.bundle.topology = topology;
  out.bundle.fingerprint = {table.name(), table.dim(), topology.seq_len};
  auto& prov = out.bundle.provenance;
  prov["loss_mode"] = LossModeName(config.loss_mode);
  prov["seed"] = std::to_string(config.seed);
  prov["ensemble_size"] = std::to_string(k);
  prov["epochs"] = std::to_string(config.epochs);
  prov["batch_size"] = std::to_string(config.batch_size);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", config.base_lr);
  prov["base_lr"] = buf;
  prov["train_examples"] = std::to_string(train.size());
  prov["valid_examples"] = std::to_string(valid.size());
  std::string best;
  for (const MemberResult& m : members) {
    if (!best.empty()) best += ",";
    best += std::to_string(m.best_epoch);
    out.bundle.members.push_back(m.params);
  }
  prov["best_epochs"] = best;
  out.members = std::move(members);
  return out;
}

ClassLabel ArgMax(const std::array<double, kNumClasses>& probs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return LabelFromIndex(best);
}

VoteResult MajorityVote(
    std::span<const std::array<double, kNumClasses>> member_probs) {
  if (member_probs.empty()) throw InvalidConfig("no ensemble members");
  VoteResult r;
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& p : member_probs) {
    const ClassLabel vote = ArgMax(p);
    r.votes.push_back(vote);
    ++counts[Index(vote)];
    for (std::size_t c = 0; c < kNumClasses; ++c) r.summed[c] += p[c];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] > counts[best] ||
        (counts[c] == counts[best] && r.summed[c] > r.summed[best])) {
      best = c;
    }
  }
  r.label = LabelFromIndex(best);
  return r;
}

void CheckFingerprint(const EnsembleBundle& bundle,
                      const EmbeddingTable& table) {
  if (table.dim() != bundle.fingerprint.emb_dim) {
    throw PreprocessingMismatch(
        "embedding dim " + std::to_string(table.dim()) +
        " does not match bundle dim " +
        std::to_string(bundle.fingerprint.emb_dim));
  }
  if (bundle.topology.seq_len != bundle.fingerprint.seq_len) {
    throw PreprocessingMismatch("bundle sequence length is inconsistent");
  }
}

Prediction Predict(const EnsembleBundle& bundle, const EmbeddingTable& table,
                   const TokenSequence& tokens) {
  CheckFingerprint(bundle, table);
  const TokenMatrix input = Embed(tokens, table, bundle.topology.seq_len);
  Prediction p;
  for (const ModelParams& member : bundle.members) {
    p.member_probs.push_back(Forward(member, bundle.topology, input));
  }
  const VoteResult vote = MajorityVote(p.member_probs);
  p.label = vote.label;
  p.votes = vote.votes;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    p.mean_probs[c] =
        vote.summed[c] / static_cast<double>(bundle.members.size());
  }
  return p;
}

Prediction Predict(const EnsembleBundle& bundle, const EmbeddingTable& table,
                   const RawPost& post) {
  return Predict(bundle, table, Preprocess(post));
}

EnsembleBundle Tune(const EnsembleBundle& bundle, const EmbeddingTable& table,
                    std::span<const Example> target, const TrainConfig& config,
                    std::vector<std::string>* warnings) {
  config.Validate();
  CheckFingerprint(bundle, table);
  std::array<std::size_t, kNumClasses> counts{};
  for (const Example& ex : target) {
    if (!ex.label) throw InvalidConfig("tuning example without label");
    ++counts[Index(*ex.label)];
  }
  for (ClassLabel c : kAllLabels) {
    if (counts[Index(c)] == 0) {
      throw EmptyClass("tuning set has no " + std::string(LabelName(c)) +
                       " posts");
    }
  }
  if (warnings && !(counts[0] == counts[1] && counts[1] == counts[2])) {
    warnings->push_back("tuning set is unbalanced: H=" +
                        std::to_string(counts[0]) +
                        " O=" + std::to_string(counts[1]) +
                        " N=" + std::to_string(counts[2]));
  }

  EnsembleBundle out = bundle;
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    ModelParams& params = out.members[i];
    const bool feature_trainable = params.feature.trainable;
    params.feature.trainable = false;
    params.classifier.trainable = true;
    Adam adam(AdamOptions{.learning_rate = config.tune_lr});
    Rng rng(MixSeed(config.seed + i, 2));
    std::vector<std::size_t> order(target.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 1; epoch <= config.tune_epochs; ++epoch) {
      rng.Shuffle(std::span<std::size_t>(order));
      for (const auto& batch : Batches(order, config.batch_size)) {
        MinibatchStep(params, bundle.topology, table, target, batch,
                      LossMode::kSupervised, config.class_weights, adam, rng,
                      epoch);
      }
    }
    params.feature.trainable = feature_trainable;
    params.ZeroGrad();
  }
  out.provenance["tuned"] = "true";
  out.provenance["tune_epochs"] = std::to_string(config.tune_epochs);
  out.provenance["tune_examples"] = std::to_string(target.size());
  return out;
}

}  // namespace delhate
