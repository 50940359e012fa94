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


// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria 11 and 12 need user-supplied corpora and report SKIP
// unless DELHATE_OLID_PATH / DELHATE_HON_PATH point at them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.h"
#include "cli/run_config.h"
#include "delhate/checkpoint.h"
#include "delhate/datasets.h"
#include "delhate/ensemble.h"
#include "delhate/gradcheck.h"
#include "delhate/metrics.h"
#include "delhate/weak_supervision.h"
#include "unit/test_support.h"

namespace delhate {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

enum class Outcome { kPass, kFail, kSkip };

struct Result {
  Outcome outcome;
  std::string detail;
};

Result Check(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr const char* kTinyConfig = R"({
  "topology": {"seq_len": 8, "emb_dim": 6, "conv_filters": 2, "conv_width": 3,
               "conv_pad": 1, "pool_rate": 2, "rnn_hidden": 5, "fc_hidden": 4},
  "train": {"ensemble_size": 2, "epochs": 3, "batch_size": 8, "seed": 11,
            "jobs": 1},
  "embeddings": "synthetic:1:6"
})";

fs::path WriteHonCsv(const fs::path& path, const LabeledCorpus& corpus) {
  std::string text = ",count,class,tweet\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::string quoted = "\"";
    for (char c : corpus.posts[i].text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    text += std::to_string(i) + ",3," +
            std::to_string(Index(*corpus.posts[i].label)) + "," + quoted +
            "\"\n";
  }
  testing::WriteFile(path, text);
  return path;
}

cli::RunConfig TinyTrainConfig(const fs::path& dir, const fs::path& out) {
  cli::RunConfig c;
  cli::MergeJson(c, kTinyConfig);
  c.data.hon = WriteHonCsv(dir / "hon.csv", testing::SeparableCorpus(30, 21))
                   .string();
  c.out = out.string();
  return c;
}

// 1. Every registered gradient check within 1e-4, whole suite within 2 min.
Result GradientSuite() {
  const auto start = Clock::now();
  const GradCheckSuite suite = RunAllChecks(20260101);
  const double secs = Seconds(start);
  double worst = 0.0;
  std::string worst_name;
  for (const GradCheckReport& r : suite.reports) {
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_name = r.check;
    }
  }
  const bool ok = suite.passed && suite.missing.empty() && worst <= 1e-4 &&
                  secs <= 120.0;
  return Check(ok, Format("%zu checks, worst %.2e (%s) <= 1e-4, %.1fs <= 120s",
                          suite.reports.size(), worst, worst_name.c_str(),
                          secs));
}

// 2. Weak-loss fixtures.
Result WeakLossFixtures() {
  ClassBounds inside;
  inside.lower = {0.1, 0.0, 0.2};
  inside.upper = {0.6, 0.5, 0.9};
  const double y_in[] = {0.3, 0.2, 0.5};
  const double zero = WeakLoss(y_in, inside, {});

  ClassBounds violated;
  violated.lower = {0.5, 0.0, 0.0};
  const double y[] = {0.2, 0.5, 0.3};
  const double base = WeakLoss(y, violated, {});
  ClassWeights w;
  w.w = {4.0, 1.0, 1.0};
  const double scaled = WeakLoss(y, violated, w);
  const bool ok = zero == 0.0 && std::abs(base - 0.356675) <= 1e-6 &&
                  std::abs(scaled - 1.426700) <= 1e-6;
  return Check(ok, Format("inside=%g, violated=%.6f (0.356675 +- 1e-6), "
                          "w_H=4 -> %.6f (1.426700 +- 1e-6)",
                          zero, base, scaled));
}

// 3. Bounds stay ordered for random counts; n = 0 is vacuous.
Result BoundsInvariant() {
  Rng rng(3);
  std::size_t bad = 0, zero_n = 0, bad_vacuous = 0;
  for (int i = 0; i < 10000; ++i) {
    LexiconCounts c;
    c.n = rng.Below(50);
    if (c.n > 0) {
      c.n_hate = rng.Below(c.n + 1);
      c.n_offensive = rng.Below(c.n - c.n_hate + 1);
      c.n_positive = rng.Below(c.n - c.n_hate - c.n_offensive + 1);
    }
    const ClassBounds b = ComputeBounds(c, rng.Uniform(0.25, 6.0));
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (!(0.0 <= b.lower[k] && b.lower[k] <= b.upper[k] && b.upper[k] <= 1.0)) {
        ++bad;
        break;
      }
    }
    if (c.n == 0) {
      ++zero_n;
      const bool exact = b.lower == std::array<double, 3>{0, 0, 0} &&
                         b.upper == std::array<double, 3>{1, 1, 1};
      if (!exact) ++bad_vacuous;
    }
  }
  return Check(bad == 0 && bad_vacuous == 0 && zero_n > 0,
               Format("10000 draws, %zu ordering violations, %zu/%zu n=0 "
                      "draws not exactly vacuous",
                      bad, bad_vacuous, zero_n));
}

// 4. Balanced sampler: equal class counts every epoch; per-post inclusion
// frequency of O and N posts within 3 sigma of 1 - (1 - 1/n)^m.
Result Sampler() {
  const std::size_t h = 6, o = 20, n = 9;
  std::vector<ClassLabel> labels;
  labels.insert(labels.end(), h, ClassLabel::kHate);
  labels.insert(labels.end(), o, ClassLabel::kOffensive);
  labels.insert(labels.end(), n, ClassLabel::kNeither);
  const int epochs = 1000;
  Rng rng(MixSeed(4, 1));
  std::vector<int> included(labels.size(), 0);
  std::size_t unbalanced = 0;
  for (int e = 0; e < epochs; ++e) {
    const auto sample = BalancedEpochSample(labels, rng);
    std::array<std::size_t, 3> counts{};
    std::vector<bool> seen(labels.size(), false);
    for (std::size_t i : sample) {
      ++counts[Index(labels[i])];
      seen[i] = true;
    }
    if (counts != std::array<std::size_t, 3>{h, h, h}) ++unbalanced;
    for (std::size_t i = 0; i < labels.size(); ++i) included[i] += seen[i];
  }
  double worst_z = 0.0;
  for (std::size_t i = h; i < labels.size(); ++i) {
    const double pool = labels[i] == ClassLabel::kOffensive ? o : n;
    const double p = 1.0 - std::pow(1.0 - 1.0 / pool, double(h));
    const double sigma = std::sqrt(p * (1.0 - p) / epochs);
    worst_z = std::max(worst_z, std::abs(included[i] / double(epochs) - p) / sigma);
  }
  bool all_hate = true;
  for (std::size_t i = 0; i < h; ++i) all_hate &= included[i] == epochs;
  return Check(unbalanced == 0 && all_hate && worst_z <= 3.0,
               Format("%d epochs, %zu unbalanced, every H post each epoch: %s, "
                      "worst O/N inclusion deviation %.2f sigma <= 3",
                      epochs, unbalanced, all_hate ? "yes" : "no", worst_z));
}

// 5. Majority vote against a brute-force oracle.
Result Vote() {
  Rng rng(5);
  std::array<int, 3> stage_hits{};
  int mismatches = 0;
  for (int f = 0; f < 1000; ++f) {
    std::vector<std::array<double, 3>> probs;
    if (f % 3 == 0) {
      // Mirrored pairs tie both the votes and the summed probabilities.
      const std::size_t a = rng.Below(3), b = (a + 1 + rng.Below(2)) % 3;
      std::array<double, 3> p{};
      const std::size_t other = 3 - a - b;
      p[a] = 0.5 + 0.25 * rng.Uniform();
      p[b] = 0.5 * (1.0 - p[a]);
      p[other] = 1.0 - p[a] - p[b];
      std::array<double, 3> q = p;
      std::swap(q[a], q[b]);
      probs = {p, q};
    } else {
      probs.resize(1 + rng.Below(6));
      for (auto& p : probs) {
        const double x = double(rng.Below(4)), y = double(rng.Below(4)),
                     z = double(rng.Below(4)) + 1.0;
        p = {x / (x + y + z), y / (x + y + z), z / (x + y + z)};
      }
    }
    // Oracle.
    std::array<int, 3> votes{};
    std::array<double, 3> summed{};
    for (const auto& p : probs) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < 3; ++c) {
        if (p[c] > p[best]) best = c;
      }
      ++votes[best];
      for (std::size_t c = 0; c < 3; ++c) summed[c] += p[c];
    }
    const int top = *std::max_element(votes.begin(), votes.end());
    std::vector<std::size_t> tied;
    for (std::size_t c = 0; c < 3; ++c) {
      if (votes[c] == top) tied.push_back(c);
    }
    std::size_t expected = tied[0];
    int stage = 0;
    if (tied.size() > 1) {
      double best_sum = -1.0;
      for (std::size_t c : tied) best_sum = std::max(best_sum, summed[c]);
      std::vector<std::size_t> still;
      for (std::size_t c : tied) {
        if (summed[c] == best_sum) still.push_back(c);
      }
      expected = still[0];
      stage = still.size() > 1 ? 2 : 1;
    }
    ++stage_hits[stage];
    if (Index(MajorityVote(probs).label) != expected) ++mismatches;
  }
  const bool ok = mismatches == 0 && stage_hits[0] > 0 && stage_hits[1] > 0 &&
                  stage_hits[2] > 0;
  return Check(ok, Format("1000 fixtures, %d mismatches; decided by votes %d, "
                          "by summed probability %d, by ordinal %d",
                          mismatches, stage_hits[0], stage_hits[1],
                          stage_hits[2]));
}

// 6. Early stopping returns the argmin-validation-loss snapshot.
Result EarlyStopping() {
  const TopologyConfig topology = TopologyConfig::Tiny();
  const EmbeddingTable table = EmbeddingTable::Synthetic(6, topology.emb_dim);
  const auto train = PrepareLabeled(testing::SeparableCorpus(12, 61));
  // Validation labels are rotated one class over, so validation loss climbs
  // as the member learns and the minimum falls before the last epoch.
  LabeledCorpus rotated = testing::SeparableCorpus(5, 62);
  for (RawPost& p : rotated.posts) {
    p.label = LabelFromIndex((Index(*p.label) + 1) % kNumClasses);
  }
  const auto valid = PrepareLabeled(rotated);
  TrainConfig config;
  config.epochs = 12;
  config.batch_size = 8;
  config.base_lr = 5e-3;
  std::vector<ModelParams> snapshots;
  const MemberResult r = TrainMember(
      66, config, topology, table, train, valid,
      [&](std::size_t, const ModelParams& p, double) { snapshots.push_back(p); });
  std::vector<double> losses;
  for (const ModelParams& p : snapshots) {
    losses.push_back(ValidationLoss(p, topology, table, valid,
                                    LossMode::kSupervised, {}));
  }
  const std::size_t argmin = SelectBestEpoch(losses);
  const bool ok = snapshots.size() == config.epochs && r.best_epoch == argmin &&
                  argmin < config.epochs && r.params == snapshots[argmin - 1];
  return Check(ok, Format("%zu epoch snapshots re-evaluated, argmin epoch %zu, "
                          "returned epoch %zu, snapshot identical: %s",
                          snapshots.size(), argmin, r.best_epoch,
                          r.params == snapshots[argmin - 1] ? "yes" : "no"));
}

bool BytesEqual(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(),
                     a.size() * sizeof(double)) == 0;
}

// 7. Tuning leaves the feature group byte-identical and moves the classifier.
Result TuningFreeze(const fs::path& scratch) {
  std::ostringstream out, err;
  cli::RunConfig train = TinyTrainConfig(scratch, scratch / "base");
  if (cli::CmdTrain(train, out, err) != 0) return Check(false, "train failed");
  cli::RunConfig tune = train;
  tune.bundle = (scratch / "base").string();
  tune.data.target =
      WriteHonCsv(scratch / "target.csv", testing::SeparableCorpus(50, 71))
          .string();
  tune.out = (scratch / "tuned").string();
  if (cli::CmdTune(tune, out, err) != 0) return Check(false, "tune failed");

  const EnsembleBundle before = LoadBundle(scratch / "base");
  const EnsembleBundle after = LoadBundle(scratch / "tuned");
  std::size_t feature = 0, feature_same = 0, classifier = 0, classifier_diff = 0;
  for (std::size_t m = 0; m < before.members.size(); ++m) {
    const auto& fb = before.members[m].feature.params;
    const auto& fa = after.members[m].feature.params;
    for (std::size_t i = 0; i < fb.size(); ++i, ++feature) {
      feature_same += BytesEqual(fb[i].value, fa[i].value);
    }
    const auto& cb = before.members[m].classifier.params;
    const auto& ca = after.members[m].classifier.params;
    for (std::size_t i = 0; i < cb.size(); ++i, ++classifier) {
      classifier_diff += !BytesEqual(cb[i].value, ca[i].value);
    }
  }
  const auto target = cli::LoadLabeledAny(tune.data.target);
  const bool ok = target.size() == 150 && feature > 0 && feature_same == feature &&
                  classifier_diff == classifier;
  return Check(ok, Format("%zu-post target; feature tensors identical %zu/%zu, "
                          "classifier tensors changed %zu/%zu",
                          target.size(), feature_same, feature, classifier_diff,
                          classifier));
}

// 8. Overfit a 30-post separable corpus with the tiny topology.
Result Overfit() {
  const auto start = Clock::now();
  const TopologyConfig topology = TopologyConfig::Tiny();
  const EmbeddingTable table = EmbeddingTable::Synthetic(8, topology.emb_dim);
  const auto posts = PrepareLabeled(testing::SeparableCorpus(10, 81));
  TrainConfig config;
  config.epochs = 300;
  config.seed = 8;
  // A 30-post epoch is one Adam step at the default batch of 32; batches of
  // 8 give four steps per epoch at the default learning rate.
  config.batch_size = 8;
  std::vector<TokenMatrix> inputs;
  for (const Example& ex : posts) {
    inputs.push_back(Embed(ex.tokens, table, topology.seq_len));
  }
  std::size_t reached = 0;
  double best_acc = 0.0;
  TrainMember(config.seed, config, topology, table, posts, posts,
              [&](std::size_t epoch, const ModelParams& p, double) {
                if (reached) return;
                std::size_t correct = 0;
                for (std::size_t i = 0; i < posts.size(); ++i) {
                  correct += ArgMax(Forward(p, topology, inputs[i])) ==
                             *posts[i].label;
                }
                const double acc = double(correct) / double(posts.size());
                best_acc = std::max(best_acc, acc);
                if (acc >= 0.95) reached = epoch;
              });
  const double secs = Seconds(start);
  const std::string when =
      reached > 0 ? "at epoch " + std::to_string(reached) : "never";
  return Check(reached > 0 && secs <= 60.0,
               Format("30 posts, >= 95%% training accuracy %s (best %.3f, "
                      "limit 300 epochs), %.1fs <= 60s",
                      when.c_str(), best_acc, secs));
}

// 9. Metrics fixtures.
Result Metrics() {
  ConfusionMatrix cm;
  cm.cells = {{{8, 2, 0}, {1, 8, 1}, {0, 2, 8}}};
  const MetricsReport r = Report(cm);
  ConfusionMatrix all_n;
  for (ClassLabel t : kAllLabels) all_n.cells[Index(t)][2] = 10;
  const double micro = Report(all_n).micro_f1;
  const bool ok = std::abs(r.hate_recall - 0.8) <= 1e-6 &&
                  std::abs(r.macro_f1 - 0.803828) <= 1e-6 && micro == 1.0 / 3.0;
  return Check(ok, Format("hate_recall=%.6f, macro_f1=%.6f (0.803828 +- 1e-6), "
                          "all-N micro_f1=%.17g (exactly 1/3: %s)",
                          r.hate_recall, r.macro_f1, micro,
                          micro == 1.0 / 3.0 ? "yes" : "no"));
}

// 10. Two identical single-threaded train runs give identical artifacts.
Result Determinism(const fs::path& scratch) {
  std::ostringstream out, err;
  for (const char* name : {"a", "b"}) {
    cli::RunConfig c = TinyTrainConfig(scratch, scratch / name);
    if (cli::CmdTrain(c, out, err) != 0) return Check(false, "train failed");
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(scratch / "a")) {
    const std::string name = entry.path().filename().string();
    if (name == "config.json") continue;  // records the output directory
    ++compared;
    if (testing::ReadFile(entry.path()) !=
        testing::ReadFile(scratch / "b" / name)) {
      ++differing;
    }
  }
  return Check(compared >= 6 && differing == 0,
               Format("%zu checkpoint/report files compared, %zu differ",
                      compared, differing));
}

const char* Env(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? v : nullptr;
}

std::string Shares(const LabeledCorpus& c) {
  return Format("%.2f/%.2f/%.2f%% over %zu rows",
                100 * c.Share(ClassLabel::kHate),
                100 * c.Share(ClassLabel::kOffensive),
                100 * c.Share(ClassLabel::kNeither), c.size());
}

bool Within(const LabeledCorpus& c, std::array<double, 3> expected) {
  for (ClassLabel l : kAllLabels) {
    if (std::abs(100 * c.Share(l) - expected[Index(l)]) > 0.5) return false;
  }
  return true;
}

// 11. OLID class proportions.
Result OlidShares() {
  const char* path = Env("DELHATE_OLID_PATH");
  if (path == nullptr) return {Outcome::kSkip, "DELHATE_OLID_PATH not set"};
  const LabeledCorpus c = LoadOlid(path);
  return Check(Within(c, {8.24, 25.09, 66.67}),
               Shares(c) + " (expected 8.24/25.09/66.67 +- 0.5 pp)");
}

// 12. HON class proportions and combined H share.
Result HonShares() {
  const char* path = Env("DELHATE_HON_PATH");
  if (path == nullptr) return {Outcome::kSkip, "DELHATE_HON_PATH not set"};
  const LabeledCorpus hon = LoadHon(path);
  bool ok = Within(hon, {5.74, 77.41, 16.85});
  std::string detail = Shares(hon) + " (expected 5.74/77.41/16.85 +- 0.5 pp)";
  if (const char* olid_path = Env("DELHATE_OLID_PATH")) {
    const LabeledCorpus both[] = {hon, LoadOlid(olid_path)};
    const LabeledCorpus combined = Combine(both);
    const double h = 100 * combined.Share(ClassLabel::kHate);
    ok = ok && std::abs(h - 6.61) <= 0.5;
    detail += Format("; combined H %.2f%% (expected 6.61 +- 0.5 pp)", h);
  } else {
    detail += "; combined share not checked without DELHATE_OLID_PATH";
  }
  return Check(ok, detail);
}

int Run() {
  const fs::path scratch = testing::ScratchDir("acceptance");
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"gradient suite", GradientSuite},
      {"weak-loss fixtures", WeakLossFixtures},
      {"bounds invariant", BoundsInvariant},
      {"balanced sampler", Sampler},
      {"majority vote", Vote},
      {"early stopping", EarlyStopping},
      {"tuning freeze", [&] { return TuningFreeze(scratch / "tune"); }},
      {"overfit", Overfit},
      {"metrics", Metrics},
      {"determinism", [&] { return Determinism(scratch / "determinism"); }},
      {"OLID proportions", OlidShares},
      {"HON proportions", HonShares},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = r.outcome == Outcome::kPass   ? "PASS"
                      : r.outcome == Outcome::kSkip ? "SKIP"
                                                    : "FAIL";
    failures += r.outcome == Outcome::kFail;
    std::printf("[%02zu] %s %s: %s\n", i + 1, tag, criteria[i].first,
                r.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);
  std::printf("%s: %d failing\n", failures == 0 ? "ACCEPTED" : "REJECTED",
              failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace delhate

int main() { return delhate::Run(); }
