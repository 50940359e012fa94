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


#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "delhate/checkpoint.h"
#include "delhate/errors.h"
#include "delhate/gradcheck.h"
#include "delhate/metrics.h"
#include "delhate/rng.h"
#include "json.hpp"

namespace delhate::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

bool IsSyntheticSource(std::string_view source) {
  return source.starts_with("synthetic:");
}

// Opens the embedding table. A synthetic source decides emb_dim; a vector
// file is read at config.topology.emb_dim.
EmbeddingTable OpenTable(RunConfig& config, std::ostream& err) {
  if (config.embeddings.empty()) {
    throw InvalidConfig("--embeddings is required (a vector file or "
                        "synthetic:<seed>:<dim>)");
  }
  TableLoadReport report;
  EmbeddingTable table =
      OpenEmbeddings(config.embeddings, config.topology.emb_dim, &report);
  if (table.synthetic()) {
    config.topology.emb_dim = table.dim();
  } else {
    err << "embeddings: loaded " << report.loaded << " vectors";
    if (report.skipped) err << ", skipped " << report.skipped << " malformed";
    if (report.duplicates) err << ", ignored " << report.duplicates << " duplicates";
    err << "\n";
  }
  return table;
}

// Embeddings for a saved bundle: the flag when given, else the synthetic
// table recorded in the fingerprint.
EmbeddingTable OpenBundleTable(RunConfig& config, const EnsembleBundle& bundle,
                               std::ostream& err) {
  if (config.embeddings.empty()) {
    if (!IsSyntheticSource(bundle.fingerprint.embedding_name)) {
      throw InvalidConfig("bundle was trained on '" +
                          bundle.fingerprint.embedding_name +
                          "'; pass it with --embeddings");
    }
    config.embeddings = bundle.fingerprint.embedding_name;
  }
  config.topology.emb_dim = bundle.fingerprint.emb_dim;
  EmbeddingTable table = OpenTable(config, err);
  CheckFingerprint(bundle, table);
  return table;
}

void ReportIssues(const LabeledCorpus& corpus, std::ostream& err) {
  if (corpus.issues.empty()) return;
  err << corpus.provenance << ": skipped " << corpus.issues.size()
      << " unparseable rows (first at line " << corpus.issues.front().row
      << ": " << corpus.issues.front().message << ")\n";
}

LabeledCorpus LoadTrainingCorpus(const RunConfig& config, std::ostream& err) {
  std::vector<LabeledCorpus> parts;
  if (!config.data.hon.empty()) parts.push_back(LoadHon(config.data.hon));
  if (!config.data.olid.empty()) parts.push_back(LoadOlid(config.data.olid));
  if (!config.data.gab.empty()) parts.push_back(LoadLabeledLines(config.data.gab));
  if (parts.empty()) {
    throw InvalidConfig("train needs at least one of --hon, --olid, --gab");
  }
  for (const LabeledCorpus& c : parts) ReportIssues(c, err);
  LabeledCorpus combined = Combine(parts);
  if (combined.empty()) throw EmptyTable("no labeled posts were loaded");
  return combined;
}

ConfusionMatrix EvaluateBundle(const EnsembleBundle& bundle,
                               const EmbeddingTable& table,
                               std::span<const Example> examples) {
  ConfusionMatrix cm;
  for (const Example& ex : examples) {
    if (!ex.label) continue;
    cm.Add(*ex.label, Predict(bundle, table, ex.tokens).label);
  }
  return cm;
}

ordered_json MetricsJson(const ConfusionMatrix& cm) {
  const MetricsReport r = Report(cm);
  ordered_json classes = ordered_json::object();
  for (ClassLabel label : kAllLabels) {
    const std::size_t c = Index(label);
    classes[std::string(LabelName(label))] = {{"precision", r.precision[c]},
                                              {"recall", r.recall[c]},
                                              {"f1", r.f1[c]},
                                              {"support", r.support[c]}};
  }
  ordered_json confusion = ordered_json::array();
  for (const auto& row : cm.cells) {
    confusion.push_back(ordered_json(std::vector<std::uint64_t>(row.begin(), row.end())));
  }
  return {{"total", r.total},
          {"hate_recall", r.hate_recall},
          {"macro_f1", r.macro_f1},
          {"micro_f1", r.micro_f1},
          {"classes", classes},
          {"confusion", confusion}};
}

// Prefixes every line of a key=value block.
std::string Prefixed(const std::string& prefix, const std::string& block) {
  std::string out;
  std::size_t start = 0;
  while (start < block.size()) {
    const std::size_t nl = block.find('\n', start);
    out += prefix + block.substr(start, nl - start) + "\n";
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void WriteTelemetry(const fs::path& path,
                    const std::vector<MemberResult>& members) {
  std::string text;
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (const EpochRecord& rec : members[m].trace) {
      ordered_json train = {{"member", m},
                            {"epoch", rec.epoch},
                            {"split", "train"},
                            {"loss", rec.train_loss}};
      ordered_json valid = {{"member", m},
                            {"epoch", rec.epoch},
                            {"split", "valid"},
                            {"loss", rec.valid_loss}};
      if (rec.valid_hate_recall) valid["hate_recall"] = *rec.valid_hate_recall;
      text += train.dump() + "\n" + valid.dump() + "\n";
    }
    ordered_json best = {{"member", m},
                         {"event", "early_stop"},
                         {"best_epoch", members[m].best_epoch}};
    text += best.dump() + "\n";
  }
  WriteText(path, text);
}

std::string BestEpochs(const std::vector<MemberResult>& members) {
  std::string s;
  for (const MemberResult& m : members) {
    if (!s.empty()) s += ",";
    s += std::to_string(m.best_epoch);
  }
  return s;
}

fs::path OutDir(const RunConfig& config) {
  return config.out.empty() ? fs::path("run") : fs::path(config.out);
}

fs::path TrialDir(const RunConfig& config, std::size_t trial) {
  return config.trials == 1 ? OutDir(config)
                            : OutDir(config) / ("trial_" + std::to_string(trial));
}

std::uint64_t TrialSeed(const RunConfig& config, std::size_t trial) {
  return config.train.seed + 1000 * static_cast<std::uint64_t>(trial);
}

// Mean metrics over trials, written to <out>/report.{txt,json}.
void WriteTrialMean(const RunConfig& config, const std::string& command,
                    const std::vector<ConfusionMatrix>& cms) {
  double hate = 0, macro = 0, micro = 0;
  std::array<double, kNumClasses> f1{};
  for (const ConfusionMatrix& cm : cms) {
    const MetricsReport r = Report(cm);
    hate += r.hate_recall;
    macro += r.macro_f1;
    micro += r.micro_f1;
    for (std::size_t c = 0; c < kNumClasses; ++c) f1[c] += r.f1[c];
  }
  const double n = static_cast<double>(cms.size());
  std::string text = "command=" + command + "\n" +
                     "trials=" + std::to_string(cms.size()) + "\n" +
                     "mean_hate_recall=" + FormatDouble(hate / n) + "\n" +
                     "mean_macro_f1=" + FormatDouble(macro / n) + "\n" +
                     "mean_micro_f1=" + FormatDouble(micro / n) + "\n";
  ordered_json j = {{"command", command},
                    {"trials", cms.size()},
                    {"mean_hate_recall", hate / n},
                    {"mean_macro_f1", macro / n},
                    {"mean_micro_f1", micro / n}};
  for (ClassLabel label : kAllLabels) {
    const std::string name(LabelName(label));
    text += "mean_f1_" + name + "=" + FormatDouble(f1[Index(label)] / n) + "\n";
    j["mean_f1_" + name] = f1[Index(label)] / n;
  }
  WriteText(OutDir(config) / "report.txt", text);
  WriteText(OutDir(config) / "report.json", j.dump(2) + "\n");
}

}  // namespace

int CmdTrain(RunConfig config, std::ostream& out, std::ostream& err) {
  config.train.loss_mode = LossMode::kSupervised;
  config.train.class_weights = ParseClassWeights(config.class_weights, nullptr);
  if (config.trials < 1) throw InvalidConfig("trials must be >= 1");
  const LabeledCorpus corpus = LoadTrainingCorpus(config, err);
  const EmbeddingTable table = OpenTable(config, err);
  config.topology.Validate();
  config.train.Validate();
  EnsureDir(OutDir(config));
  WriteText(OutDir(config) / "config.json", ToJson(config));

  const CorpusSplit split = SplitCorpus(corpus, config.split);
  const std::vector<Example> train = PrepareLabeled(split.train);
  const std::vector<Example> valid = PrepareLabeled(split.valid);
  const std::vector<Example> test = PrepareLabeled(split.test);
  err << "train: " << corpus.provenance << " " << corpus.size()
      << " posts -> " << train.size() << "/" << valid.size() << "/"
      << test.size() << "\n";

  std::vector<ConfusionMatrix> cms;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const fs::path dir = TrialDir(config, trial);
    EnsureDir(dir);
    TrainConfig tc = config.train;
    tc.seed = TrialSeed(config, trial);
    EnsembleTrainResult result =
        TrainEnsemble(tc, config.topology, table, train, valid);
    result.bundle.provenance["corpus"] = corpus.provenance;
    result.bundle.provenance["split_seed"] = std::to_string(config.split.seed);
    SaveBundle(result.bundle, dir);
    WriteTelemetry(dir / "train_log.jsonl", result.members);

    const ConfusionMatrix cm = EvaluateBundle(result.bundle, table, test);
    cms.push_back(cm);
    const std::string metrics = FormatKeyValue(Report(cm), cm);
    const std::string text = "command=train\nseed=" + std::to_string(tc.seed) +
                             "\nbest_epochs=" + BestEpochs(result.members) +
                             "\n" + Prefixed("test_", metrics);
    ordered_json j = {{"command", "train"},
                      {"seed", tc.seed},
                      {"corpus", corpus.provenance},
                      {"best_epochs", BestEpochs(result.members)},
                      {"test", MetricsJson(cm)}};
    WriteText(dir / "report.txt", text);
    WriteText(dir / "report.json", j.dump(2) + "\n");
    out << "trial " << trial << " (" << dir.string() << ")\n" << text;
  }
  if (config.trials > 1) WriteTrialMean(config, "train", cms);
  return 0;
}

int CmdWeakTrain(RunConfig config, std::ostream& out, std::ostream& err) {
  config.train.loss_mode = LossMode::kWeak;
  if (config.trials < 1) throw InvalidConfig("trials must be >= 1");
  if (config.data.unlabeled.empty()) {
    throw InvalidConfig("weak-train needs --unlabeled");
  }
  if (config.lexicon.hate.empty() || config.lexicon.offensive.empty() ||
      config.lexicon.positive.empty()) {
    throw InvalidConfig(
        "weak-train needs --lex-hate, --lex-offensive and --lex-positive");
  }
  std::vector<std::string> warnings;
  const Lexicon lexicon =
      LoadLexicon(config.lexicon.hate, config.lexicon.offensive,
                  config.lexicon.positive, &warnings);
  for (const std::string& w : warnings) err << "warning: lexicon: " << w << "\n";
  const std::vector<RawPost> pool = LoadUnlabeled(config.data.unlabeled);
  if (pool.size() < 2) {
    throw CorpusTooSmall("weak-train needs at least 2 unlabeled posts");
  }
  const EmbeddingTable table = OpenTable(config, err);
  config.topology.Validate();

  // Held-out 10% of the pool for the weak validation loss.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.split.seed);
  rng.Shuffle(std::span<std::size_t>(order));
  const std::size_t n_valid = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(pool.size()))));
  std::vector<std::size_t> valid_idx(order.begin(), order.begin() + n_valid);
  std::vector<std::size_t> train_idx(order.begin() + n_valid, order.end());
  std::sort(valid_idx.begin(), valid_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::vector<RawPost> train_posts, valid_posts;
  for (std::size_t i : train_idx) train_posts.push_back(pool[i]);
  for (std::size_t i : valid_idx) valid_posts.push_back(pool[i]);

  const double k = config.lexicon.bound_scale;
  const std::vector<Example> train = PrepareWeak(train_posts, lexicon, k);
  const std::vector<Example> valid = PrepareWeak(valid_posts, lexicon, k);
  const WeakLabelStats stats = ComputeWeakLabelStats(train_posts, lexicon, k);
  if (stats.vacuous == stats.posts) {
    err << "warning: no training post matches any lexicon term; the weak "
           "loss is identically 0\n";
    throw VacuousSupervision(
        "every weak bound is vacuous, so training has no signal");
  }
  config.train.class_weights = ParseClassWeights(config.class_weights, &stats);
  config.train.Validate();
  EnsureDir(OutDir(config));
  WriteText(OutDir(config) / "config.json", ToJson(config));
  err << "weak-train: " << pool.size() << " posts -> " << train.size() << "/"
      << valid.size() << ", " << stats.vacuous << " vacuous\n";

  std::vector<Example> eval;
  if (!config.data.eval.empty()) {
    const LabeledCorpus eval_corpus = LoadLabeledAny(config.data.eval);
    ReportIssues(eval_corpus, err);
    eval = PrepareLabeled(eval_corpus);
  }

  std::string stats_text = "weak_posts=" + std::to_string(stats.posts) +
                           "\nweak_vacuous=" + std::to_string(stats.vacuous) + "\n";
  ordered_json stats_json = {{"posts", stats.posts}, {"vacuous", stats.vacuous}};
  for (ClassLabel label : kAllLabels) {
    const std::size_t c = Index(label);
    const std::string name(LabelName(label));
    stats_text += "weak_constrained_" + name + "=" +
                  std::to_string(stats.constrained[c]) + "\n";
    stats_text += "weak_raised_lower_" + name + "=" +
                  std::to_string(stats.raised_lower[c]) + "\n";
    stats_text += "class_weight_" + name + "=" +
                  FormatDouble(config.train.class_weights.w[c]) + "\n";
    stats_json["constrained_" + name] = stats.constrained[c];
    stats_json["raised_lower_" + name] = stats.raised_lower[c];
    stats_json["class_weight_" + name] = config.train.class_weights.w[c];
  }

  std::vector<ConfusionMatrix> cms;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const fs::path dir = TrialDir(config, trial);
    EnsureDir(dir);
    TrainConfig tc = config.train;
    tc.seed = TrialSeed(config, trial);
    EnsembleTrainResult result =
        TrainEnsemble(tc, config.topology, table, train, valid);
    result.bundle.provenance["corpus"] = "unlabeled";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", k);
    result.bundle.provenance["bound_scale"] = buf;
    SaveBundle(result.bundle, dir);
    WriteTelemetry(dir / "train_log.jsonl", result.members);

    std::string text = "command=weak-train\nseed=" + std::to_string(tc.seed) +
                       "\nbest_epochs=" + BestEpochs(result.members) + "\n" +
                       stats_text;
    ordered_json j = {{"command", "weak-train"},
                      {"seed", tc.seed},
                      {"best_epochs", BestEpochs(result.members)},
                      {"weak", stats_json}};
    if (!eval.empty()) {
      const ConfusionMatrix cm = EvaluateBundle(result.bundle, table, eval);
      cms.push_back(cm);
      text += Prefixed("eval_", FormatKeyValue(Report(cm), cm));
      j["eval"] = MetricsJson(cm);
    }
    WriteText(dir / "report.txt", text);
    WriteText(dir / "report.json", j.dump(2) + "\n");
    out << "trial " << trial << " (" << dir.string() << ")\n" << text;
  }
  if (config.trials > 1 && !cms.empty()) WriteTrialMean(config, "weak-train", cms);
  return 0;
}

int CmdTune(RunConfig config, std::ostream& out, std::ostream& err) {
  if (config.bundle.empty()) throw InvalidConfig("tune needs --bundle");
  if (config.data.target.empty()) throw InvalidConfig("tune needs --target");
  const EnsembleBundle bundle = LoadBundle(config.bundle);
  config.topology = bundle.topology;
  const EmbeddingTable table = OpenBundleTable(config, bundle, err);
  config.train.class_weights = ParseClassWeights(config.class_weights, nullptr);
  config.train.Validate();

  const LabeledCorpus target_corpus = LoadLabeledAny(config.data.target);
  ReportIssues(target_corpus, err);
  const std::vector<Example> target = PrepareLabeled(target_corpus);
  std::vector<Example> eval;
  std::string eval_source = "target";
  if (!config.data.eval.empty()) {
    const LabeledCorpus eval_corpus = LoadLabeledAny(config.data.eval);
    ReportIssues(eval_corpus, err);
    eval = PrepareLabeled(eval_corpus);
    eval_source = "eval";
  } else {
    eval = target;
  }
  EnsureDir(OutDir(config));
  WriteText(OutDir(config) / "config.json", ToJson(config));

  const ConfusionMatrix before = EvaluateBundle(bundle, table, eval);
  std::vector<std::string> warnings;
  EnsembleBundle tuned = Tune(bundle, table, target, config.train, &warnings);
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
  tuned.provenance["tuned_from"] = config.bundle;
  SaveBundle(tuned, OutDir(config));
  const ConfusionMatrix after = EvaluateBundle(tuned, table, eval);

  std::string text = "command=tune\neval_source=" + eval_source +
                     "\ntarget_posts=" + std::to_string(target.size()) + "\n";
  for (const std::string& w : warnings) text += "warning=" + w + "\n";
  text += Prefixed("pre_", FormatKeyValue(Report(before), before));
  text += Prefixed("post_", FormatKeyValue(Report(after), after));
  ordered_json j = {{"command", "tune"},
                    {"eval_source", eval_source},
                    {"target_posts", target.size()},
                    {"warnings", warnings},
                    {"pre_tuning", MetricsJson(before)},
                    {"post_tuning", MetricsJson(after)}};
  WriteText(OutDir(config) / "report.txt", text);
  WriteText(OutDir(config) / "report.json", j.dump(2) + "\n");
  out << text;
  return 0;
}

int CmdPredict(RunConfig config, std::ostream& out, std::ostream& err) {
  if (config.bundle.empty()) throw InvalidConfig("predict needs --bundle");
  if (config.data.input.empty()) throw InvalidConfig("predict needs --input");
  const EnsembleBundle bundle = LoadBundle(config.bundle);
  const EmbeddingTable table = OpenBundleTable(config, bundle, err);
  const std::vector<RawPost> posts = LoadUnlabeled(config.data.input);
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const Prediction p = Predict(bundle, table, posts[i]);
    std::vector<std::string> votes;
    for (ClassLabel v : p.votes) votes.emplace_back(LabelName(v));
    ordered_json rec = {{"index", i},
                        {"source", posts[i].source_id},
                        {"label", std::string(LabelName(p.label))},
                        {"votes", votes},
                        {"probs", {{"H", p.mean_probs[0]},
                                   {"O", p.mean_probs[1]},
                                   {"N", p.mean_probs[2]}}}};
    out << rec.dump() << "\n";
  }
  return 0;
}

int CmdEvaluate(RunConfig config, std::ostream& out, std::ostream& err) {
  if (config.bundle.empty()) throw InvalidConfig("evaluate needs --bundle");
  const std::string labeled =
      !config.data.input.empty() ? config.data.input : config.data.eval;
  if (labeled.empty()) throw InvalidConfig("evaluate needs --input");
  const EnsembleBundle bundle = LoadBundle(config.bundle);
  const EmbeddingTable table = OpenBundleTable(config, bundle, err);
  const LabeledCorpus corpus = LoadLabeledAny(labeled);
  ReportIssues(corpus, err);
  const std::vector<Example> examples = PrepareLabeled(corpus);
  const ConfusionMatrix cm = EvaluateBundle(bundle, table, examples);
  const std::string text = "command=evaluate\n" + FormatKeyValue(Report(cm), cm);
  out << text;
  if (!config.out.empty()) {
    EnsureDir(OutDir(config));
    ordered_json j = {{"command", "evaluate"}, {"eval", MetricsJson(cm)}};
    WriteText(OutDir(config) / "report.txt", text);
    WriteText(OutDir(config) / "report.json", j.dump(2) + "\n");
  }
  return 0;
}

int CmdGradcheck(const RunConfig& config, const std::string& layer, bool all,
                 std::ostream& out, std::ostream& err) {
  if (all == !layer.empty()) {
    throw InvalidConfig("gradcheck needs exactly one of --layer <name> or --all");
  }
  std::vector<GradCheckReport> reports;
  bool passed = true;
  if (all) {
    GradCheckSuite suite = RunAllChecks(config.train.seed);
    for (const std::string& m : suite.missing) {
      err << "missing registered check: " << m << "\n";
    }
    reports = std::move(suite.reports);
    passed = suite.passed;
  } else {
    reports.push_back(RunCheck(layer, config.train.seed));
    passed = reports.back().passed;
  }
  char buf[160];
  for (const GradCheckReport& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-26s max_rel_error=%.3e threshold=%.0e %s\n",
                  r.check.c_str(), r.max_rel_error, r.threshold,
                  r.passed ? "PASS" : "FAIL");
    out << buf;
  }
  out << (passed ? "gradcheck: all passed\n" : "gradcheck: FAILED\n");
  return passed ? 0 : kGradCheckFailedExit;
}

int CmdPreprocess(const RunConfig& config, std::ostream& out,
                  std::ostream& /*err*/) {
  if (config.data.input.empty()) throw InvalidConfig("preprocess needs --input");
  for (const RawPost& post : LoadUnlabeled(config.data.input)) {
    const TokenSequence seq = Preprocess(post);
    std::string line;
    for (const std::string& t : seq.tokens) {
      if (!line.empty()) line += ' ';
      line += t;
    }
    out << line << "\n";
  }
  return 0;
}

}  // namespace delhate::cli
