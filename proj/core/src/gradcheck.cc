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


#include "delhate/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "delhate/embedding.h"
#include "delhate/errors.h"
#include "delhate/layers.h"
#include "delhate/rng.h"
#include "delhate/topology.h"
#include "delhate/weak_supervision.h"

namespace delhate {

double RelativeError(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

namespace {

// Minimum distance from every kink the sampled point must keep.
constexpr double kKinkMargin = 1e-3;
// Central differences at h = 1e-5 carry roundoff near 1e-11 * |f|, so a
// nonzero gradient smaller than this cannot be resolved to 1e-4 relative
// error. Samples with such coordinates are redrawn like kinked ones.
constexpr double kResolvableGradient = 1e-6;
constexpr int kMaxDraws = 500;
constexpr int kTrials = 20;

struct Probe {
  std::string name;
  Tensor* value;
  const Tensor* analytic;
};

double RequireFiniteScalar(const Graph& g, Var out, const std::string& name) {
  const Tensor& v = g.value(out);
  if (v.size() != 1) {
    throw ShapeMismatch(name + ": gradient check needs a scalar output, got " +
                        ShapeString(v.shape()));
  }
  if (!std::isfinite(v[0])) {
    throw NonFiniteValue(name + ": non-finite loss during gradient check");
  }
  return v[0];
}

GradCheckReport Compare(const std::string& name,
                        const std::vector<Probe>& probes,
                        const std::function<double()>& eval, double h,
                        double threshold) {
  GradCheckReport report;
  report.check = name;
  report.threshold = threshold;
  for (const Probe& p : probes) {
    TensorCheck tc;
    tc.name = p.name;
    tc.coordinates = p.value->size();
    for (std::size_t j = 0; j < p.value->size(); ++j) {
      double& x = (*p.value)[j];
      const double saved = x;
      x = saved + h;
      const double plus = eval();
      x = saved - h;
      const double minus = eval();
      x = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NonFiniteValue(name + ": non-finite loss at " + p.name);
      }
      const double numeric = (plus - minus) / (2.0 * h);
      tc.max_rel_error = std::max(
          tc.max_rel_error, RelativeError((*p.analytic)[j], numeric));
    }
    report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
    report.tensors.push_back(std::move(tc));
  }
  report.passed = report.max_rel_error <= threshold;
  return report;
}

}  // namespace

namespace {

std::vector<Tensor> AnalyticGradients(const std::string& name,
                                      std::vector<NamedTensor>& leaves,
                                      const ScalarBuilder& build) {
  std::vector<Tensor> grads;
  grads.reserve(leaves.size());
  for (const NamedTensor& leaf : leaves) grads.emplace_back(leaf.value.shape());
  Graph g;
  std::vector<Var> vars;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    vars.push_back(g.Leaf(&leaves[i].value, &grads[i]));
  }
  const Var out = build(g, vars);
  RequireFiniteScalar(g, out, name);
  g.Backward(out);
  return grads;
}

GradCheckReport CompareLeaves(const std::string& name,
                              std::vector<NamedTensor>& leaves,
                              const std::vector<Tensor>& grads,
                              const ScalarBuilder& build, double h,
                              double threshold) {
  auto eval = [&]() {
    Graph g;
    std::vector<Var> vars;
    for (NamedTensor& leaf : leaves) vars.push_back(g.Leaf(&leaf.value, nullptr));
    const Var out = build(g, vars);
    return g.value(out)[0];
  };
  std::vector<Probe> probes;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    probes.push_back({leaves[i].name, &leaves[i].value, &grads[i]});
  }
  return Compare(name, probes, eval, h, threshold);
}

bool Resolvable(const std::vector<Tensor>& grads) {
  for (const Tensor& t : grads) {
    for (double v : t.data()) {
      if (v != 0.0 && std::abs(v) < kResolvableGradient) return false;
    }
  }
  return true;
}

}  // namespace

GradCheckReport CheckGradients(const std::string& name,
                               std::vector<NamedTensor> leaves,
                               const ScalarBuilder& build, double h,
                               double threshold) {
  const std::vector<Tensor> grads = AnalyticGradients(name, leaves, build);
  return CompareLeaves(name, leaves, grads, build, h, threshold);
}

namespace {

Tensor RandomTensor(std::vector<std::size_t> shape, Rng& rng,
                    double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = scale * rng.Normal();
  return t;
}

double KinkMargin(const std::vector<NamedTensor>& leaves,
                  const ScalarBuilder& build) {
  Graph g;
  std::vector<Var> vars;
  for (const NamedTensor& leaf : leaves) vars.push_back(g.Leaf(&leaf.value, nullptr));
  build(g, vars);
  return g.kink_margin();
}

struct Trial {
  std::vector<NamedTensor> leaves;
  ScalarBuilder build;
  // Extra acceptance test for kinks the graph does not track.
  std::function<bool(const std::vector<NamedTensor>&)> accept;
};

using TrialFactory = std::function<Trial(Rng&)>;

GradCheckReport RunSampled(const std::string& name, const TrialFactory& make,
                           Rng& rng, double h) {
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Trial t = make(rng);
    if (KinkMargin(t.leaves, t.build) < kKinkMargin) continue;
    if (t.accept && !t.accept(t.leaves)) continue;
    const std::vector<Tensor> grads = AnalyticGradients(name, t.leaves, t.build);
    if (!Resolvable(grads)) continue;
    return CompareLeaves(name, t.leaves, grads, t.build, h,
                         kGradCheckThreshold);
  }
  throw Error(ErrorCategory::kInternal,
              name + ": no usable sample after " + std::to_string(kMaxDraws) +
                  " draws");
}

// Scalarizes a layer output with fixed random weights.
ScalarBuilder Scalarized(std::function<Var(Graph&, const std::vector<Var>&)> f,
                         Tensor weights) {
  return [f = std::move(f), weights = std::move(weights)](
             Graph& g, const std::vector<Var>& v) {
    return WeightedSum(g, f(g, v), weights);
  };
}

Trial Conv1dTrial(Rng& rng) {
  const std::size_t c_in = 3, c_out = 2, t = 7, w = 3, pad = 1;
  Trial tr;
  tr.leaves = {{"input", RandomTensor({c_in, t}, rng)},
               {"filters", RandomTensor({c_out, c_in, w}, rng)},
               {"bias", RandomTensor({c_out}, rng)}};
  tr.build = Scalarized(
      [pad](Graph& g, const std::vector<Var>& v) {
        return Conv1d(g, v[0], v[1], v[2], pad);
      },
      RandomTensor({c_out, t + 2 * pad - w + 1}, rng));
  return tr;
}

Trial MaxPoolTrial(Rng& rng) {
  Trial tr;
  tr.leaves = {{"input", RandomTensor({3, 9}, rng)}};
  tr.build = Scalarized(
      [](Graph& g, const std::vector<Var>& v) { return MaxPool1d(g, v[0], 2); },
      RandomTensor({3, 4}, rng));
  return tr;
}

Trial GlobalMaxPoolTrial(Rng& rng) {
  Trial tr;
  tr.leaves = {{"input", RandomTensor({5, 4}, rng)}};
  tr.build = Scalarized(
      [](Graph& g, const std::vector<Var>& v) { return GlobalMaxPool(g, v[0]); },
      RandomTensor({4}, rng));
  return tr;
}

Trial GruTrial(Rng& rng) {
  const std::size_t t = 4, d = 3, hdim = 3;
  Trial tr;
  tr.leaves = {{"inputs", RandomTensor({t, d}, rng)},
               {"h0", RandomTensor({hdim}, rng, 0.5)}};
  for (const char* gate : {"update", "reset", "candidate"}) {
    tr.leaves.push_back({std::string("w_") + gate, RandomTensor({hdim, d}, rng, 0.5)});
    tr.leaves.push_back({std::string("u_") + gate, RandomTensor({hdim, hdim}, rng, 0.5)});
    tr.leaves.push_back({std::string("b_") + gate, RandomTensor({hdim}, rng, 0.5)});
  }
  tr.build = Scalarized(
      [](Graph& g, const std::vector<Var>& v) {
        const GruWeights w{v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
        return Gru(g, v[0], w, v[1]);
      },
      RandomTensor({t, hdim}, rng));
  return tr;
}

Trial LstmTrial(Rng& rng) {
  const std::size_t t = 4, d = 3, hdim = 3;
  Trial tr;
  tr.leaves = {{"inputs", RandomTensor({t, d}, rng)},
               {"h0", RandomTensor({hdim}, rng, 0.5)},
               {"c0", RandomTensor({hdim}, rng, 0.5)}};
  for (const char* gate : {"input", "forget", "cell", "output"}) {
    tr.leaves.push_back({std::string("w_") + gate, RandomTensor({hdim, d}, rng, 0.5)});
    tr.leaves.push_back({std::string("u_") + gate, RandomTensor({hdim, hdim}, rng, 0.5)});
    tr.leaves.push_back({std::string("b_") + gate, RandomTensor({hdim}, rng, 0.5)});
  }
  tr.build = Scalarized(
      [](Graph& g, const std::vector<Var>& v) {
        const LstmWeights w{v[3], v[4],  v[5],  v[6],  v[7],  v[8],
                            v[9], v[10], v[11], v[12], v[13], v[14]};
        return Lstm(g, v[0], w, v[1], v[2]);
      },
      RandomTensor({t, hdim}, rng));
  return tr;
}

TrialFactory FcTrial(Activation act) {
  return [act](Rng& rng) {
    const std::size_t d_in = 5, d_out = 4;
    Trial tr;
    tr.leaves = {{"x", RandomTensor({d_in}, rng)},
                 {"weight", RandomTensor({d_out, d_in}, rng, 0.5)},
                 {"bias", RandomTensor({d_out}, rng, 0.5)}};
    tr.build = Scalarized(
        [act](Graph& g, const std::vector<Var>& v) {
          return FullyConnected(g, v[0], v[1], v[2], act);
        },
        RandomTensor({d_out}, rng));
    return tr;
  };
}

Trial DropoutEvalTrial(Rng& rng) {
  Trial tr;
  tr.leaves = {{"x", RandomTensor({6}, rng)}};
  tr.build = Scalarized(
      [](Graph& g, const std::vector<Var>& v) {
        return Dropout(g, v[0], 0.2, false, nullptr);
      },
      RandomTensor({6}, rng));
  return tr;
}

Trial CrossEntropyTrial(Rng& rng) {
  const std::size_t target = rng.Below(3);
  Trial tr;
  tr.leaves = {{"logits", RandomTensor({3}, rng)}};
  tr.build = [target](Graph& g, const std::vector<Var>& v) {
    return CrossEntropy(g, Softmax(g, v[0]), target);
  };
  return tr;
}

Trial WeakLossTrial(Rng& rng) {
  // Bounds that constrain every class from at least one side.
  ClassBounds bounds;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double a = rng.Uniform(0.0, 0.6);
    const double b = rng.Uniform(0.0, 0.6);
    bounds.lower[c] = std::min(a, b);
    bounds.upper[c] = std::max(a, b) + 0.2;
  }
  ClassWeights weights;
  for (double& w : weights.w) w = rng.Uniform(0.5, 2.0);
  Trial tr;
  tr.leaves = {{"logits", RandomTensor({3}, rng, 1.5)}};
  tr.build = [bounds, weights](Graph& g, const std::vector<Var>& v) {
    return WeakLossNode(g, Softmax(g, v[0]), bounds, weights);
  };
  tr.accept = [bounds](const std::vector<NamedTensor>& leaves) {
    Graph g;
    const Var y = Softmax(g, g.Leaf(&leaves[0].value, nullptr));
    const Tensor& p = g.value(y);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (std::abs(p[c] - bounds.lower[c]) <= kKinkMargin) return false;
      if (std::abs(p[c] - bounds.upper[c]) <= kKinkMargin) return false;
    }
    return true;
  };
  return tr;
}

// Full model on the tiny topology with cross-entropy against a random target.
GradCheckReport CheckTopology(const std::string& name, TopologyConfig config,
                              Rng& rng, double h) {
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    // Every tensor, biases included, is redrawn from N(0, 0.25) instead of
    // the training initializer so signals reach all recurrent weights.
    ModelParams params = BuildModel(config, rng.NextU64());
    for (ParamGroup* group : params.groups()) {
      for (Parameter& p : group->params) {
        for (double& v : p.value.data()) v = 0.5 * rng.Normal();
      }
    }
    TokenMatrix input;
    input.rows = config.seq_len;
    input.cols = config.emb_dim;
    input.n_real = config.seq_len;
    input.values.resize(input.rows * input.cols);
    for (double& v : input.values) v = rng.Normal();
    const std::size_t target = rng.Below(3);
    const std::uint64_t dropout_seed = rng.NextU64();

    auto forward = [&](Graph& g, ModelParams* grads) {
      Rng mask_rng(dropout_seed);
      const Var probs =
          ForwardGraph(g, params, config, input, Mode::kTrain, &mask_rng, grads);
      return CrossEntropy(g, probs, target);
    };

    params.ZeroGrad();
    Graph g;
    const Var loss = forward(g, &params);
    RequireFiniteScalar(g, loss, name);
    if (g.kink_margin() < kKinkMargin) continue;
    g.Backward(loss);

    std::vector<Tensor> analytic;
    std::vector<Probe> probes;
    for (ParamGroup* group : params.groups()) {
      for (Parameter& p : group->params) analytic.push_back(p.grad);
    }
    if (!Resolvable(analytic)) continue;
    std::size_t k = 0;
    for (ParamGroup* group : params.groups()) {
      for (Parameter& p : group->params) {
        probes.push_back({group->name + "/" + p.name, &p.value, &analytic[k++]});
      }
    }
    auto eval = [&]() {
      Graph ge;
      return ge.value(forward(ge, nullptr))[0];
    };
    return Compare(name, probes, eval, h, kGradCheckThreshold);
  }
  throw Error(ErrorCategory::kInternal,
              name + ": no usable sample after " + std::to_string(kMaxDraws) +
                  " draws");
}

TopologyConfig TinyWith(Variant variant, RnnKind rnn) {
  TopologyConfig c = TopologyConfig::Tiny();
  c.variant = variant;
  c.rnn = rnn;
  return c;
}

using CheckFn = std::function<GradCheckReport(const std::string&, Rng&, double)>;

CheckFn Layer(TrialFactory make) {
  return [make = std::move(make)](const std::string& name, Rng& rng, double h) {
    return RunSampled(name, make, rng, h);
  };
}

CheckFn Model(Variant variant, RnnKind rnn) {
  return [variant, rnn](const std::string& name, Rng& rng, double h) {
    return CheckTopology(name, TinyWith(variant, rnn), rng, h);
  };
}

const std::map<std::string, CheckFn>& Registry() {
  static const auto* registry = new std::map<std::string, CheckFn>{
      {"conv1d", Layer(Conv1dTrial)},
      {"maxpool1d", Layer(MaxPoolTrial)},
      {"global_maxpool", Layer(GlobalMaxPoolTrial)},
      {"gru", Layer(GruTrial)},
      {"lstm", Layer(LstmTrial)},
      {"fc_none", Layer(FcTrial(Activation::kNone))},
      {"fc_relu", Layer(FcTrial(Activation::kRelu))},
      {"fc_softmax", Layer(FcTrial(Activation::kSoftmax))},
      {"dropout_eval", Layer(DropoutEvalTrial)},
      {"cross_entropy", Layer(CrossEntropyTrial)},
      {"weak_loss", Layer(WeakLossTrial)},
      {"topology_cnn_rnn_fc_gru", Model(Variant::kCnnRnnFc, RnnKind::kGru)},
      {"topology_cnn_rnn_fc_lstm", Model(Variant::kCnnRnnFc, RnnKind::kLstm)},
      {"topology_cnn_fc", Model(Variant::kCnnFc, RnnKind::kGru)},
  };
  return *registry;
}

}  // namespace

const std::vector<std::string>& RequiredChecks() {
  static const auto* required = new std::vector<std::string>{
      "conv1d",        "maxpool1d",
      "global_maxpool", "gru",
      "lstm",          "fc_none",
      "fc_relu",       "fc_softmax",
      "dropout_eval",  "cross_entropy",
      "weak_loss",     "topology_cnn_rnn_fc_gru",
      "topology_cnn_rnn_fc_lstm", "topology_cnn_fc",
  };
  return *required;
}

std::vector<std::string> RegisteredChecks() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : Registry()) names.push_back(name);
  return names;
}

GradCheckReport RunCheck(const std::string& name, std::uint64_t seed,
                         double h) {
  const auto& registry = Registry();
  const auto it = registry.find(name);
  if (it == registry.end()) {
    throw InvalidConfig("unknown gradient check '" + name + "'");
  }
  Rng rng(MixSeed(seed, Fnv1a64(name)));
  GradCheckReport merged = it->second(name, rng, h);
  for (int trial = 1; trial < kTrials; ++trial) {
    const GradCheckReport r = it->second(name, rng, h);
    for (std::size_t i = 0; i < r.tensors.size(); ++i) {
      merged.tensors[i].coordinates += r.tensors[i].coordinates;
      merged.tensors[i].max_rel_error = std::max(
          merged.tensors[i].max_rel_error, r.tensors[i].max_rel_error);
    }
    merged.max_rel_error = std::max(merged.max_rel_error, r.max_rel_error);
  }
  merged.passed = merged.max_rel_error <= merged.threshold;
  return merged;
}

GradCheckSuite RunAllChecks(std::uint64_t seed, double h) {
  GradCheckSuite suite;
  const auto& registry = Registry();
  for (const std::string& name : RequiredChecks()) {
    if (!registry.contains(name)) suite.missing.push_back(name);
  }
  for (const std::string& name : RequiredChecks()) {
    if (registry.contains(name)) suite.reports.push_back(RunCheck(name, seed, h));
  }
  suite.passed = suite.missing.empty();
  for (const GradCheckReport& r : suite.reports) {
    suite.passed = suite.passed && r.passed;
  }
  return suite;
}

}  // namespace delhate
