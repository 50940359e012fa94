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


#include "delhate/topology.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "delhate/errors.h"
#include "delhate/layers.h"

namespace delhate {

void TopologyConfig::Validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (seq_len == 0 || emb_dim == 0) fail("seq_len and emb_dim must be >= 1");
  if (conv_filters == 0 || conv_width == 0) {
    fail("conv_filters and conv_width must be >= 1");
  }
  if (conv_width % 2 == 0 || conv_pad * 2 + 1 != conv_width) {
    fail("conv_pad must equal (conv_width - 1) / 2 with odd conv_width");
  }
  if (pool_rate == 0) fail("pool_rate must be >= 1");
  if (conv_length() / pool_rate == 0) {
    fail("pool_rate exceeds the convolution output length");
  }
  if (variant == Variant::kCnnRnnFc && rnn_hidden == 0) {
    fail("rnn_hidden must be >= 1");
  }
  if (fc_hidden == 0) fail("fc_hidden must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (n_classes != 3) fail("n_classes must be 3");
}

std::size_t TopologyConfig::conv_in_channels() const {
  return conv_axis == ConvAxis::kSequence ? emb_dim : seq_len;
}

std::size_t TopologyConfig::conv_length() const {
  return conv_axis == ConvAxis::kSequence ? seq_len : emb_dim;
}

std::size_t TopologyConfig::pooled_length() const {
  return conv_length() / pool_rate;
}

std::size_t TopologyConfig::feature_dim() const {
  return variant == Variant::kCnnRnnFc ? rnn_hidden
                                       : conv_filters * pooled_length();
}

std::string TopologyConfig::Canonical() const {
  char dropout_text[32];
  std::snprintf(dropout_text, sizeof(dropout_text), "%.17g", dropout);
  std::ostringstream out;
  out << "variant=" << VariantName(variant) << ";rnn=" << RnnKindName(rnn)
      << ";seq_len=" << seq_len << ";emb_dim=" << emb_dim
      << ";conv_filters=" << conv_filters << ";conv_width=" << conv_width
      << ";conv_pad=" << conv_pad << ";pool_rate=" << pool_rate
      << ";rnn_hidden=" << rnn_hidden << ";fc_hidden=" << fc_hidden
      << ";dropout=" << dropout_text << ";n_classes=" << n_classes
      << ";conv_axis=" << ConvAxisName(conv_axis);
  return out.str();
}

std::uint64_t TopologyConfig::Hash() const { return Fnv1a64(Canonical()); }

TopologyConfig TopologyConfig::Tiny() {
  TopologyConfig c;
  c.seq_len = 8;
  c.emb_dim = 6;
  c.conv_filters = 2;
  c.conv_width = 3;
  c.conv_pad = 1;
  c.pool_rate = 2;
  c.rnn_hidden = 5;
  c.fc_hidden = 4;
  return c;
}

std::string VariantName(Variant v) {
  return v == Variant::kCnnRnnFc ? "cnn_rnn_fc" : "cnn_fc";
}

std::string RnnKindName(RnnKind k) { return k == RnnKind::kGru ? "gru" : "lstm"; }

std::string ConvAxisName(ConvAxis a) {
  return a == ConvAxis::kSequence ? "sequence" : "embedding";
}

Variant ParseVariant(std::string_view name) {
  if (name == "cnn_rnn_fc" || name == "cnn-rnn-fc") return Variant::kCnnRnnFc;
  if (name == "cnn_fc" || name == "cnn-fc") return Variant::kCnnFc;
  throw InvalidConfig("unknown variant '" + std::string(name) + "'");
}

RnnKind ParseRnnKind(std::string_view name) {
  if (name == "gru") return RnnKind::kGru;
  if (name == "lstm") return RnnKind::kLstm;
  throw InvalidConfig("unknown rnn kind '" + std::string(name) + "'");
}

ConvAxis ParseConvAxis(std::string_view name) {
  if (name == "sequence") return ConvAxis::kSequence;
  if (name == "embedding") return ConvAxis::kEmbedding;
  throw InvalidConfig("unknown conv axis '" + std::string(name) + "'");
}

std::size_t ModelParams::ElementCount() const {
  return feature.ElementCount() + classifier.ElementCount();
}

void ModelParams::ZeroGrad() {
  feature.ZeroGrad();
  classifier.ZeroGrad();
}

std::size_t ExpectedParameterCount(const TopologyConfig& c) {
  const std::size_t f = c.conv_filters;
  std::size_t n = f * c.conv_in_channels() * c.conv_width + f;
  if (c.variant == Variant::kCnnRnnFc) {
    const std::size_t h = c.rnn_hidden;
    const std::size_t gates = c.rnn == RnnKind::kGru ? 3 : 4;
    n += gates * (h * f + h * h + h);
  }
  n += c.feature_dim() * c.fc_hidden + c.fc_hidden;
  n += c.fc_hidden * c.n_classes + c.n_classes;
  return n;
}

namespace {

Tensor XavierUniform(std::vector<std::size_t> shape, std::size_t fan_in,
                     std::size_t fan_out, Rng& rng) {
  Tensor t(std::move(shape));
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data()) v = rng.Uniform(-limit, limit);
  return t;
}

constexpr const char* kGruGates[] = {"update", "reset", "candidate"};
constexpr const char* kLstmGates[] = {"input", "forget", "cell", "output"};

}  // namespace

ModelParams BuildModel(const TopologyConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  ModelParams m;
  const std::size_t f = config.conv_filters;
  const std::size_t c = config.conv_in_channels();
  const std::size_t w = config.conv_width;
  m.feature.Add("conv.weight", XavierUniform({f, c, w}, c * w, f * w, rng));
  m.feature.Add("conv.bias", Tensor({f}));
  if (config.variant == Variant::kCnnRnnFc) {
    const std::size_t h = config.rnn_hidden;
    const bool gru = config.rnn == RnnKind::kGru;
    const std::string prefix = gru ? "gru." : "lstm.";
    const std::size_t gates = gru ? 3 : 4;
    for (std::size_t i = 0; i < gates; ++i) {
      const std::string gate = gru ? kGruGates[i] : kLstmGates[i];
      m.feature.Add(prefix + "w_" + gate, XavierUniform({h, f}, f, h, rng));
      m.feature.Add(prefix + "u_" + gate, XavierUniform({h, h}, h, h, rng));
      m.feature.Add(prefix + "b_" + gate, Tensor({h}));
    }
  }
  const std::size_t d = config.feature_dim();
  const std::size_t k = config.fc_hidden;
  const std::size_t n = config.n_classes;
  m.classifier.Add("fc1.weight", XavierUniform({k, d}, d, k, rng));
  m.classifier.Add("fc1.bias", Tensor({k}));
  m.classifier.Add("fc2.weight", XavierUniform({n, k}, k, n, rng));
  m.classifier.Add("fc2.bias", Tensor({n}));
  return m;
}

Tensor ConvInput(const TopologyConfig& config, const TokenMatrix& input) {
  if (input.rows != config.seq_len || input.cols != config.emb_dim) {
    throw ShapeMismatch("input " + std::to_string(input.rows) + " x " +
                        std::to_string(input.cols) + " does not match " +
                        std::to_string(config.seq_len) + " x " +
                        std::to_string(config.emb_dim));
  }
  if (config.conv_axis == ConvAxis::kEmbedding) {
    return Tensor({input.rows, input.cols}, input.values);
  }
  Tensor t({input.cols, input.rows});
  for (std::size_t r = 0; r < input.rows; ++r) {
    for (std::size_t col = 0; col < input.cols; ++col) {
      t.at(col, r) = input.at(r, col);
    }
  }
  return t;
}

namespace {

class Binder {
 public:
  Binder(Graph& g, const ModelParams& params, ModelParams* grads)
      : g_(g), params_(params), grads_(grads) {}

  Var Feature(std::string_view name) { return Bind(true, name); }
  Var Classifier(std::string_view name) { return Bind(false, name); }

 private:
  Var Bind(bool feature, std::string_view name) {
    const ParamGroup& group = feature ? params_.feature : params_.classifier;
    const Parameter* p = group.Find(name);
    if (p == nullptr) {
      throw ShapeMismatch("model has no parameter '" + std::string(name) + "'");
    }
    Tensor* sink = nullptr;
    if (grads_ != nullptr && group.trainable) {
      ParamGroup& gg = feature ? grads_->feature : grads_->classifier;
      Parameter* target = gg.Find(name);
      if (target == nullptr) {
        throw ShapeMismatch("gradient target lacks '" + std::string(name) +
                            "'");
      }
      sink = &target->grad;
    }
    return g_.Leaf(&p->value, sink);
  }

  Graph& g_;
  const ModelParams& params_;
  ModelParams* grads_;
};

}  // namespace

Var ForwardGraph(Graph& g, const ModelParams& params,
                 const TopologyConfig& config, const TokenMatrix& input,
                 Mode mode, Rng* rng, ModelParams* grads) {
  Binder bind(g, params, grads);
  Var x = g.Constant(ConvInput(config, input));
  Var conv = Conv1d(g, x, bind.Feature("conv.weight"),
                    bind.Feature("conv.bias"), config.conv_pad);
  Var pooled = MaxPool1d(g, conv, config.pool_rate);
  Var features;
  if (config.variant == Variant::kCnnRnnFc) {
    Var steps = Transpose(g, pooled);
    Var h0 = g.Constant(Tensor({config.rnn_hidden}));
    Var states;
    if (config.rnn == RnnKind::kGru) {
      GruWeights w{
          bind.Feature("gru.w_update"),    bind.Feature("gru.u_update"),
          bind.Feature("gru.b_update"),    bind.Feature("gru.w_reset"),
          bind.Feature("gru.u_reset"),     bind.Feature("gru.b_reset"),
          bind.Feature("gru.w_candidate"), bind.Feature("gru.u_candidate"),
          bind.Feature("gru.b_candidate")};
      states = Gru(g, steps, w, h0);
    } else {
      LstmWeights w{
          bind.Feature("lstm.w_input"),  bind.Feature("lstm.u_input"),
          bind.Feature("lstm.b_input"),  bind.Feature("lstm.w_forget"),
          bind.Feature("lstm.u_forget"), bind.Feature("lstm.b_forget"),
          bind.Feature("lstm.w_cell"),   bind.Feature("lstm.u_cell"),
          bind.Feature("lstm.b_cell"),   bind.Feature("lstm.w_output"),
          bind.Feature("lstm.u_output"), bind.Feature("lstm.b_output")};
      Var c0 = g.Constant(Tensor({config.rnn_hidden}));
      states = Lstm(g, steps, w, h0, c0);
    }
    features = GlobalMaxPool(g, states);
  } else {
    features = Flatten(g, pooled);
  }
  Var hidden = FullyConnected(g, features, bind.Classifier("fc1.weight"),
                              bind.Classifier("fc1.bias"), Activation::kRelu);
  hidden = Dropout(g, hidden, config.dropout, mode == Mode::kTrain, rng);
  return FullyConnected(g, hidden, bind.Classifier("fc2.weight"),
                        bind.Classifier("fc2.bias"), Activation::kSoftmax);
}

std::array<double, 3> Forward(const ModelParams& params,
                              const TopologyConfig& config,
                              const TokenMatrix& input) {
  Graph g;
  Var out = ForwardGraph(g, params, config, input, Mode::kEval, nullptr,
                         nullptr);
  const Tensor& p = g.value(out);
  return {p[0], p[1], p[2]};
}

}  // namespace delhate
