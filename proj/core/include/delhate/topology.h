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


#ifndef DELHATE_TOPOLOGY_H_
#define DELHATE_TOPOLOGY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "delhate/embedding.h"
#include "delhate/graph.h"
#include "delhate/parameters.h"
#include "delhate/rng.h"

namespace delhate {

enum class Variant { kCnnRnnFc, kCnnFc };
enum class RnnKind { kGru, kLstm };
// Axis the 1-d convolution slides along. kSequence: channels are embedding
// dimensions and time is the token axis. kEmbedding: channels are token
// positions and time is the embedding axis.
enum class ConvAxis { kSequence, kEmbedding };

struct TopologyConfig {
  Variant variant = Variant::kCnnRnnFc;
  RnnKind rnn = RnnKind::kGru;
  std::size_t seq_len = 100;
  std::size_t emb_dim = 300;
  std::size_t conv_filters = 32;
  std::size_t conv_width = 17;
  std::size_t conv_pad = 8;
  std::size_t pool_rate = 4;
  std::size_t rnn_hidden = 100;
  std::size_t fc_hidden = 25;
  double dropout = 0.2;
  std::size_t n_classes = 3;
  ConvAxis conv_axis = ConvAxis::kSequence;

  // Throws InvalidConfig.
  void Validate() const;

  std::size_t conv_in_channels() const;
  std::size_t conv_length() const;
  std::size_t pooled_length() const;
  // Width of the vector fed to the first FC layer: rnn_hidden for
  // CNN-RNN-FC, conv_filters * pooled_length for CNN-FC.
  std::size_t feature_dim() const;

  // Canonical "key=value;..." string covering every field; stable across
  // versions and used for the checkpoint topology hash.
  std::string Canonical() const;
  std::uint64_t Hash() const;

  // L=8, emb=6, filters=2, width=3, pad=1, pool=2, hidden=5, fc_hidden=4.
  static TopologyConfig Tiny();

  friend bool operator==(const TopologyConfig&, const TopologyConfig&) =
      default;
};

std::string VariantName(Variant v);
std::string RnnKindName(RnnKind k);
std::string ConvAxisName(ConvAxis a);
Variant ParseVariant(std::string_view name);    // throws InvalidConfig
RnnKind ParseRnnKind(std::string_view name);    // throws InvalidConfig
ConvAxis ParseConvAxis(std::string_view name);  // throws InvalidConfig

inline constexpr const char* kFeatureGroup = "feature";
inline constexpr const char* kClassifierGroup = "classifier";

// Parameters of one ensemble member. The feature group holds the conv and
// recurrent layers, the classifier group both FC layers; together they
// partition every trainable tensor.
struct ModelParams {
  ParamGroup feature{kFeatureGroup, true, {}};
  ParamGroup classifier{kClassifierGroup, true, {}};

  std::array<ParamGroup*, 2> groups() { return {&feature, &classifier}; }
  std::array<const ParamGroup*, 2> groups() const {
    return {&feature, &classifier};
  }
  std::size_t ElementCount() const;
  void ZeroGrad();

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Parameter count:
//   conv        F*C*W + F           (C = conv_in_channels)
//   GRU         3*(H*F + H*H + H)   LSTM  4*(H*F + H*H + H)
//   fc1         D*K + K             (D = feature_dim, K = fc_hidden)
//   fc2         K*3 + 3
std::size_t ExpectedParameterCount(const TopologyConfig& config);

// Allocates and initializes a member: weights uniform in
// +-sqrt(6 / (fan_in + fan_out)), biases zero. Throws InvalidConfig.
ModelParams BuildModel(const TopologyConfig& config, std::uint64_t seed);

enum class Mode { kTrain, kEval };

// Adds the model to `g` and returns the probability vector over {H, O, N}.
// With `grads` non-null, trainable-group leaves accumulate gradients into the
// matching parameters of *grads (normally the same object as params). `rng`
// is required in train mode when dropout > 0.
Var ForwardGraph(Graph& g, const ModelParams& params,
                 const TopologyConfig& config, const TokenMatrix& input,
                 Mode mode, Rng* rng, ModelParams* grads);

// Eval-mode probabilities without gradient bookkeeping.
std::array<double, 3> Forward(const ModelParams& params,
                              const TopologyConfig& config,
                              const TokenMatrix& input);

// Input tensor for the convolution: [emb_dim x L] for the sequence axis,
// [L x emb_dim] for the embedding axis.
Tensor ConvInput(const TopologyConfig& config, const TokenMatrix& input);

}  // namespace delhate

#endif  // DELHATE_TOPOLOGY_H_
