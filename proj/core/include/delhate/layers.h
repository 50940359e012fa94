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


#ifndef DELHATE_LAYERS_H_
#define DELHATE_LAYERS_H_

#include <cstddef>
#include <vector>

#include "delhate/graph.h"
#include "delhate/rng.h"

namespace delhate {

// Differentiable operations over a Graph. Every op validates shapes and
// throws ShapeMismatch on disagreement.

// input [C_in x T], filters [C_out x C_in x W], bias [C_out] ->
// [C_out x (T + 2*pad - W + 1)]. Stride 1, zero padding on both ends,
// cross-correlation (no kernel flip).
Var Conv1d(Graph& g, Var input, Var filters, Var bias, std::size_t pad);

// Non-overlapping per-channel max over windows of `rate`; [C x T] ->
// [C x floor(T/rate)]. The trailing remainder is dropped.
Var MaxPool1d(Graph& g, Var input, std::size_t rate);

// [T x H] -> [H], max over the time axis.
Var GlobalMaxPool(Graph& g, Var input);

Var Transpose(Graph& g, Var matrix);
Var Flatten(Graph& g, Var input);
Var Row(Graph& g, Var matrix, std::size_t row);
Var StackRows(Graph& g, const std::vector<Var>& rows);

// weight [D_out x D] times x [D] plus bias [D_out].
Var Affine(Graph& g, Var weight, Var x, Var bias);
// weight [D_out x D] times x [D].
Var MatVec(Graph& g, Var weight, Var x);

Var Add(Graph& g, Var a, Var b);
Var Sub(Graph& g, Var a, Var b);
Var Mul(Graph& g, Var a, Var b);
Var Sigmoid(Graph& g, Var x);
Var Tanh(Graph& g, Var x);
Var Relu(Graph& g, Var x);
// Numerically stable softmax over a vector.
Var Softmax(Graph& g, Var x);

// Inverted dropout. Eval mode (train == false) or p == 0 is the identity.
Var Dropout(Graph& g, Var x, double p, bool train, Rng* rng);

// Probability clamp used by the log-losses.
inline constexpr double kLogEpsilon = 1e-12;

// -log(max(pred[target], 1e-12)); pred is a probability vector.
Var CrossEntropy(Graph& g, Var pred, std::size_t target);

// sum_i weights[i] * x[i]; scalarizes an output for gradient checks.
Var WeightedSum(Graph& g, Var x, const Tensor& weights);

// Sum of scalars.
Var SumScalars(Graph& g, const std::vector<Var>& scalars);

enum class Activation { kNone, kRelu, kSoftmax };

Var FullyConnected(Graph& g, Var x, Var weight, Var bias,
                   Activation activation);

struct GruWeights {
  // Input maps [H x D_in], recurrent maps [H x H], biases [H].
  Var w_update, u_update, b_update;
  Var w_reset, u_reset, b_reset;
  Var w_candidate, u_candidate, b_candidate;
};

// inputs [T x D_in], h0 [H] -> all hidden states [T x H]:
//   z = sigmoid(W_z x + U_z h + b_z)
//   r = sigmoid(W_r x + U_r h + b_r)
//   c = tanh(W_h x + U_h (r * h) + b_h)
//   h' = (1 - z) * h + z * c
Var Gru(Graph& g, Var inputs, const GruWeights& w, Var h0);

struct LstmWeights {
  Var w_input, u_input, b_input;
  Var w_forget, u_forget, b_forget;
  Var w_cell, u_cell, b_cell;
  Var w_output, u_output, b_output;
};

// inputs [T x D_in], h0/c0 [H] -> all hidden states [T x H]:
//   i = sigmoid(W_i x + U_i h + b_i), f = sigmoid(W_f x + U_f h + b_f)
//   g = tanh(W_g x + U_g h + b_g),   o = sigmoid(W_o x + U_o h + b_o)
//   c' = f * c + i * g,              h' = o * tanh(c')
Var Lstm(Graph& g, Var inputs, const LstmWeights& w, Var h0, Var c0);

}  // namespace delhate

#endif  // DELHATE_LAYERS_H_
