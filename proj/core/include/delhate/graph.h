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


#ifndef DELHATE_GRAPH_H_
#define DELHATE_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "delhate/tensor.h"

namespace delhate {

// Handle to a node in a Graph.
struct Var {
  std::uint32_t id = 0;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so the tape is
// already topologically sorted; Backward walks it in reverse.
//
// A Graph is built for one forward pass and then discarded. Leaves either own
// their value or borrow it from caller storage (parameters), in which case the
// caller must keep the storage alive and unchanged for the graph's lifetime.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Owned constant; never receives a gradient.
  Var Constant(Tensor value);

  // Borrowed leaf. When grad_sink is non-null the leaf requires a gradient
  // and Backward adds its gradient into *grad_sink (same shape as value).
  Var Leaf(const Tensor* value, Tensor* grad_sink);

  // Records an op result. `inputs` decide whether the result requires grad;
  // the backward function is dropped when none of them does.
  Var Record(Tensor value, std::initializer_list<Var> inputs,
             BackwardFn backward);
  Var Record(Tensor value, const std::vector<Var>& inputs,
             BackwardFn backward);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  // Gradient buffer of a node; allocated lazily by Backward. Backward
  // functions add into the buffers of their inputs via this accessor.
  Tensor& grad(Var v);

  // Seeds d(out)/d(out) = seed (out must be a single element) and propagates.
  // Leaf gradients are accumulated into their sinks; intermediate buffers
  // are reset first, so calling Backward again adds the same gradient twice.
  void Backward(Var out, double seed = 1.0);

  std::size_t size() const { return nodes_.size(); }

  // Smallest distance to a non-differentiable point seen by kinked ops
  // (ReLU pre-activations, max-pool winner gaps). Used by gradient checks.
  void NoteKinkMargin(double margin);
  double kink_margin() const { return kink_margin_; }

 private:
  struct Node {
    Tensor value;
    const Tensor* borrowed = nullptr;
    Tensor* grad_sink = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var Push(Node node);

  // A deque keeps value references stable while ops append nodes.
  std::deque<Node> nodes_;
  double kink_margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace delhate

#endif  // DELHATE_GRAPH_H_
