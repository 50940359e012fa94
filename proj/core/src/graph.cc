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


#include "delhate/graph.h"

#include <algorithm>
#include <string>

#include "delhate/errors.h"

namespace delhate {

Var Graph::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::Constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  return Push(std::move(node));
}

Var Graph::Leaf(const Tensor* value, Tensor* grad_sink) {
  Node node;
  node.borrowed = value;
  node.grad_sink = grad_sink;
  node.requires_grad = grad_sink != nullptr;
  if (grad_sink != nullptr && !grad_sink->SameShape(*value)) {
    throw ShapeMismatch("gradient sink " + ShapeString(grad_sink->shape()) +
                        " for leaf " + ShapeString(value->shape()));
  }
  return Push(std::move(node));
}

Var Graph::Record(Tensor value, std::initializer_list<Var> inputs,
                  BackwardFn backward) {
  return Record(std::move(value), std::vector<Var>(inputs),
                std::move(backward));
}

Var Graph::Record(Tensor value, const std::vector<Var>& inputs,
                  BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = std::any_of(inputs.begin(), inputs.end(), [&](Var v) {
    return nodes_[v.id].requires_grad;
  });
  if (node.requires_grad) node.backward = std::move(backward);
  return Push(std::move(node));
}

const Tensor& Graph::value(Var v) const {
  const Node& node = nodes_[v.id];
  return node.borrowed != nullptr ? *node.borrowed : node.value;
}

Tensor& Graph::grad(Var v) {
  Node& node = nodes_[v.id];
  if (!node.has_grad) {
    node.grad = Tensor(value(v).shape());
    node.has_grad = true;
  }
  return node.grad;
}

void Graph::Backward(Var out, double seed) {
  if (value(out).size() != 1) {
    throw ShapeMismatch("Backward needs a single-element output, got " +
                        ShapeString(value(out).shape()));
  }
  if (!nodes_[out.id].requires_grad) return;
  // Each pass starts from clean node buffers; only the sinks accumulate.
  for (std::size_t i = 0; i <= out.id; ++i) nodes_[i].has_grad = false;
  grad(out)[0] += seed;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || !node.has_grad) continue;
    Var self{static_cast<std::uint32_t>(i)};
    if (node.backward) {
      // Callbacks only touch existing nodes, so `node` stays valid.
      node.backward(*this, self);
    } else if (node.grad_sink != nullptr) {
      std::span<double> sink = node.grad_sink->data();
      std::span<const double> g = node.grad.data();
      for (std::size_t k = 0; k < sink.size(); ++k) sink[k] += g[k];
    }
  }
}

void Graph::NoteKinkMargin(double margin) {
  kink_margin_ = std::min(kink_margin_, margin);
}

}  // namespace delhate
