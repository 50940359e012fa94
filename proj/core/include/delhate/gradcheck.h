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


#ifndef DELHATE_GRADCHECK_H_
#define DELHATE_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "delhate/graph.h"
#include "delhate/tensor.h"

namespace delhate {

inline constexpr double kGradCheckThreshold = 1e-4;
inline constexpr double kGradCheckStep = 1e-5;

struct TensorCheck {
  std::string name;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::string check;
  std::vector<TensorCheck> tensors;
  double max_rel_error = 0.0;
  double threshold = kGradCheckThreshold;
  bool passed = false;
};

// |a - n| / max(|a|, |n|, 1e-8).
double RelativeError(double analytic, double numeric);

struct NamedTensor {
  std::string name;
  Tensor value;
};

// Builds a scalar from the leaves. Called once with gradients enabled and
// then repeatedly for central differences.
using ScalarBuilder =
    std::function<Var(Graph& g, const std::vector<Var>& leaves)>;

// Compares reverse-mode gradients of `build` with respect to every leaf
// against (f(x+h) - f(x-h)) / 2h per coordinate. Throws NonFiniteValue when
// f is not finite.
GradCheckReport CheckGradients(const std::string& name,
                               std::vector<NamedTensor> leaves,
                               const ScalarBuilder& build,
                               double h = kGradCheckStep,
                               double threshold = kGradCheckThreshold);

// Names every differentiable layer and topology that must have a check.
const std::vector<std::string>& RequiredChecks();
std::vector<std::string> RegisteredChecks();

// Runs one registered check over 20 random samples drawn from `seed` and
// reports the worst error per tensor. A sample is redrawn when it sits within
// 1e-3 of a ReLU, max-pool or weak-loss kink, or when a nonzero analytic
// gradient is below 1e-6 (too small for central differences to resolve).
// Throws InvalidConfig for an unknown name.
GradCheckReport RunCheck(const std::string& name, std::uint64_t seed,
                         double h = kGradCheckStep);

struct GradCheckSuite {
  std::vector<GradCheckReport> reports;
  std::vector<std::string> missing;  // required but not registered
  bool passed = false;
};

// Runs every registered check; fails when any required check is missing.
GradCheckSuite RunAllChecks(std::uint64_t seed, double h = kGradCheckStep);

}  // namespace delhate

#endif  // DELHATE_GRADCHECK_H_
