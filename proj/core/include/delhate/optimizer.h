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


#ifndef DELHATE_OPTIMIZER_H_
#define DELHATE_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "delhate/parameters.h"
#include "delhate/tensor.h"

namespace delhate {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive moment estimation with bias correction:
//   m = b1 m + (1-b1) g,  v = b2 v + (1-b2) g^2
//   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
// Groups with trainable == false are skipped entirely: their values and
// moments are left untouched.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  std::int64_t step_count() const { return step_; }

  // Applies one update to every trainable group using the stored grads.
  void Step(std::span<ParamGroup* const> groups);

  // Moments of a parameter, keyed "group/param"; nullptr before first step.
  const Tensor* first_moment(const std::string& key) const;
  const Tensor* second_moment(const std::string& key) const;

 private:
  struct Moments {
    Tensor m;
    Tensor v;
  };

  AdamOptions options_;
  std::int64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace delhate

#endif  // DELHATE_OPTIMIZER_H_
