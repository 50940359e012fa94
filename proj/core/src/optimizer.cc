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


#include "delhate/optimizer.h"

#include <cmath>

namespace delhate {

void Adam::Step(std::span<ParamGroup* const> groups) {
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(options_.beta1, t);
  const double correction2 = 1.0 - std::pow(options_.beta2, t);
  for (ParamGroup* group : groups) {
    if (!group->trainable) continue;
    for (Parameter& p : group->params) {
      Moments& mom = moments_[group->name + "/" + p.name];
      if (mom.m.size() != p.value.size() || !mom.m.SameShape(p.value)) {
        mom.m = Tensor(p.value.shape());
        mom.v = Tensor(p.value.shape());
      }
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        const double g = p.grad[i];
        mom.m[i] = options_.beta1 * mom.m[i] + (1.0 - options_.beta1) * g;
        mom.v[i] = options_.beta2 * mom.v[i] + (1.0 - options_.beta2) * g * g;
        const double m_hat = mom.m[i] / correction1;
        const double v_hat = mom.v[i] / correction2;
        p.value[i] -= options_.learning_rate * m_hat /
                      (std::sqrt(v_hat) + options_.epsilon);
      }
    }
  }
}

const Tensor* Adam::first_moment(const std::string& key) const {
  auto it = moments_.find(key);
  return it == moments_.end() ? nullptr : &it->second.m;
}

const Tensor* Adam::second_moment(const std::string& key) const {
  auto it = moments_.find(key);
  return it == moments_.end() ? nullptr : &it->second.v;
}

}  // namespace delhate
