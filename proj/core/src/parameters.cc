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


#include "delhate/parameters.h"

namespace delhate {

Parameter::Parameter(std::string name, Tensor value)
    : name(std::move(name)), value(std::move(value)) {
  grad = Tensor(this->value.shape());
}

Parameter& ParamGroup::Add(std::string param_name, Tensor value) {
  params.emplace_back(std::move(param_name), std::move(value));
  return params.back();
}

Parameter* ParamGroup::Find(std::string_view param_name) {
  for (Parameter& p : params) {
    if (p.name == param_name) return &p;
  }
  return nullptr;
}

const Parameter* ParamGroup::Find(std::string_view param_name) const {
  for (const Parameter& p : params) {
    if (p.name == param_name) return &p;
  }
  return nullptr;
}

std::size_t ParamGroup::ElementCount() const {
  std::size_t n = 0;
  for (const Parameter& p : params) n += p.value.size();
  return n;
}

void ParamGroup::ZeroGrad() {
  for (Parameter& p : params) p.grad.Fill(0.0);
}

// Gradients are scratch space and do not take part in equality.
bool operator==(const ParamGroup& a, const ParamGroup& b) {
  if (a.name != b.name || a.trainable != b.trainable ||
      a.params.size() != b.params.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name ||
        !(a.params[i].value == b.params[i].value)) {
      return false;
    }
  }
  return true;
}

}  // namespace delhate
