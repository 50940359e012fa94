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


#ifndef DELHATE_PARAMETERS_H_
#define DELHATE_PARAMETERS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "delhate/tensor.h"

namespace delhate {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // same shape as value

  Parameter() = default;
  Parameter(std::string name, Tensor value);
};

// A named set of parameters that is frozen or trained as a unit.
struct ParamGroup {
  std::string name;
  bool trainable = true;
  std::vector<Parameter> params;

  Parameter& Add(std::string param_name, Tensor value);
  Parameter* Find(std::string_view param_name);
  const Parameter* Find(std::string_view param_name) const;
  std::size_t ElementCount() const;
  void ZeroGrad();

  friend bool operator==(const ParamGroup& a, const ParamGroup& b);
};

}  // namespace delhate

#endif  // DELHATE_PARAMETERS_H_
