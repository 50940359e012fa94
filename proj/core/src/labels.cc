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


#include "delhate/labels.h"

#include <string>

#include "delhate/errors.h"

namespace delhate {

ClassLabel LabelFromIndex(std::size_t index) {
  if (index >= kNumClasses) {
    throw ShapeMismatch("class index " + std::to_string(index) +
                        " out of range");
  }
  return static_cast<ClassLabel>(index);
}

std::string_view LabelName(ClassLabel label) {
  switch (label) {
    case ClassLabel::kHate:
      return "H";
    case ClassLabel::kOffensive:
      return "O";
    case ClassLabel::kNeither:
      return "N";
  }
  return "?";
}

std::optional<ClassLabel> ParseLabelName(std::string_view name) {
  if (name == "H") return ClassLabel::kHate;
  if (name == "O") return ClassLabel::kOffensive;
  if (name == "N") return ClassLabel::kNeither;
  return std::nullopt;
}

}  // namespace delhate
