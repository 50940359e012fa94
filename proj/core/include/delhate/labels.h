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


#ifndef DELHATE_LABELS_H_
#define DELHATE_LABELS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace delhate {

// Ordinal encoding is fixed: H=0, O=1, N=2. Tie-break rules depend on it.
enum class ClassLabel : std::uint8_t {
  kHate = 0,
  kOffensive = 1,
  kNeither = 2,
};

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<ClassLabel, kNumClasses> kAllLabels = {
    ClassLabel::kHate, ClassLabel::kOffensive, ClassLabel::kNeither};

constexpr std::size_t Index(ClassLabel label) {
  return static_cast<std::size_t>(label);
}

ClassLabel LabelFromIndex(std::size_t index);

// "H", "O" or "N".
std::string_view LabelName(ClassLabel label);
std::optional<ClassLabel> ParseLabelName(std::string_view name);

}  // namespace delhate

#endif  // DELHATE_LABELS_H_
