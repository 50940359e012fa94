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


#ifndef DELHATE_METRICS_H_
#define DELHATE_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "delhate/labels.h"

namespace delhate {

// Rows are true classes, columns predicted classes, both in H, O, N order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> cells{};

  void Add(ClassLabel truth, ClassLabel predicted) {
    ++cells[Index(truth)][Index(predicted)];
  }
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) =
      default;
};

ConfusionMatrix Accumulate(
    std::span<const std::pair<ClassLabel, ClassLabel>> pairs);

struct MetricsReport {
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  std::array<std::uint64_t, kNumClasses> support{};
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double hate_recall = 0.0;
  std::uint64_t total = 0;
};

// Zero denominators give 0 for that precision, recall or F1.
MetricsReport Report(const ConfusionMatrix& cm);

// "key=value" lines with the frozen field names listed in the README.
std::string FormatKeyValue(const MetricsReport& report,
                           const ConfusionMatrix& cm);

}  // namespace delhate

#endif  // DELHATE_METRICS_H_
