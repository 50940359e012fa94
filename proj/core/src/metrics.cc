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


#include "delhate/metrics.h"

#include <cstdio>

namespace delhate {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : cells) {
    for (std::uint64_t v : row) t += v;
  }
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      cells[i][j] += other.cells[i][j];
    }
  }
  return *this;
}

ConfusionMatrix Accumulate(
    std::span<const std::pair<ClassLabel, ClassLabel>> pairs) {
  ConfusionMatrix cm;
  for (const auto& [truth, predicted] : pairs) cm.Add(truth, predicted);
  return cm;
}

namespace {

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport Report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.total = cm.total();
  std::uint64_t trace = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      row += cm.cells[c][k];
      col += cm.cells[k][c];
    }
    const std::uint64_t tp = cm.cells[c][c];
    trace += tp;
    r.support[c] = row;
    r.recall[c] = Ratio(tp, row);
    r.precision[c] = Ratio(tp, col);
    const double denom = r.precision[c] + r.recall[c];
    r.f1[c] = denom == 0.0 ? 0.0 : 2.0 * r.precision[c] * r.recall[c] / denom;
    f1_sum += r.f1[c];
  }
  r.macro_f1 = f1_sum / static_cast<double>(kNumClasses);
  r.micro_f1 = Ratio(trace, r.total);
  r.hate_recall = r.recall[Index(ClassLabel::kHate)];
  return r;
}

std::string FormatKeyValue(const MetricsReport& report,
                           const ConfusionMatrix& cm) {
  std::string out;
  char buf[96];
  auto line = [&](const std::string& key, double value) {
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    out += key + "=" + buf + "\n";
  };
  out += "total=" + std::to_string(report.total) + "\n";
  line("hate_recall", report.hate_recall);
  line("macro_f1", report.macro_f1);
  line("micro_f1", report.micro_f1);
  for (ClassLabel label : kAllLabels) {
    const std::size_t c = Index(label);
    const std::string name(LabelName(label));
    line("precision_" + name, report.precision[c]);
    line("recall_" + name, report.recall[c]);
    line("f1_" + name, report.f1[c]);
    out += "support_" + name + "=" + std::to_string(report.support[c]) + "\n";
  }
  for (ClassLabel truth : kAllLabels) {
    for (ClassLabel pred : kAllLabels) {
      out += "cm_" + std::string(LabelName(truth)) + "_" +
             std::string(LabelName(pred)) + "=" +
             std::to_string(cm.cells[Index(truth)][Index(pred)]) + "\n";
    }
  }
  return out;
}

}  // namespace delhate
