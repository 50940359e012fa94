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


#ifndef DELHATE_WEAK_SUPERVISION_H_
#define DELHATE_WEAK_SUPERVISION_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "delhate/graph.h"
#include "delhate/labels.h"
#include "delhate/text_prep.h"

namespace delhate {

// Three disjoint sets of stemmed single tokens.
struct Lexicon {
  std::unordered_set<std::string> hate;
  std::unordered_set<std::string> offensive;
  std::unordered_set<std::string> positive;

  bool empty() const {
    return hate.empty() && offensive.empty() && positive.empty();
  }
};

// Lowercases and stems raw entries. A term listed twice keeps the first list
// in priority order hate > offensive > positive; each conflict and each
// multi-word entry (skipped) produces a warning.
Lexicon MakeLexicon(std::span<const std::string> hate,
                    std::span<const std::string> offensive,
                    std::span<const std::string> positive,
                    std::vector<std::string>* warnings = nullptr);

// One term per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> ReadLexiconFile(const std::filesystem::path& path);

Lexicon LoadLexicon(const std::filesystem::path& hate,
                    const std::filesystem::path& offensive,
                    const std::filesystem::path& positive,
                    std::vector<std::string>* warnings = nullptr);

struct LexiconCounts {
  std::size_t n = 0;  // unique tokens in the post
  std::size_t n_hate = 0;
  std::size_t n_offensive = 0;
  std::size_t n_positive = 0;

  friend bool operator==(const LexiconCounts&, const LexiconCounts&) = default;
};

// Counts over the set of unique tokens (sentinels included in n).
LexiconCounts CountLexicon(const TokenSequence& seq, const Lexicon& lexicon);

struct ClassBounds {
  std::array<double, kNumClasses> lower{0.0, 0.0, 0.0};
  std::array<double, kNumClasses> upper{1.0, 1.0, 1.0};

  // True when no class is constrained (all lower 0, all upper 1).
  bool vacuous() const;
  bool valid() const;  // 0 <= lower <= upper <= 1
};

inline constexpr double kDefaultBoundScale = 1.0;

// With ratios r_h, r_o, r_p = counts / n and scale k:
//   lb_H = min(1, k r_h)   ub_H = 1 - min(1, k r_p)
//   lb_O = min(1, k r_o)   ub_O = 1 - min(1, k r_p)
//   lb_N = min(1, k r_p)   ub_N = 1 - min(1, k (r_h + r_o))
// then ub_c = max(ub_c, lb_c). n == 0 yields lb = 0, ub = 1.
ClassBounds ComputeBounds(const LexiconCounts& counts,
                          double k = kDefaultBoundScale);

struct ClassWeights {
  std::array<double, kNumClasses> w{1.0, 1.0, 1.0};
};

// f(y) = sum_c w_c * ( -log(min(1, 1 + y_c - lb_c))
//                      -log(min(1, 1 + ub_c - y_c)) )
// with each log argument clamped below at 1e-12. Zero iff lb <= y <= ub.
double WeakLoss(std::span<const double> y, const ClassBounds& bounds,
                const ClassWeights& weights);

// Graph form of WeakLoss; `probs` is a length-3 vector node. The gradient is
// the subgradient that is zero inside the bounds.
Var WeakLossNode(Graph& g, Var probs, const ClassBounds& bounds,
                 const ClassWeights& weights);

struct WeakLabelStats {
  std::size_t posts = 0;
  // Posts whose class c has lb_c > 0 or ub_c < 1.
  std::array<std::size_t, kNumClasses> constrained{};
  // Posts whose class c has lb_c > 0.
  std::array<std::size_t, kNumClasses> raised_lower{};
  // Posts with every class unconstrained.
  std::size_t vacuous = 0;
};

WeakLabelStats ComputeWeakLabelStats(std::span<const RawPost> corpus,
                                     const Lexicon& lexicon,
                                     double k = kDefaultBoundScale);
WeakLabelStats ComputeWeakLabelStats(std::span<const TokenSequence> corpus,
                                     const Lexicon& lexicon,
                                     double k = kDefaultBoundScale);

// "imbalance" preset: w_c proportional to 1 / rate_c where rate_c is the
// fraction of posts with lb_c > 0 (floored at one post), normalized so the
// weights average to 1.
ClassWeights ImbalanceWeights(const WeakLabelStats& stats);

}  // namespace delhate

#endif  // DELHATE_WEAK_SUPERVISION_H_
