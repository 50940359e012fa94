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


#include "delhate/weak_supervision.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "delhate/errors.h"
#include "delhate/layers.h"

namespace delhate {
namespace {

// Lexicon entries go through the same pipeline as post text so that "Hates"
// in a list matches "hating" in a post when both stem to "hate".
std::optional<std::string> PrepareTerm(const std::string& raw,
                                       std::vector<std::string>* warnings) {
  const TokenSequence seq = Preprocess(std::string_view(raw));
  if (seq.tokens.empty()) return std::nullopt;
  if (seq.tokens.size() > 1) {
    if (warnings) warnings->push_back("skipping multi-word entry '" + raw + "'");
    return std::nullopt;
  }
  return seq.tokens.front();
}

}  // namespace

Lexicon MakeLexicon(std::span<const std::string> hate,
                    std::span<const std::string> offensive,
                    std::span<const std::string> positive,
                    std::vector<std::string>* warnings) {
  Lexicon lex;
  const std::span<const std::string> lists[3] = {hate, offensive, positive};
  std::unordered_set<std::string>* sets[3] = {&lex.hate, &lex.offensive,
                                              &lex.positive};
  const char* names[3] = {"hate", "offensive", "positive"};
  for (int i = 0; i < 3; ++i) {
    for (const std::string& raw : lists[i]) {
      const auto term = PrepareTerm(raw, warnings);
      if (!term) continue;
      bool taken = false;
      for (int j = 0; j < i; ++j) {
        if (sets[j]->contains(*term)) {
          if (warnings) {
            warnings->push_back("term '" + *term + "' listed as " + names[i] +
                                " and " + names[j] + "; keeping " + names[j]);
          }
          taken = true;
          break;
        }
      }
      if (!taken) sets[i]->insert(*term);
    }
  }
  return lex;
}

std::vector<std::string> ReadLexiconFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    terms.push_back(line.substr(first, last - first + 1));
  }
  return terms;
}

Lexicon LoadLexicon(const std::filesystem::path& hate,
                    const std::filesystem::path& offensive,
                    const std::filesystem::path& positive,
                    std::vector<std::string>* warnings) {
  auto read = [](const std::filesystem::path& p) {
    return p.empty() ? std::vector<std::string>{} : ReadLexiconFile(p);
  };
  const auto h = read(hate);
  const auto o = read(offensive);
  const auto p = read(positive);
  return MakeLexicon(h, o, p, warnings);
}

LexiconCounts CountLexicon(const TokenSequence& seq, const Lexicon& lexicon) {
  const std::unordered_set<std::string> unique(seq.tokens.begin(),
                                               seq.tokens.end());
  LexiconCounts counts;
  counts.n = unique.size();
  for (const std::string& t : unique) {
    if (lexicon.hate.contains(t)) {
      ++counts.n_hate;
    } else if (lexicon.offensive.contains(t)) {
      ++counts.n_offensive;
    } else if (lexicon.positive.contains(t)) {
      ++counts.n_positive;
    }
  }
  return counts;
}

bool ClassBounds::vacuous() const {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (lower[c] > 0.0 || upper[c] < 1.0) return false;
  }
  return true;
}

bool ClassBounds::valid() const {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (!(lower[c] >= 0.0 && lower[c] <= upper[c] && upper[c] <= 1.0)) {
      return false;
    }
  }
  return true;
}

ClassBounds ComputeBounds(const LexiconCounts& counts, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw InvalidConfig("bound scale must be a positive finite number");
  }
  ClassBounds b;
  if (counts.n == 0) return b;
  const double n = static_cast<double>(counts.n);
  const double r_h = static_cast<double>(counts.n_hate) / n;
  const double r_o = static_cast<double>(counts.n_offensive) / n;
  const double r_p = static_cast<double>(counts.n_positive) / n;
  auto cap = [k](double r) { return std::min(1.0, k * r); };
  const std::size_t h = Index(ClassLabel::kHate);
  const std::size_t o = Index(ClassLabel::kOffensive);
  const std::size_t nn = Index(ClassLabel::kNeither);
  b.lower[h] = cap(r_h);
  b.upper[h] = 1.0 - cap(r_p);
  b.lower[o] = cap(r_o);
  b.upper[o] = 1.0 - cap(r_p);
  b.lower[nn] = cap(r_p);
  b.upper[nn] = 1.0 - cap(r_h + r_o);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    b.upper[c] = std::max(b.upper[c], b.lower[c]);
  }
  return b;
}

double WeakLoss(std::span<const double> y, const ClassBounds& bounds,
                const ClassWeights& weights) {
  if (y.size() != kNumClasses) {
    throw ShapeMismatch("WeakLoss expects 3 probabilities");
  }
  // min(1, 1 + y - lb) is written as 1 - max(0, lb - y) so that a
  // probability sitting exactly on a bound gives exactly log(1).
  double loss = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double a = 1.0 - std::max(0.0, bounds.lower[c] - y[c]);
    const double b = 1.0 - std::max(0.0, y[c] - bounds.upper[c]);
    loss += weights.w[c] * (-std::log(std::max(a, kLogEpsilon)) -
                            std::log(std::max(b, kLogEpsilon)));
  }
  // -log(1) is -0.0; report a clean zero inside the bounds.
  return loss + 0.0;
}

Var WeakLossNode(Graph& g, Var probs, const ClassBounds& bounds,
                 const ClassWeights& weights) {
  const Tensor& y = g.value(probs);
  if (y.rank() != 1 || y.size() != kNumClasses) {
    throw ShapeMismatch("WeakLossNode expects a length-3 vector, got " +
                        ShapeString(y.shape()));
  }
  const double loss = WeakLoss(y.values(), bounds, weights);
  return g.Record(
      Tensor::Scalar(loss), {probs},
      [probs, bounds, weights](Graph& gr, Var self) {
        const double up = gr.grad(self)[0];
        const Tensor& yv = gr.value(probs);
        Tensor& dy = gr.grad(probs);
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          const double a = 1.0 - std::max(0.0, bounds.lower[c] - yv[c]);
          const double b = 1.0 - std::max(0.0, yv[c] - bounds.upper[c]);
          if (a < 1.0 && a > kLogEpsilon) dy[c] -= up * weights.w[c] / a;
          if (b < 1.0 && b > kLogEpsilon) dy[c] += up * weights.w[c] / b;
        }
      });
}

namespace {

void Tally(WeakLabelStats& stats, const ClassBounds& b) {
  ++stats.posts;
  if (b.vacuous()) ++stats.vacuous;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (b.lower[c] > 0.0 || b.upper[c] < 1.0) ++stats.constrained[c];
    if (b.lower[c] > 0.0) ++stats.raised_lower[c];
  }
}

}  // namespace

WeakLabelStats ComputeWeakLabelStats(std::span<const TokenSequence> corpus,
                                     const Lexicon& lexicon, double k) {
  WeakLabelStats stats;
  for (const TokenSequence& seq : corpus) {
    Tally(stats, ComputeBounds(CountLexicon(seq, lexicon), k));
  }
  return stats;
}

WeakLabelStats ComputeWeakLabelStats(std::span<const RawPost> corpus,
                                     const Lexicon& lexicon, double k) {
  WeakLabelStats stats;
  for (const RawPost& post : corpus) {
    Tally(stats, ComputeBounds(CountLexicon(Preprocess(post), lexicon), k));
  }
  return stats;
}

ClassWeights ImbalanceWeights(const WeakLabelStats& stats) {
  ClassWeights out;
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double hits =
        std::max<double>(1.0, static_cast<double>(stats.raised_lower[c]));
    out.w[c] = 1.0 / hits;
    sum += out.w[c];
  }
  for (double& w : out.w) w *= static_cast<double>(kNumClasses) / sum;
  return out;
}

}  // namespace delhate
