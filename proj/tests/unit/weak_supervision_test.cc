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

#include <cmath>

#include <gtest/gtest.h>

#include "delhate/errors.h"
#include "delhate/graph.h"
#include "delhate/rng.h"
#include "unit/test_support.h"

namespace delhate {
namespace {

ClassBounds Bounds(std::array<double, 3> lo, std::array<double, 3> hi) {
  ClassBounds b;
  b.lower = lo;
  b.upper = hi;
  return b;
}

TEST(WeakLossTest, ZeroInsideBounds) {
  const ClassBounds b = Bounds({0.1, 0.0, 0.2}, {0.6, 0.5, 0.9});
  const std::array<double, 3> y = {0.3, 0.2, 0.5};
  EXPECT_EQ(WeakLoss(y, b, {}), 0.0);
  const std::array<double, 3> edge = {0.1, 0.0, 0.9};
  EXPECT_EQ(WeakLoss(edge, b, {}), 0.0);
}

TEST(WeakLossTest, ViolatedLowerBoundFixture) {
  const ClassBounds b = Bounds({0.5, 0.0, 0.0}, {1.0, 1.0, 1.0});
  const std::array<double, 3> y = {0.2, 0.5, 0.3};
  EXPECT_NEAR(WeakLoss(y, b, {}), 0.356675, 1e-6);
  ClassWeights w;
  w.w = {4.0, 1.0, 1.0};
  EXPECT_NEAR(WeakLoss(y, b, w), 1.426700, 1e-6);
}

TEST(WeakLossTest, UpperBoundAndClamp) {
  const ClassBounds b = Bounds({0, 0, 0}, {1.0, 0.25, 1.0});
  const std::array<double, 3> y = {0.1, 0.75, 0.15};
  EXPECT_NEAR(WeakLoss(y, b, {}), -std::log(0.5), 1e-15);
  // 1 + y - lb can reach 0 only at y = 0, lb = 1; the clamp keeps it finite.
  const std::array<double, 3> z = {0.0, 0.5, 0.5};
  EXPECT_NEAR(WeakLoss(z, Bounds({1, 0, 0}, {1, 1, 1}), {}), -std::log(1e-12),
              1e-9);
}

TEST(WeakLossTest, NodeMatchesScalarAndGradientSigns) {
  const ClassBounds b = Bounds({0.5, 0.0, 0.0}, {1.0, 0.3, 1.0});
  Tensor y = Tensor::Vector({0.2, 0.5, 0.3});
  Tensor grad({3});
  Graph g;
  const Var loss = WeakLossNode(g, g.Leaf(&y, &grad), b, {});
  EXPECT_NEAR(g.value(loss)[0], WeakLoss(y.values(), b, {}), 1e-15);
  g.Backward(loss);
  EXPECT_NEAR(grad[0], -1.0 / 0.7, 1e-12);  // push y_H up
  EXPECT_NEAR(grad[1], 1.0 / 0.8, 1e-12);   // push y_O down
  EXPECT_EQ(grad[2], 0.0);
}

TEST(BoundsTest, NoTokensIsVacuous) {
  const ClassBounds b = ComputeBounds(LexiconCounts{}, 1.0);
  EXPECT_TRUE(b.vacuous());
  EXPECT_EQ(b.lower, (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(b.upper, (std::array<double, 3>{1, 1, 1}));
}

TEST(BoundsTest, WorkedExample) {
  // 10 unique tokens: 2 hateful, 1 offensive, 3 positive.
  const ClassBounds b = ComputeBounds(LexiconCounts{10, 2, 1, 3}, 1.0);
  EXPECT_NEAR(b.lower[0], 0.2, 1e-15);
  EXPECT_NEAR(b.lower[1], 0.1, 1e-15);
  EXPECT_NEAR(b.lower[2], 0.3, 1e-15);
  EXPECT_NEAR(b.upper[0], 0.7, 1e-15);
  EXPECT_NEAR(b.upper[1], 0.7, 1e-15);
  EXPECT_NEAR(b.upper[2], 0.7, 1e-15);
  EXPECT_THROW(ComputeBounds(LexiconCounts{1, 1, 0, 0}, 0.0), InvalidConfig);
}

TEST(BoundsTest, RandomCountsStayOrdered) {
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    LexiconCounts c;
    c.n = rng.Below(60);
    if (c.n > 0) {
      c.n_hate = rng.Below(c.n + 1);
      c.n_offensive = rng.Below(c.n - c.n_hate + 1);
      c.n_positive = rng.Below(c.n - c.n_hate - c.n_offensive + 1);
    }
    const double k = rng.Uniform(0.1, 8.0);
    const ClassBounds b = ComputeBounds(c, k);
    ASSERT_TRUE(b.valid()) << "n=" << c.n << " k=" << k;
    if (c.n == 0) {
      ASSERT_TRUE(b.vacuous());
    }
  }
}

TEST(LexiconTest, PriorityStemmingAndCounts) {
  const std::vector<std::string> hate = {"Vermin", "invaders", "two words"};
  const std::vector<std::string> off = {"idiots", "vermin"};
  const std::vector<std::string> pos = {"love", "happy"};
  std::vector<std::string> warnings;
  const Lexicon lex = MakeLexicon(hate, off, pos, &warnings);
  EXPECT_TRUE(lex.hate.contains("vermin"));
  EXPECT_TRUE(lex.hate.contains("invad"));
  EXPECT_FALSE(lex.offensive.contains("vermin"));
  EXPECT_TRUE(lex.offensive.contains("idiot"));
  EXPECT_TRUE(lex.positive.contains("happi"));
  EXPECT_EQ(warnings.size(), 2u);

  const LexiconCounts c = CountLexicon(
      Preprocess(std::string_view("@x vermin VERMIN invaders idiots, love it")), lex);
  EXPECT_EQ(c, (LexiconCounts{6, 2, 1, 1}));
}

TEST(LexiconTest, FileLoading) {
  const auto dir = testing::ScratchDir("lex");
  testing::WriteFile(dir / "hate.txt", "# comment\nvermin\n\n  parasite \n");
  EXPECT_EQ(ReadLexiconFile(dir / "hate.txt"),
            (std::vector<std::string>{"vermin", "parasite"}));
  const Lexicon lex = LoadLexicon(dir / "hate.txt", "", "");
  EXPECT_EQ(lex.hate.size(), 2u);
  EXPECT_TRUE(lex.offensive.empty());
  EXPECT_THROW(ReadLexiconFile(dir / "nope.txt"), IoError);
}

TEST(WeakStatsTest, CountsAndImbalanceWeights) {
  const std::vector<std::string> hate = {"vermin"};
  const std::vector<std::string> off = {"idiot"};
  const std::vector<std::string> pos = {"love"};
  const Lexicon lex = MakeLexicon(hate, off, pos);
  std::vector<RawPost> posts;
  for (const char* t : {"vermin here", "idiot there", "idiot again", "love all",
                        "love you", "love it", "love this", "nothing"}) {
    posts.push_back(RawPost{t, std::nullopt, ""});
  }
  const WeakLabelStats s = ComputeWeakLabelStats(posts, lex);
  EXPECT_EQ(s.posts, 8u);
  EXPECT_EQ(s.raised_lower, (std::array<std::size_t, 3>{1, 2, 4}));
  EXPECT_EQ(s.vacuous, 1u);
  const ClassWeights w = ImbalanceWeights(s);
  // Proportional to 1, 1/2, 1/4, normalized to mean 1.
  const double z = (1.0 + 0.5 + 0.25) / 3.0;
  EXPECT_NEAR(w.w[0], 1.0 / z, 1e-12);
  EXPECT_NEAR(w.w[1], 0.5 / z, 1e-12);
  EXPECT_NEAR(w.w[2], 0.25 / z, 1e-12);
}

}  // namespace
}  // namespace delhate
