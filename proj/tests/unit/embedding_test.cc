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


#include "delhate/embedding.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "delhate/errors.h"
#include "unit/test_support.h"

namespace delhate {
namespace {

TokenSequence Seq(std::vector<std::string> tokens) {
  TokenSequence s;
  s.surface = tokens;
  s.tokens = std::move(tokens);
  return s;
}

double Norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

TEST(LoadTableTest, ThreeLines) {
  const auto dir = testing::ScratchDir("emb");
  testing::WriteFile(dir / "v.txt",
                     "cat 1 2 3 4\ndog 0.5 -1 2e-1 0\nbird 0 0 0 1\n");
  TableLoadReport report;
  const EmbeddingTable t = LoadTable(dir / "v.txt", 4, &report);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.dim(), 4u);
  EXPECT_EQ(report.loaded, 3u);
  std::vector<double> v(4);
  ASSERT_TRUE(t.Lookup("dog", v));
  EXPECT_EQ(v, (std::vector<double>{0.5, -1.0, 0.2f, 0.0}));
  EXPECT_FALSE(t.Lookup("fish", v));
}

TEST(LoadTableTest, MalformedLineSkipped) {
  const auto dir = testing::ScratchDir("emb");
  std::string text;
  for (int i = 0; i < 10; ++i) {
    text += "w" + std::to_string(i) + (i == 6 ? " 1 2\n" : " 1 2 3\n");
  }
  testing::WriteFile(dir / "v.txt", text);
  TableLoadReport report;
  const EmbeddingTable t = LoadTable(dir / "v.txt", 3, &report);
  EXPECT_EQ(t.size(), 9u);
  EXPECT_EQ(report.skipped, 1u);
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].line, 7u);
}

TEST(LoadTableTest, HeaderDuplicatesAndEmpty) {
  const auto dir = testing::ScratchDir("emb");
  testing::WriteFile(dir / "v.txt", "2 2\na 1 0\na 0 1\nb 1 1\n");
  TableLoadReport report;
  const EmbeddingTable t = LoadTable(dir / "v.txt", 2, &report);
  EXPECT_TRUE(report.header_skipped);
  EXPECT_EQ(report.duplicates, 1u);
  std::vector<double> v(2);
  ASSERT_TRUE(t.Lookup("a", v));
  EXPECT_EQ(v, (std::vector<double>{1.0, 0.0}));  // first occurrence kept

  testing::WriteFile(dir / "empty.txt", "");
  EXPECT_THROW(LoadTable(dir / "empty.txt", 2), EmptyTable);
  EXPECT_THROW(LoadTable(dir / "missing.txt", 2), IoError);
}

TEST(SyntheticTableTest, DeterministicUnitVectors) {
  const EmbeddingTable a = EmbeddingTable::Synthetic(7, 16);
  const EmbeddingTable b = EmbeddingTable::Synthetic(7, 16);
  std::vector<double> x(16), y(16), z(16);
  for (const char* token : {"hate", "love", "MENTIONHERE", "zzz", "\xC3\xA9t\xC3\xA9"}) {
    ASSERT_TRUE(a.Lookup(token, x));
    ASSERT_TRUE(b.Lookup(token, y));
    EXPECT_EQ(x, y);
    EXPECT_NEAR(Norm(x), 1.0, 1e-6);
  }
  a.Lookup("hate", x);
  a.Lookup("love", y);
  EXPECT_NE(x, y);
  EmbeddingTable::Synthetic(8, 16).Lookup("hate", z);
  EXPECT_NE(x, z);
  EXPECT_EQ(a.name(), "synthetic:7:16");
}

TEST(SyntheticTableTest, FrozenVector) {
  // Portable generator: these values must not change across platforms.
  const EmbeddingTable t = EmbeddingTable::Synthetic(1, 4);
  std::vector<double> v(4);
  t.Lookup("hate", v);
  const std::vector<double> again = v;
  t.Lookup("hate", v);
  EXPECT_EQ(v, again);
  EXPECT_NEAR(Norm(v), 1.0, 1e-6);
}

TEST(EmbedTest, EmptySequence) {
  const EmbeddingTable t = EmbeddingTable::Synthetic(1, 3);
  const TokenMatrix m = Embed(Seq({}), t, 5);
  EXPECT_EQ(m.rows, 5u);
  EXPECT_EQ(m.cols, 3u);
  EXPECT_EQ(m.n_real, 0u);
  for (double v : m.values) EXPECT_EQ(v, 0.0);
}

TEST(EmbedTest, LeftPaddingAndOrder) {
  const EmbeddingTable t = EmbeddingTable::FromVectors(
      "fixture", 2, {{"a", {1, 2}}, {"b", {3, 4}}, {"c", {5, 6}}});
  const TokenMatrix m = Embed(Seq({"a", "b", "c"}), t, 5);
  EXPECT_EQ(m.n_real, 3u);
  const std::vector<double> expected = {0, 0, 0, 0, 1, 2, 3, 4, 5, 6};
  EXPECT_EQ(m.values, expected);
}

TEST(EmbedTest, TruncatesToFirstTokens) {
  const EmbeddingTable t = EmbeddingTable::Synthetic(3, 4);
  std::vector<std::string> tokens;
  for (int i = 0; i < 120; ++i) tokens.push_back("t" + std::to_string(i));
  const TokenMatrix m = Embed(Seq(tokens), t, 100);
  EXPECT_EQ(m.rows, 100u);
  EXPECT_EQ(m.n_real, 100u);
  std::vector<double> v(4);
  t.Lookup("t99", v);
  EXPECT_EQ(std::vector<double>(m.row(99).begin(), m.row(99).end()), v);
  t.Lookup("t0", v);
  EXPECT_EQ(std::vector<double>(m.row(0).begin(), m.row(0).end()), v);
}

TEST(EmbedTest, OovFallsBackToSurfaceThenZero) {
  const EmbeddingTable t =
      EmbeddingTable::FromVectors("fixture", 2, {{"running", {1, 1}}});
  TokenSequence seq;
  seq.tokens = {"run", "xyz"};
  seq.surface = {"running", "xyz"};
  const TokenMatrix m = Embed(seq, t, 2);
  EXPECT_EQ(m.values, (std::vector<double>{1, 1, 0, 0}));
  EXPECT_EQ(m.n_real, 2u);
}

TEST(EmbedTest, ShapeAndPaddingInvariants) {
  const EmbeddingTable t = EmbeddingTable::Synthetic(5, 3);
  for (std::size_t n = 0; n < 15; ++n) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i));
    const TokenMatrix m = Embed(Seq(tokens), t, 8);
    ASSERT_EQ(m.values.size(), 8u * 3u);
    double pad = 0.0;
    for (std::size_t r = 0; r < m.rows - m.n_real; ++r) {
      for (double v : m.row(r)) pad += std::abs(v);
    }
    EXPECT_EQ(pad, 0.0);
    EXPECT_EQ(m.n_real, std::min<std::size_t>(n, 8));
  }
}

TEST(OpenEmbeddingsTest, SyntheticSpec) {
  EXPECT_EQ(OpenEmbeddings("synthetic:4:10", 300).dim(), 10u);
  EXPECT_THROW(OpenEmbeddings("synthetic:x:10", 300), InvalidConfig);
  EXPECT_THROW(OpenEmbeddings("synthetic:1:0", 300), InvalidConfig);
}

}  // namespace
}  // namespace delhate
