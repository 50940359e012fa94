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


#include "delhate/datasets.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "delhate/delimited.h"
#include "delhate/errors.h"
#include "delhate/rng.h"
#include "unit/test_support.h"

namespace delhate {
namespace {

using Fields = std::vector<std::string>;

TEST(CsvReaderTest, QuotesAndLineBreaks) {
  std::istringstream in("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\"two\nlines\",z\n");
  CsvReader reader(in);
  EXPECT_EQ(reader.Next()->fields, (Fields{"a", "b"}));
  EXPECT_EQ(reader.Next()->fields, (Fields{"x, y", "say \"hi\""}));
  const auto rec = reader.Next();
  EXPECT_EQ(rec->fields, (Fields{"two\nlines", "z"}));
  EXPECT_EQ(rec->line, 3u);
  EXPECT_FALSE(reader.Next().has_value());
}

TEST(CsvReaderTest, UnterminatedQuoteThrows) {
  std::istringstream in("a,\"never closed\n");
  CsvReader reader(in);
  EXPECT_THROW(reader.Next(), IoError);
}

TEST(TsvReaderTest, EscapesAndQuotes) {
  std::istringstream in("id\ttweet\n1\tline\\nbreak\\ttab\n2\t\"a \"\"q\"\"\"\n");
  TsvReader reader(in);
  EXPECT_EQ(reader.Next()->fields, (Fields{"id", "tweet"}));
  EXPECT_EQ(reader.Next()->fields, (Fields{"1", "line\nbreak\ttab"}));
  EXPECT_EQ(reader.Next()->fields, (Fields{"2", "a \"q\""}));
  EXPECT_FALSE(reader.Next().has_value());
}

TEST(LoadHonTest, FixtureFile) {
  const LabeledCorpus c = LoadHon(testing::FixturePath("hon_sample.csv"));
  EXPECT_EQ(c.size(), 6u);
  EXPECT_EQ(c.class_counts, (std::array<std::size_t, 3>{2, 2, 2}));
  ASSERT_EQ(c.issues.size(), 1u);
  EXPECT_EQ(c.posts[0].label, ClassLabel::kNeither);
  EXPECT_EQ(c.posts[1].text, "multi\nline, with comma");
  EXPECT_EQ(c.provenance, "hon");
}

TEST(LoadHonTest, MissingColumn) {
  const auto dir = testing::ScratchDir("hon");
  testing::WriteFile(dir / "bad.csv", "label,text\n0,x\n");
  EXPECT_THROW(LoadHon(dir / "bad.csv"), MissingColumn);
  EXPECT_THROW(LoadHon(dir / "absent.csv"), IoError);
}

TEST(OlidTest, LabelMapping) {
  EXPECT_EQ(MapOlidLabel("OFF", "TIN", "GRP"), ClassLabel::kHate);
  EXPECT_EQ(MapOlidLabel("OFF", "TIN", "IND"), ClassLabel::kOffensive);
  EXPECT_EQ(MapOlidLabel("OFF", "TIN", "OTH"), ClassLabel::kOffensive);
  EXPECT_EQ(MapOlidLabel("OFF", "UNT", "NULL"), ClassLabel::kOffensive);
  EXPECT_EQ(MapOlidLabel("NOT", "NULL", "NULL"), ClassLabel::kNeither);
  EXPECT_EQ(MapOlidLabel("NOT", "", ""), ClassLabel::kNeither);
  EXPECT_EQ(MapOlidLabel("MAYBE", "NULL", "NULL"), std::nullopt);
  EXPECT_EQ(MapOlidLabel("OFF", "TIN", "XYZ"), std::nullopt);
}

TEST(OlidTest, FixtureFile) {
  const LabeledCorpus c = LoadOlid(testing::FixturePath("olid_sample.tsv"));
  EXPECT_EQ(c.class_counts, (std::array<std::size_t, 3>{1, 2, 2}));
  EXPECT_EQ(c.issues.size(), 1u);
  EXPECT_EQ(c.provenance, "olid");
}

TEST(LinesTest, LabeledAndUnlabeled) {
  const auto dir = testing::ScratchDir("lines");
  testing::WriteFile(dir / "l.txt", "0\thate post\n\n2\tnice day\n9\tbad code\n");
  const LabeledCorpus c = LoadLabeledLines(dir / "l.txt");
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.issues.size(), 1u);
  EXPECT_EQ(c.posts[1].text, "nice day");

  testing::WriteFile(dir / "u.txt", "first\n\n   \nsecond\n");
  const auto posts = LoadUnlabeled(dir / "u.txt");
  ASSERT_EQ(posts.size(), 2u);
  EXPECT_FALSE(posts[0].label.has_value());
  EXPECT_EQ(posts[1].source_id, "unlabeled:4");
}

TEST(CombineTest, ConcatenatesAndJoinsProvenance) {
  LabeledCorpus a = testing::CountsCorpus(1, 2, 3);
  a.provenance = "hon";
  LabeledCorpus b = testing::CountsCorpus(4, 0, 1);
  b.provenance = "olid";
  const LabeledCorpus both[] = {a, b};
  const LabeledCorpus c = Combine(both);
  EXPECT_EQ(c.size(), 11u);
  EXPECT_EQ(c.class_counts, (std::array<std::size_t, 3>{5, 2, 4}));
  EXPECT_EQ(c.provenance, "hon+olid");
  EXPECT_NEAR(c.Share(ClassLabel::kHate), 5.0 / 11.0, 1e-15);
}

std::vector<ClassLabel> Labels(const LabeledCorpus& c) {
  std::vector<ClassLabel> out;
  for (const RawPost& p : c.posts) out.push_back(*p.label);
  return out;
}

TEST(SplitTest, RandomizedPartitionInvariants) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 3 + rng.Below(30), o = 3 + rng.Below(60),
                      n = 3 + rng.Below(40);
    const LabeledCorpus c = testing::CountsCorpus(h, o, n);
    SplitSpec spec;
    spec.seed = rng.NextU64();
    spec.train = 0.6 + 0.2 * rng.Uniform();
    spec.valid = (1.0 - spec.train) / 2;
    spec.test = 1.0 - spec.train - spec.valid;
    const auto labels = Labels(c);
    const auto parts = SplitIndices(labels, spec);

    std::vector<std::size_t> all;
    for (const auto& part : parts) {
      EXPECT_TRUE(std::is_sorted(part.begin(), part.end()));
      all.insert(all.end(), part.begin(), part.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(c.size());
    std::iota(expected.begin(), expected.end(), 0);
    ASSERT_EQ(all, expected) << "trial " << trial;

    // Every class reaches every part when stratified.
    for (const auto& part : parts) {
      std::set<ClassLabel> seen;
      for (std::size_t i : part) seen.insert(labels[i]);
      EXPECT_EQ(seen.size(), 3u) << "trial " << trial;
    }
    EXPECT_EQ(SplitIndices(labels, spec), parts);
  }
}

TEST(SplitTest, SizesFollowFractions) {
  const LabeledCorpus c = testing::CountsCorpus(100, 100, 100);
  SplitSpec spec{0.8, 0.1, 0.1, 3, true};
  const CorpusSplit s = SplitCorpus(c, spec);
  EXPECT_EQ(s.train.size(), 240u);
  EXPECT_EQ(s.valid.size(), 30u);
  EXPECT_EQ(s.test.size(), 30u);
  EXPECT_EQ(s.valid.class_counts, (std::array<std::size_t, 3>{10, 10, 10}));
  EXPECT_EQ(s.train.provenance, c.provenance + ":train");
}

TEST(SplitTest, Errors) {
  const LabeledCorpus c = testing::CountsCorpus(2, 10, 10);
  EXPECT_THROW(SplitCorpus(c, SplitSpec{0.8, 0.1, 0.1, 0, true}), CorpusTooSmall);
  EXPECT_NO_THROW(SplitCorpus(c, SplitSpec{0.8, 0.1, 0.1, 0, false}));
  EXPECT_THROW(SplitCorpus(c, SplitSpec{0.8, 0.3, 0.1, 0, false}), InvalidConfig);
  EXPECT_THROW(SplitCorpus(c, SplitSpec{1.2, -0.1, -0.1, 0, false}),
               InvalidConfig);
}

TEST(SplitTest, SeedChangesPartition) {
  const LabeledCorpus c = testing::CountsCorpus(20, 20, 20);
  const auto labels = Labels(c);
  EXPECT_NE(SplitIndices(labels, SplitSpec{0.8, 0.1, 0.1, 1, true}),
            SplitIndices(labels, SplitSpec{0.8, 0.1, 0.1, 2, true}));
}

}  // namespace
}  // namespace delhate
