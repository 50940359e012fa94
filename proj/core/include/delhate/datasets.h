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


#ifndef DELHATE_DATASETS_H_
#define DELHATE_DATASETS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delhate/labels.h"
#include "delhate/text_prep.h"

namespace delhate {

struct RowIssue {
  std::size_t row = 0;  // 1-based line number in the source file
  std::string message;
};

struct LabeledCorpus {
  std::vector<RawPost> posts;  // every post has a label
  std::string provenance;
  std::array<std::size_t, kNumClasses> class_counts{};
  std::vector<RowIssue> issues;  // rows skipped while loading

  std::size_t size() const { return posts.size(); }
  bool empty() const { return posts.empty(); }
  // Appends a labeled post and updates class_counts.
  void Add(RawPost post);
  double Share(ClassLabel label) const;
};

// HON layout: comma-separated with a header naming a `class` column
// (0 hate, 1 offensive, 2 neither) and a `tweet` column.
LabeledCorpus LoadHon(const std::filesystem::path& path);

// OLID layout: tab-separated with header columns `tweet`, `subtask_a`,
// `subtask_b`, `subtask_c`. OFF+GRP -> H, other OFF -> O, NOT -> N.
LabeledCorpus LoadOlid(const std::filesystem::path& path);

// Maps one OLID annotation triple; nullopt when subtask_a is not OFF/NOT or
// the other fields hold unknown values.
std::optional<ClassLabel> MapOlidLabel(std::string_view subtask_a,
                                       std::string_view subtask_b,
                                       std::string_view subtask_c);

// Line-per-post labeled text: "<class code>\t<text>" with HON class codes.
// Blank lines are ignored.
LabeledCorpus LoadLabeledLines(const std::filesystem::path& path);

// One post per line, labels absent; blank lines dropped.
std::vector<RawPost> LoadUnlabeled(const std::filesystem::path& path);

// Concatenates corpora. Provenance tags are joined with '+'.
LabeledCorpus Combine(std::span<const LabeledCorpus> corpora);

struct SplitSpec {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct CorpusSplit {
  LabeledCorpus train;
  LabeledCorpus valid;
  LabeledCorpus test;
};

// Disjoint, exhaustive, seed-deterministic partition. Posts keep their corpus
// order inside each part. Stratified splits keep each class within one post
// of its share per part and put at least one post of every class in each
// part with a positive fraction. Throws InvalidConfig when fractions do not
// sum to 1 and CorpusTooSmall when stratifying a class with fewer than 3
// posts.
CorpusSplit SplitCorpus(const LabeledCorpus& corpus, const SplitSpec& spec);

// Index form of SplitCorpus; each vector is sorted ascending.
std::array<std::vector<std::size_t>, 3> SplitIndices(
    std::span<const ClassLabel> labels, const SplitSpec& spec);

}  // namespace delhate

#endif  // DELHATE_DATASETS_H_
