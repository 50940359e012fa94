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
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "delhate/delimited.h"
#include "delhate/errors.h"
#include "delhate/rng.h"

namespace delhate {
namespace {

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::string Trim(std::string_view s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return std::string(s.substr(lo, hi - lo));
}

std::size_t FindColumn(const std::vector<std::string>& header,
                       std::string_view name, const std::string& file) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (Trim(header[i]) == name) return i;
  }
  throw MissingColumn("column '" + std::string(name) + "' not found in " +
                      file);
}

std::optional<ClassLabel> ParseHonCode(std::string_view field) {
  const std::string code = Trim(field);
  if (code == "0") return ClassLabel::kHate;
  if (code == "1") return ClassLabel::kOffensive;
  if (code == "2") return ClassLabel::kNeither;
  return std::nullopt;
}

}  // namespace

void LabeledCorpus::Add(RawPost post) {
  if (!post.label) throw InvalidConfig("labeled corpus post without label");
  ++class_counts[Index(*post.label)];
  posts.push_back(std::move(post));
}

double LabeledCorpus::Share(ClassLabel label) const {
  if (posts.empty()) return 0.0;
  return static_cast<double>(class_counts[Index(label)]) /
         static_cast<double>(posts.size());
}

LabeledCorpus LoadHon(const std::filesystem::path& path) {
  std::ifstream in = OpenInput(path);
  CsvReader reader(in);
  LabeledCorpus corpus;
  corpus.provenance = "hon";
  auto header = reader.Next();
  if (!header) throw MissingColumn("empty file " + path.string());
  const std::size_t class_col = FindColumn(header->fields, "class", path);
  const std::size_t text_col = FindColumn(header->fields, "tweet", path);
  const std::size_t needed = std::max(class_col, text_col) + 1;
  while (auto rec = reader.Next()) {
    if (rec->fields.size() == 1 && rec->fields[0].empty()) continue;
    if (rec->fields.size() < needed) {
      corpus.issues.push_back({rec->line, "UnparseableRow: too few fields"});
      continue;
    }
    const auto label = ParseHonCode(rec->fields[class_col]);
    if (!label) {
      corpus.issues.push_back({rec->line, "UnparseableRow: class code '" +
                                              rec->fields[class_col] + "'"});
      continue;
    }
    corpus.Add(RawPost{std::move(rec->fields[text_col]), label,
                       "hon:" + std::to_string(rec->line)});
  }
  return corpus;
}

std::optional<ClassLabel> MapOlidLabel(std::string_view subtask_a,
                                       std::string_view subtask_b,
                                       std::string_view subtask_c) {
  const std::string a = Trim(subtask_a);
  const std::string b = Trim(subtask_b);
  const std::string c = Trim(subtask_c);
  auto missing = [](const std::string& v) { return v.empty() || v == "NULL"; };
  const bool b_ok = missing(b) || b == "TIN" || b == "UNT";
  const bool c_ok = missing(c) || c == "IND" || c == "GRP" || c == "OTH";
  if (!b_ok || !c_ok) return std::nullopt;
  if (a == "NOT") return ClassLabel::kNeither;
  if (a == "OFF") return c == "GRP" ? ClassLabel::kHate : ClassLabel::kOffensive;
  return std::nullopt;
}

LabeledCorpus LoadOlid(const std::filesystem::path& path) {
  std::ifstream in = OpenInput(path);
  TsvReader reader(in);
  LabeledCorpus corpus;
  corpus.provenance = "olid";
  auto header = reader.Next();
  if (!header) throw MissingColumn("empty file " + path.string());
  const std::size_t text_col = FindColumn(header->fields, "tweet", path);
  const std::size_t a_col = FindColumn(header->fields, "subtask_a", path);
  const std::size_t b_col = FindColumn(header->fields, "subtask_b", path);
  const std::size_t c_col = FindColumn(header->fields, "subtask_c", path);
  const std::size_t needed = std::max({text_col, a_col, b_col, c_col}) + 1;
  while (auto rec = reader.Next()) {
    if (rec->fields.size() == 1 && rec->fields[0].empty()) continue;
    if (rec->fields.size() < needed) {
      corpus.issues.push_back({rec->line, "UnparseableRow: too few fields"});
      continue;
    }
    const auto label =
        MapOlidLabel(rec->fields[a_col], rec->fields[b_col], rec->fields[c_col]);
    if (!label) {
      corpus.issues.push_back(
          {rec->line, "UnparseableRow: labels (" + rec->fields[a_col] + ", " +
                          rec->fields[b_col] + ", " + rec->fields[c_col] +
                          ")"});
      continue;
    }
    corpus.Add(RawPost{std::move(rec->fields[text_col]), label,
                       "olid:" + std::to_string(rec->line)});
  }
  return corpus;
}

LabeledCorpus LoadLabeledLines(const std::filesystem::path& path) {
  std::ifstream in = OpenInput(path);
  LabeledCorpus corpus;
  corpus.provenance = "lines";
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const std::size_t tab = line.find('\t');
    const auto label = tab == std::string::npos
                           ? std::nullopt
                           : ParseHonCode(std::string_view(line).substr(0, tab));
    if (!label) {
      corpus.issues.push_back(
          {line_no, "UnparseableRow: expected '<0|1|2>\\t<text>'"});
      continue;
    }
    corpus.Add(RawPost{line.substr(tab + 1), label,
                       "lines:" + std::to_string(line_no)});
  }
  return corpus;
}

std::vector<RawPost> LoadUnlabeled(const std::filesystem::path& path) {
  std::ifstream in = OpenInput(path);
  std::vector<RawPost> posts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    posts.push_back(RawPost{line, std::nullopt,
                            "unlabeled:" + std::to_string(line_no)});
  }
  return posts;
}

LabeledCorpus Combine(std::span<const LabeledCorpus> corpora) {
  LabeledCorpus out;
  for (const LabeledCorpus& c : corpora) {
    if (!c.provenance.empty()) {
      if (!out.provenance.empty()) out.provenance += "+";
      out.provenance += c.provenance;
    }
    for (const RawPost& p : c.posts) out.Add(p);
    out.issues.insert(out.issues.end(), c.issues.begin(), c.issues.end());
  }
  return out;
}

namespace {

// Splits `count` items among parts with the given fractions: each part gets
// floor(count * f) and the leftovers go to the largest remainders.
std::array<std::size_t, 3> Apportion(std::size_t count,
                                     const std::array<double, 3>& fractions) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(count) * fractions[i];
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(sizes[i]);
    used += sizes[i];
  }
  while (used < count) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (rem[i] > rem[best] + 1e-12) best = i;
    }
    ++sizes[best];
    rem[best] = -1.0;
    ++used;
  }
  return sizes;
}

}  // namespace

std::array<std::vector<std::size_t>, 3> SplitIndices(
    std::span<const ClassLabel> labels, const SplitSpec& spec) {
  const std::array<double, 3> fractions = {spec.train, spec.valid, spec.test};
  for (double f : fractions) {
    if (!(f >= 0.0)) throw InvalidConfig("split fractions must be >= 0");
  }
  if (std::abs(spec.train + spec.valid + spec.test - 1.0) > 1e-9) {
    throw InvalidConfig("split fractions must sum to 1");
  }
  Rng rng(spec.seed);
  std::array<std::vector<std::size_t>, 3> parts;

  auto deal = [&](std::vector<std::size_t>& pool,
                  const std::array<std::size_t, 3>& sizes) {
    rng.Shuffle(std::span<std::size_t>(pool));
    std::size_t pos = 0;
    for (std::size_t part = 0; part < 3; ++part) {
      for (std::size_t k = 0; k < sizes[part]; ++k) {
        parts[part].push_back(pool[pos++]);
      }
    }
  };

  if (!spec.stratified) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), 0);
    deal(all, Apportion(all.size(), fractions));
  } else {
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      by_class[Index(labels[i])].push_back(i);
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (by_class[c].size() < 3) {
        throw CorpusTooSmall(
            "class " + std::string(LabelName(LabelFromIndex(c))) + " has " +
            std::to_string(by_class[c].size()) +
            " posts; stratified splitting needs at least 3");
      }
    }
    // Valid and test totals are fixed first, then spread over classes by
    // largest remainder so each class stays within one post of its share.
    const auto totals = Apportion(labels.size(), fractions);
    std::array<std::array<std::size_t, 3>, kNumClasses> alloc{};
    for (std::size_t part = 1; part < 3; ++part) {
      std::array<double, kNumClasses> rem{};
      std::size_t used = 0;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const double exact =
            static_cast<double>(by_class[c].size()) * fractions[part];
        alloc[c][part] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rem[c] = exact - static_cast<double>(alloc[c][part]);
        used += alloc[c][part];
      }
      while (used < totals[part]) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < kNumClasses; ++c) {
          if (rem[c] > rem[best] + 1e-12) best = c;
        }
        ++alloc[best][part];
        rem[best] = -1.0;
        ++used;
      }
    }
    // Every class keeps at least one post in each part with a positive
    // fraction; a 10% slice of a rare class would otherwise round to zero.
    for (std::size_t part = 1; part < 3; ++part) {
      if (fractions[part] <= 0.0) continue;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        if (alloc[c][part] > 0) continue;
        alloc[c][part] = 1;
        std::size_t donor = c;
        for (std::size_t d = 0; d < kNumClasses; ++d) {
          if (alloc[d][part] >= 2 &&
              (donor == c || alloc[d][part] > alloc[donor][part])) {
            donor = d;
          }
        }
        if (donor != c) --alloc[donor][part];
      }
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const std::size_t keep = fractions[0] > 0.0 ? 1 : 0;
      while (alloc[c][1] + alloc[c][2] + keep > by_class[c].size()) {
        --alloc[c][alloc[c][1] >= alloc[c][2] ? 1 : 2];
      }
      alloc[c][0] = by_class[c].size() - alloc[c][1] - alloc[c][2];
      deal(by_class[c], alloc[c]);
    }
  }
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

CorpusSplit SplitCorpus(const LabeledCorpus& corpus, const SplitSpec& spec) {
  std::vector<ClassLabel> labels;
  labels.reserve(corpus.size());
  for (const RawPost& p : corpus.posts) labels.push_back(*p.label);
  const auto parts = SplitIndices(labels, spec);
  CorpusSplit split;
  LabeledCorpus* outs[3] = {&split.train, &split.valid, &split.test};
  const char* names[3] = {"train", "valid", "test"};
  for (std::size_t part = 0; part < 3; ++part) {
    outs[part]->provenance = corpus.provenance + ":" + names[part];
    for (std::size_t i : parts[part]) outs[part]->Add(corpus.posts[i]);
  }
  return split;
}

}  // namespace delhate
