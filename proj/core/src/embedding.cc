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

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "delhate/errors.h"
#include "delhate/rng.h"

namespace delhate {
namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t end = i;
    while (end < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[end]))) {
      ++end;
    }
    if (end > i) fields.push_back(line.substr(i, end - i));
    i = end;
  }
  return fields;
}

bool ParseFloat(std::string_view text, float* out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, *out);
  return ec == std::errc() && ptr == end && std::isfinite(*out);
}

bool IsUnsigned(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

void SyntheticVector(std::string_view token, std::uint64_t seed,
                     std::span<double> out) {
  Rng rng(MixSeed(Fnv1a64(token), seed));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : out) {
      v = rng.Normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : out) v *= inv;
}

}  // namespace

EmbeddingTable EmbeddingTable::Synthetic(std::uint64_t seed, std::size_t dim) {
  if (dim == 0) throw InvalidConfig("synthetic embedding dim must be >= 1");
  EmbeddingTable table;
  table.name_ = "synthetic:" + std::to_string(seed) + ":" + std::to_string(dim);
  table.dim_ = dim;
  table.synthetic_ = true;
  table.seed_ = seed;
  return table;
}

EmbeddingTable EmbeddingTable::FromVectors(
    std::string name, std::size_t dim,
    const std::vector<std::pair<std::string, std::vector<float>>>& entries) {
  if (dim == 0) throw InvalidConfig("embedding dim must be >= 1");
  EmbeddingTable table;
  table.name_ = std::move(name);
  table.dim_ = dim;
  for (const auto& [token, vec] : entries) {
    if (vec.size() != dim) {
      throw ShapeMismatch("vector for '" + token + "' has length " +
                          std::to_string(vec.size()));
    }
    table.Insert(token, vec);
  }
  if (table.size() == 0) throw EmptyTable("no vectors supplied");
  return table;
}

bool EmbeddingTable::Insert(std::string_view token,
                            std::span<const float> vector) {
  auto [it, inserted] =
      index_.emplace(std::string(token), values_.size() / dim_);
  if (!inserted) return false;
  values_.insert(values_.end(), vector.begin(), vector.end());
  return true;
}

bool EmbeddingTable::Contains(std::string_view token) const {
  return synthetic_ || index_.contains(std::string(token));
}

bool EmbeddingTable::Lookup(std::string_view token,
                            std::span<double> out) const {
  if (out.size() != dim_) {
    throw ShapeMismatch("lookup buffer has length " +
                        std::to_string(out.size()) + ", table dim " +
                        std::to_string(dim_));
  }
  if (synthetic_) {
    SyntheticVector(token, seed_, out);
    return true;
  }
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return false;
  const float* src = values_.data() + it->second * dim_;
  for (std::size_t i = 0; i < dim_; ++i) out[i] = src[i];
  return true;
}

EmbeddingTable LoadTable(const std::filesystem::path& path, std::size_t dim,
                         TableLoadReport* report) {
  if (dim == 0) throw InvalidConfig("embedding dim must be >= 1");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file " + path.string());
  TableLoadReport local;
  TableLoadReport& rep = report != nullptr ? *report : local;
  rep = TableLoadReport{};

  EmbeddingTable table;
  table.name_ = path.string();
  table.dim_ = dim;
  std::vector<float> vec(dim);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && IsUnsigned(fields[0]) &&
        IsUnsigned(fields[1])) {
      rep.header_skipped = true;
      continue;
    }
    if (fields.size() != dim + 1) {
      ++rep.skipped;
      rep.issues.push_back(
          {line_no, "MalformedLine: expected " + std::to_string(dim) +
                        " values, found " + std::to_string(fields.size() - 1)});
      continue;
    }
    bool ok = true;
    for (std::size_t i = 0; i < dim; ++i) {
      if (!ParseFloat(fields[i + 1], &vec[i])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++rep.skipped;
      rep.issues.push_back({line_no, "MalformedLine: unparseable value"});
      continue;
    }
    if (table.Insert(fields[0], vec)) {
      ++rep.loaded;
    } else {
      ++rep.duplicates;
    }
  }
  if (table.size() == 0) {
    throw EmptyTable("no vectors loaded from " + path.string());
  }
  return table;
}

EmbeddingTable OpenEmbeddings(std::string_view source, std::size_t file_dim,
                              TableLoadReport* report) {
  constexpr std::string_view kPrefix = "synthetic:";
  if (source.substr(0, kPrefix.size()) != kPrefix) {
    return LoadTable(std::filesystem::path(std::string(source)), file_dim,
                     report);
  }
  const std::string_view rest = source.substr(kPrefix.size());
  const std::size_t colon = rest.find(':');
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  auto parse = [](std::string_view s, auto* out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
  };
  if (colon == std::string_view::npos || !parse(rest.substr(0, colon), &seed) ||
      !parse(rest.substr(colon + 1), &dim) || dim == 0) {
    throw InvalidConfig("expected synthetic:<seed>:<dim>, got '" +
                        std::string(source) + "'");
  }
  return EmbeddingTable::Synthetic(seed, dim);
}

TokenMatrix Embed(const TokenSequence& seq, const EmbeddingTable& table,
                  std::size_t seq_len) {
  if (seq_len == 0) throw InvalidConfig("sequence length must be >= 1");
  TokenMatrix m;
  m.rows = seq_len;
  m.cols = table.dim();
  m.values.assign(m.rows * m.cols, 0.0);
  m.n_real = std::min(seq.tokens.size(), seq_len);
  const std::size_t first_row = seq_len - m.n_real;
  for (std::size_t i = 0; i < m.n_real; ++i) {
    std::span<double> row(m.values.data() + (first_row + i) * m.cols, m.cols);
    if (table.Lookup(seq.tokens[i], row)) continue;
    if (i < seq.surface.size() && seq.surface[i] != seq.tokens[i] &&
        table.Lookup(seq.surface[i], row)) {
      continue;
    }
  }
  return m;
}

}  // namespace delhate
