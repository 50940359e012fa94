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


#ifndef DELHATE_EMBEDDING_H_
#define DELHATE_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "delhate/text_prep.h"

namespace delhate {

// Word-vector table. Either backed by loaded vectors (stored as float) or
// synthetic, in which case every token maps to a deterministic unit vector
// derived from (FNV-1a(token), seed). Immutable after construction.
class EmbeddingTable {
 public:
  static EmbeddingTable Synthetic(std::uint64_t seed, std::size_t dim);

  // Builds a table from in-memory vectors. Later duplicates are ignored.
  static EmbeddingTable FromVectors(
      std::string name, std::size_t dim,
      const std::vector<std::pair<std::string, std::vector<float>>>& entries);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  bool synthetic() const { return synthetic_; }
  // Vocabulary size; zero for synthetic tables.
  std::size_t size() const { return index_.size(); }

  bool Contains(std::string_view token) const;

  // Writes the vector for `token` into out (length dim). Returns false and
  // leaves `out` untouched when the token is unknown.
  bool Lookup(std::string_view token, std::span<double> out) const;

 private:
  friend EmbeddingTable LoadTable(const std::filesystem::path&, std::size_t,
                                  struct TableLoadReport*);
  EmbeddingTable() = default;

  // Returns false when the token is already present.
  bool Insert(std::string_view token, std::span<const float> vector);

  std::string name_;
  std::size_t dim_ = 0;
  bool synthetic_ = false;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> values_;
};

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct TableLoadReport {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::size_t duplicates = 0;
  bool header_skipped = false;
  std::vector<LineIssue> issues;
};

// Reads "token v1 ... v_dim" lines (GloVe text layout). A first line holding
// exactly two integers (word2vec "count dim" header) is skipped. Lines with the
// wrong arity or unparseable values are skipped and reported. Throws IoError
// when the file cannot be opened and EmptyTable when nothing was loaded.
EmbeddingTable LoadTable(const std::filesystem::path& path, std::size_t dim,
                         TableLoadReport* report = nullptr);

// "synthetic:<seed>:<dim>" or a path to a vector file (read with
// `file_dim`). Throws InvalidConfig on a malformed synthetic spec.
EmbeddingTable OpenEmbeddings(std::string_view source, std::size_t file_dim,
                              TableLoadReport* report = nullptr);

inline constexpr std::size_t kDefaultSequenceLength = 100;

// Fixed-size embedded post: rows are tokens, zero rows on the left.
struct TokenMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n_real = 0;
  std::vector<double> values;  // rows x cols, row-major

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
};

// Keeps the first `seq_len` tokens; places them in order in the last rows.
// Each token is looked up by its stem, then by its surface form; unknown
// tokens get the zero vector but still occupy a row.
TokenMatrix Embed(const TokenSequence& seq, const EmbeddingTable& table,
                  std::size_t seq_len = kDefaultSequenceLength);

}  // namespace delhate

#endif  // DELHATE_EMBEDDING_H_
