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


#ifndef DELHATE_TEXT_PREP_H_
#define DELHATE_TEXT_PREP_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delhate/labels.h"

namespace delhate {

struct RawPost {
  std::string text;
  std::optional<ClassLabel> label;
  std::string source_id;
};

// Stemmed tokens plus the lowercased surface form each token came from; the
// surface forms feed the embedding fallback lookup.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::string> surface;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

inline constexpr std::string_view kMentionToken = "MENTIONHERE";
inline constexpr std::string_view kHashtagToken = "HASHTAGHERE";

bool IsSentinel(std::string_view token);

// Removes URLs (http://, https://, www. up to the next whitespace) and emoji,
// rewrites "@user" to MENTIONHERE and "#tag" to "HASHTAGHERE tag", drops any
// remaining '#' or '@', and collapses whitespace. Case is preserved; see
// Preprocess for lowercasing. Idempotent.
std::string Normalize(std::string_view text);

// Rule set, applied to normalized text:
//   1. split on whitespace;
//   2. strip leading and trailing punctuation from each piece;
//   3. split the remainder at internal apostrophes (' or U+2019), stripping
//      punctuation from each part again ("don't" -> "don", "t");
//   4. drop empty parts.
// Internal punctuation other than apostrophes stays inside the token
// ("e-mail", "u.s"). Sentinels survive unchanged.
std::vector<std::string> Tokenize(std::string_view text);

// Porter stem of a lowercase token; sentinels and tokens with non-ASCII bytes
// are returned unchanged.
std::string Stem(std::string_view token);

// Lowercases ASCII, Latin-1, Greek and Cyrillic capitals; other codepoints
// pass through.
std::string Lowercase(std::string_view text);

// Stem(Lowercase(t)) for every t in Tokenize(Normalize(text)), sentinels kept
// as they are.
TokenSequence Preprocess(std::string_view text);
TokenSequence Preprocess(const RawPost& post);

// The Porter stemming algorithm (M. F. Porter's reference rules, which
// produce the published voc.txt/output.txt vocabulary). Input must be
// lowercase ASCII; words of length <= 2 are returned unchanged.
std::string PorterStem(std::string_view word);

}  // namespace delhate

#endif  // DELHATE_TEXT_PREP_H_
