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


#include "delhate/text_prep.h"

#include <algorithm>
#include <cstdint>

namespace delhate {
namespace {

// ---- UTF-8 ----------------------------------------------------------------

// Decodes valid UTF-8; malformed bytes are dropped.
std::u32string Decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      ++i;
      continue;
    }
    if (i + len > text.size()) break;
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) ||
                          (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (!ok || overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void AppendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string Encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) AppendUtf8(out, cp);
  return out;
}

// ---- character classes -------------------------------------------------------

bool InRange(char32_t cp, char32_t lo, char32_t hi) {
  return cp >= lo && cp <= hi;
}

bool IsSpace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' ||
         cp == '\f' || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         InRange(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

// Emoji, pictographs and the joiners/selectors that glue emoji sequences.
bool IsEmoji(char32_t cp) {
  return InRange(cp, 0x1F000, 0x1FAFF) ||  // mahjong .. symbols ext-A
         InRange(cp, 0x2600, 0x27BF) ||    // misc symbols, dingbats
         InRange(cp, 0x2300, 0x23FF) ||    // misc technical (watch, hourglass)
         InRange(cp, 0x2B00, 0x2BFF) ||    // arrows and stars
         InRange(cp, 0x25A0, 0x25FF) ||    // geometric shapes
         InRange(cp, 0x2190, 0x21FF) ||    // arrows
         InRange(cp, 0xFE00, 0xFE0F) ||    // variation selectors
         InRange(cp, 0xE0020, 0xE007F) ||  // tag sequence characters
         cp == 0x200D || cp == 0x20E3 || cp == 0x2122 || cp == 0x2139 ||
         cp == 0x24C2 || cp == 0x3030 || cp == 0x303D || cp == 0x3297 ||
         cp == 0x3299 || cp == 0x00A9 || cp == 0x00AE || cp == 0xFFFD;
}

bool IsAsciiWord(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
         (cp >= '0' && cp <= '9') || cp == '_';
}

// Letters, digits and '_'; non-ASCII codepoints count unless they fall in a
// punctuation or symbol block.
bool IsWordChar(char32_t cp) {
  if (cp < 0x80) return IsAsciiWord(cp);
  if (IsSpace(cp) || IsEmoji(cp)) return false;
  if (InRange(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (InRange(cp, 0x2000, 0x2BFF)) return false;  // punctuation .. symbols
  if (InRange(cp, 0x3000, 0x303F)) return false;  // CJK punctuation
  if (InRange(cp, 0xFE30, 0xFE4F)) return false;  // CJK compatibility forms
  if (InRange(cp, 0xFE50, 0xFE6F)) return false;  // small form variants
  if (InRange(cp, 0xFF00, 0xFF0F) || InRange(cp, 0xFF1A, 0xFF20) ||
      InRange(cp, 0xFF3B, 0xFF40) || InRange(cp, 0xFF5B, 0xFF65)) {
    return false;  // fullwidth punctuation
  }
  return true;
}

bool IsApostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

char32_t AsciiLower(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
}

// Case-insensitive ASCII prefix test at position i.
bool MatchesAt(const std::u32string& s, std::size_t i, std::string_view p) {
  if (i + p.size() > s.size()) return false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (AsciiLower(s[i + k]) != static_cast<char32_t>(p[k])) return false;
  }
  return true;
}

// No word-boundary test: a URL glued to a word ("see:https://x", "wowwww.x")
// still starts a removal, so no URL prefix survives anywhere in the output.
bool UrlStartsAt(const std::u32string& s, std::size_t i) {
  return MatchesAt(s, i, "http://") || MatchesAt(s, i, "https://") ||
         MatchesAt(s, i, "www.");
}

// Deletes every URL from its first character up to the next whitespace.
std::u32string RemoveUrls(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (UrlStartsAt(s, i)) {
      while (i < s.size() && !IsSpace(s[i])) ++i;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

void AppendAscii(std::u32string& out, std::string_view text) {
  for (char c : text) out.push_back(static_cast<char32_t>(c));
}

std::u32string RewriteMentionsAndHashtags(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size() + 16);
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t cp = s[i];
    if (cp != '@' && cp != '#') {
      out.push_back(cp);
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < s.size() && IsWordChar(s[end])) ++end;
    if (end == i + 1) {
      out.push_back(' ');  // stray marker
      ++i;
      continue;
    }
    out.push_back(' ');
    if (cp == '@') {
      AppendAscii(out, kMentionToken);
      out.push_back(' ');
    } else {
      AppendAscii(out, kHashtagToken);
      out.push_back(' ');
      out.append(s, i + 1, end - (i + 1));
    }
    i = end;
  }
  return out;
}

std::u32string CollapseSpaces(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t cp : s) {
    if (IsSpace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(cp);
  }
  return out;
}

char32_t LowerCodepoint(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if (InRange(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
  if ((InRange(cp, 0x100, 0x137) || InRange(cp, 0x14A, 0x177)) &&
      cp % 2 == 0) {
    return cp + 1;
  }
  if ((InRange(cp, 0x139, 0x148) || InRange(cp, 0x179, 0x17E)) &&
      cp % 2 == 1) {
    return cp + 1;
  }
  if (InRange(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 32;
  if (InRange(cp, 0x410, 0x42F)) return cp + 32;
  if (InRange(cp, 0x400, 0x40F)) return cp + 80;
  return cp;
}

// Trims non-word codepoints from both ends.
std::u32string_view StripPunct(std::u32string_view s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && !IsWordChar(s[lo])) ++lo;
  while (hi > lo && !IsWordChar(s[hi - 1])) --hi;
  return s.substr(lo, hi - lo);
}

}  // namespace

bool IsSentinel(std::string_view token) {
  return token == kMentionToken || token == kHashtagToken;
}

std::string Normalize(std::string_view text) {
  std::u32string s = Decode(text);
  for (char32_t& cp : s) {
    if (IsSpace(cp) || IsEmoji(cp)) cp = ' ';
  }
  s = RemoveUrls(s);
  s = RewriteMentionsAndHashtags(s);
  // A hashtag body can begin a URL ("#www.x"); catch it on a second pass.
  s = RemoveUrls(s);
  return Encode(CollapseSpaces(s));
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const std::u32string s = Decode(text);
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    std::size_t end = i;
    while (end < s.size() && !IsSpace(s[end])) ++end;
    std::u32string_view piece =
        StripPunct(std::u32string_view(s).substr(i, end - i));
    std::size_t start = 0;
    for (std::size_t k = 0; k <= piece.size(); ++k) {
      if (k < piece.size() && !IsApostrophe(piece[k])) continue;
      std::u32string_view part = StripPunct(piece.substr(start, k - start));
      if (!part.empty()) tokens.push_back(Encode(part));
      start = k + 1;
    }
    i = end;
  }
  return tokens;
}

std::string Lowercase(std::string_view text) {
  std::u32string s = Decode(text);
  for (char32_t& cp : s) cp = LowerCodepoint(cp);
  return Encode(s);
}

std::string Stem(std::string_view token) {
  if (IsSentinel(token)) return std::string(token);
  const bool ascii = std::all_of(token.begin(), token.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x80;
  });
  if (!ascii || token.empty()) return std::string(token);
  return PorterStem(token);
}

TokenSequence Preprocess(std::string_view text) {
  TokenSequence seq;
  for (std::string& token : Tokenize(Normalize(text))) {
    if (IsSentinel(token)) {
      seq.tokens.push_back(token);
      seq.surface.push_back(std::move(token));
      continue;
    }
    std::string lower = Lowercase(token);
    seq.tokens.push_back(Stem(lower));
    seq.surface.push_back(std::move(lower));
  }
  return seq;
}

TokenSequence Preprocess(const RawPost& post) { return Preprocess(post.text); }

}  // namespace delhate
