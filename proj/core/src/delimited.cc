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


#include "delhate/delimited.h"

#include <string>

#include "delhate/errors.h"

namespace delhate {

std::optional<DelimitedRecord> CsvReader::Next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  DelimitedRecord record;
  record.line = line_;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size() || (i + 1 == line.size() && line[i] == '\r' &&
                             !in_quotes)) {
      if (!in_quotes) break;
      // Quoted field continues on the next physical line.
      field.push_back('\n');
      if (!std::getline(in_, line)) {
        throw IoError("unterminated quoted field starting on line " +
                      std::to_string(record.line));
      }
      ++line_;
      i = 0;
      continue;
    }
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
      ++i;
      continue;
    }
    if (c == delimiter_) {
      record.fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
      ++i;
      continue;
    }
    field.push_back(c);
    ++i;
  }
  if (!field.empty() && field.back() == '\r' && !field_was_quoted) {
    field.pop_back();
  }
  record.fields.push_back(std::move(field));
  return record;
}

namespace {

std::string UnescapeTsvField(std::string_view raw) {
  std::string_view body = raw;
  bool quoted = false;
  if (body.size() >= 2 && body.front() == '"' && body.back() == '"') {
    body = body.substr(1, body.size() - 2);
    quoted = true;
  }
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (quoted && c == '"' && i + 1 < body.size() && body[i + 1] == '"') {
      out.push_back('"');
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < body.size()) {
      const char n = body[i + 1];
      if (n == 't' || n == 'n' || n == 'r' || n == '\\') {
        out.push_back(n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : '\\');
        ++i;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::optional<DelimitedRecord> TsvReader::Next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  DelimitedRecord record;
  record.line = line_;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    const std::size_t end = tab == std::string::npos ? line.size() : tab;
    record.fields.push_back(
        UnescapeTsvField(std::string_view(line).substr(start, end - start)));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return record;
}

}  // namespace delhate
