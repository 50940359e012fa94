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


#ifndef DELHATE_DELIMITED_H_
#define DELHATE_DELIMITED_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace delhate {

struct DelimitedRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 comma-separated reader: quoted fields may contain delimiters,
// doubled quotes and line breaks. Accepts LF and CRLF.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char delimiter = ',')
      : in_(in), delimiter_(delimiter) {}

  // Returns std::nullopt at end of input. Throws IoError on an unterminated
  // quoted field.
  std::optional<DelimitedRecord> Next();

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 0;
};

// Tab-separated reader. Records never span lines. Backslash escapes \t, \n,
// \r and \\ are decoded; a field wrapped in double quotes has them removed
// and doubled quotes collapsed.
class TsvReader {
 public:
  explicit TsvReader(std::istream& in) : in_(in) {}

  std::optional<DelimitedRecord> Next();

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace delhate

#endif  // DELHATE_DELIMITED_H_
