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


#ifndef DELHATE_ERRORS_H_
#define DELHATE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace delhate {

// Coarse failure class; the command-line tool maps each one to an exit code.
enum class ErrorCategory {
  kUsage,
  kData,
  kNumeric,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

#define DELHATE_DEFINE_ERROR(Name, Category)                   \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what)                      \
        : Error(ErrorCategory::Category, #Name ": " + what) {}  \
  }

DELHATE_DEFINE_ERROR(ShapeMismatch, kInternal);
DELHATE_DEFINE_ERROR(InvalidConfig, kUsage);
DELHATE_DEFINE_ERROR(IoError, kData);
DELHATE_DEFINE_ERROR(EmptyTable, kData);
DELHATE_DEFINE_ERROR(MissingColumn, kData);
DELHATE_DEFINE_ERROR(CorpusTooSmall, kData);
DELHATE_DEFINE_ERROR(EmptyClass, kData);
DELHATE_DEFINE_ERROR(PreprocessingMismatch, kData);
DELHATE_DEFINE_ERROR(IntegrityError, kData);
DELHATE_DEFINE_ERROR(VersionError, kData);
DELHATE_DEFINE_ERROR(VacuousSupervision, kData);
DELHATE_DEFINE_ERROR(NonFiniteValue, kNumeric);

#undef DELHATE_DEFINE_ERROR

// Process exit code for an error category: usage 2, data 3, numeric 4,
// anything else 1.
int ExitCodeFor(ErrorCategory category);

}  // namespace delhate

#endif  // DELHATE_ERRORS_H_
