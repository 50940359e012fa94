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


#ifndef DELHATE_TESTS_UNIT_TEST_SUPPORT_H_
#define DELHATE_TESTS_UNIT_TEST_SUPPORT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "delhate/datasets.h"
#include "delhate/tensor.h"

namespace delhate::testing {

std::filesystem::path FixturePath(std::string_view name);

// Fresh empty directory under the system temp dir, unique per call.
std::filesystem::path ScratchDir(std::string_view tag);

void WriteFile(const std::filesystem::path& path, std::string_view text);
std::string ReadFile(const std::filesystem::path& path);

// `per_class` posts per class with class-specific vocabularies plus shared
// filler, so a bag-of-words model separates the classes perfectly.
LabeledCorpus SeparableCorpus(std::size_t per_class, std::uint64_t seed);

// Posts with `counts` members of H, O, N (text "h<i>", "o<i>", "n<i>").
LabeledCorpus CountsCorpus(std::size_t h, std::size_t o, std::size_t n);

}  // namespace delhate::testing

#endif  // DELHATE_TESTS_UNIT_TEST_SUPPORT_H_
