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


#ifndef DELHATE_TOOLS_CLI_RUN_CONFIG_H_
#define DELHATE_TOOLS_CLI_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "delhate/datasets.h"
#include "delhate/ensemble.h"
#include "delhate/topology.h"

namespace delhate::cli {

struct DataPaths {
  std::string hon;        // HON-format CSV
  std::string olid;       // OLID-format TSV
  std::string gab;        // "<code>\t<text>" lines
  std::string unlabeled;  // one post per line
  std::string eval;       // labeled evaluation file, any labeled format
  std::string target;     // labeled tuning file, any labeled format
  std::string input;      // predict/preprocess input or evaluate labels
};

struct LexiconPaths {
  std::string hate;
  std::string offensive;
  std::string positive;
  double bound_scale = kDefaultBoundScale;
};

// Everything a run needs. Loaded from a JSON document, overridden by flags,
// and echoed to <out>/config.json once resolved.
struct RunConfig {
  TopologyConfig topology;
  TrainConfig train;
  SplitSpec split;
  DataPaths data;
  LexiconPaths lexicon;
  std::string embeddings;  // "synthetic:<seed>:<dim>" or a vector file
  // "uniform", "imbalance" or three comma-separated weights (H,O,N).
  std::string class_weights = "uniform";
  std::string out;  // output directory; "run" when empty
  std::string bundle;
  std::size_t trials = 1;
};

// Overlays the keys present in `json_text` onto `config`. Throws
// InvalidConfig on malformed JSON, unknown keys or wrongly typed values.
void MergeJson(RunConfig& config, std::string_view json_text);
void MergeJsonFile(RunConfig& config, const std::filesystem::path& path);

std::string ToJson(const RunConfig& config);

// Resolves "uniform", "imbalance" (needs stats) or "a,b,c".
ClassWeights ParseClassWeights(std::string_view spec,
                               const WeakLabelStats* stats);

// Picks the loader by extension: .csv -> HON, .tsv -> OLID, else
// "<code>\t<text>" lines.
LabeledCorpus LoadLabeledAny(const std::filesystem::path& path);

}  // namespace delhate::cli

#endif  // DELHATE_TOOLS_CLI_RUN_CONFIG_H_
