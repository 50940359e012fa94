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


#ifndef DELHATE_TOOLS_CLI_COMMANDS_H_
#define DELHATE_TOOLS_CLI_COMMANDS_H_

#include <ostream>
#include <string>

#include "run_config.h"

namespace delhate::cli {

// Each command returns its exit status and throws delhate::Error on failure.
// `out` receives results, `err` progress and warnings.

// Supervised ensemble on HON/OLID/Gab data, evaluated on the test split.
// Writes the bundle, config.json, train_log.jsonl and report.{txt,json}.
int CmdTrain(RunConfig config, std::ostream& out, std::ostream& err);

// Weak-supervised ensemble on an unlabeled pool; evaluates when
// data.eval is set.
int CmdWeakTrain(RunConfig config, std::ostream& out, std::ostream& err);

// Tunes the classifier heads of `bundle` on data.target and reports
// pre- and post-tuning metrics on data.eval (or the target set).
int CmdTune(RunConfig config, std::ostream& out, std::ostream& err);

// One JSON record per input line.
int CmdPredict(RunConfig config, std::ostream& out, std::ostream& err);

// Metrics of `bundle` on the labeled file in data.input.
int CmdEvaluate(RunConfig config, std::ostream& out, std::ostream& err);

// Runs one registered check (`layer`) or all of them; returns
// kGradCheckFailedExit when any check fails.
inline constexpr int kGradCheckFailedExit = 5;
int CmdGradcheck(const RunConfig& config, const std::string& layer, bool all,
                 std::ostream& out, std::ostream& err);

// Prints the preprocessed tokens of each line of data.input.
int CmdPreprocess(const RunConfig& config, std::ostream& out,
                  std::ostream& err);

}  // namespace delhate::cli

#endif  // DELHATE_TOOLS_CLI_COMMANDS_H_
