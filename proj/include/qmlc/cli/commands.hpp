// Copyright 2026 The QMLC Authors
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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qmlc::cli {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2 };

struct CommandOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool plots = false;
  bool force = false;
  std::string dataset;
  std::string manifest;
  std::string checkpoint;
  std::string prompts;
  std::string resume;
  long long max_steps = -1;
};

struct CommandStreams {
  std::ostream& out;
  std::ostream& err;
};

/// Writes the dataset to `out` and a JSON sidecar to `out + ".manifest.json"`.
int cmd_gen_data(const CommandOptions& opts, CommandStreams io);
/// Writes the grouped mini-set manifest to `out`.
int cmd_group(const CommandOptions& opts, CommandStreams io);
/// Writes the checkpoint to `out`, the loss curve to `out + ".loss.csv"` and
/// stage transitions to `out + ".stages.log"`; with plots also `out + ".loss.svg"`.
int cmd_train(const CommandOptions& opts, CommandStreams io);
/// One JSON line per prompt plus a summary line. Exit 0 iff a prompt was accepted.
int cmd_sample(const CommandOptions& opts, CommandStreams io);
/// JSON report with invariant suites and synthesis metrics; with plots also
/// `out + ".tvd.svg"`. Nonzero exit when an invariant fails.
int cmd_eval(const CommandOptions& opts, CommandStreams io);

/// Runs a named command and maps exceptions to exit codes.
int run_command(const std::string& name, const CommandOptions& opts, CommandStreams io);

/// Step-indexed line plot of the given series as a standalone SVG document.
void write_loss_svg(std::ostream& out, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& series);

}  // namespace qmlc::cli
