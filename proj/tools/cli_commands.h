// Copyright 2026 The rrbins Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommands of the rrbins command-line tool.

#ifndef RRBINS_TOOLS_CLI_COMMANDS_H_
#define RRBINS_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "label_io.h"
#include "rrbins/core.h"
#include "rrbins/losses.h"
#include "rrbins/mechanisms.h"

namespace rrbins::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitParseError = 2,
  kExitConfigError = 3,
};

enum class Command { kRandomize, kOptimizeBins, kBench, kVerify };

struct RunConfig {
  Command command = Command::kVerify;
  std::string input_path;
  std::string output_path;
  std::string prior_path;
  ColumnSelector column;
  // A single value except for bench, which sweeps the list.
  std::vector<double> eps;
  std::optional<double> eps1;
  LossKind loss = LossKind::kSquared;
  MechanismKind mechanism = MechanismKind::kRrOnBins;
  std::vector<MechanismKind> bench_mechanisms;
  std::optional<LabelSet> universe;
  bool clip = true;
  uint64_t seed = 1;
  // optimize-bins: build the prior from a raw-label file, without noise.
  bool public_prior = false;
  bool json = false;
  // bench
  size_t reps = 5;
  std::optional<double> zipf_exponent;
  size_t synthetic_n = 100000;
  // verify
  bool quick = false;
  double eps_fault = 0.0;
};

// "1.5", "ln7" or "ln(7)".
absl::StatusOr<double> ParseEps(absl::string_view text);
// Comma-separated list of ParseEps values.
absl::StatusOr<std::vector<double>> ParseEpsList(absl::string_view text);
// "lo:hi:step" or an explicit comma-separated list.
absl::StatusOr<LabelSet> ParseUniverse(absl::string_view text);

int CmdRandomize(const RunConfig& config, std::ostream& out, std::ostream& err);
int CmdOptimizeBins(const RunConfig& config, std::ostream& out,
                    std::ostream& err);
int CmdBench(const RunConfig& config, std::ostream& out, std::ostream& err);
int CmdVerify(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses `args` (args[0] is the program name) and dispatches. The seed
// defaults to the RRBINS_SEED environment variable when --seed is absent.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace rrbins::cli

#endif  // RRBINS_TOOLS_CLI_COMMANDS_H_
