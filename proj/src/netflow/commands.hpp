// Copyright 2026 The netflow Authors
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

// Experiment drivers behind the command-line subcommands. Each command reads
// a scenario, resolves its parameters (flag, then scenario param, then
// default), writes tab-separated tables into an output directory and
// returns a short summary.
//
// Every table starts with comment lines carrying the format version and the
// resolved parameters, followed by exactly one header row.

#pragma once

#include "netflow/scenario.hpp"
#include "netflow/trajectory.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netflow {

struct CommandOptions {
  std::optional<double> zeta;
  std::optional<double> cfl;
  std::optional<double> target_h;
  std::optional<double> epsilon;
  std::optional<double> z_max;
  std::optional<std::vector<double>> snapshots;
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  std::optional<StopEvent> stop;   // set by simulate when a monitor fired
  std::vector<std::string> files;  // written, relative to the output directory
  std::map<std::string, std::string> summary;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

CommandResult cmd_simulate(const Scenario& sc, const std::string& source, const std::string& out_dir,
                           const CommandOptions& opt);
CommandResult cmd_analyze(const Scenario& sc, const std::string& source, const std::string& out_dir,
                          const CommandOptions& opt);
CommandResult cmd_regularize(const Scenario& sc, const std::string& source, const std::string& out_dir,
                             const CommandOptions& opt);
CommandResult cmd_translate(const Scenario& sc, const std::string& source, const std::string& out_dir,
                            const CommandOptions& opt);
CommandResult cmd_multiplicity(const Scenario& sc, const std::string& source, const std::string& out_dir,
                               const CommandOptions& opt);
CommandResult cmd_convergence(const Scenario& sc, const std::string& source, const std::string& out_dir,
                              const CommandOptions& opt);

/// Loads the scenario, creates out_dir and dispatches by name.
CommandResult run_command(const std::string& name, const std::string& scenario_path, const std::string& out_dir,
                          const CommandOptions& opt);

/// Process exit status for a stop kind: 0 for none, 10 + kind otherwise.
int exit_code(StopKind kind);

/// Snapshots written by simulate into `dir` (read through its index table).
Trajectory load_trajectory(const std::string& dir);

}  // namespace netflow
