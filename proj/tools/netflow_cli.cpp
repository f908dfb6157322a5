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

// netflow command-line front end. Talks to the library only through the
// C interface.
//
// Exit status: 0 success, 2 usage or malformed input, 3 I/O failure,
// 4 domain error, 5 internal error, 10-14 flow stopped by a monitor
// (see nf_exit_code_for_stop).

#include "netflow/netflow.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;
constexpr int kExitInternal = 5;

struct Flags {
  std::string scenario;
  std::string out;
  std::vector<double> snapshots;
  std::optional<double> zeta, cfl, target_h, epsilon, zmax;
  std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--scenario", f.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output directory (created if missing)")->required();
  sub->add_option("--snapshots", f.snapshots, "Snapshot times t1,t2,...")->delimiter(',');
  sub->add_option("--zeta", f.zeta, "Density threshold zeta, 3/2 < zeta < sqrt(2 pi/e) [default 1.51]");
  sub->add_option("--cfl", f.cfl, "Time step factor: dt = cfl * h_min^2 [default 0.2]");
  sub->add_option("--target-h", f.target_h, "Target node spacing [default 0.05]");
  sub->add_option("--epsilon", f.epsilon, "Elliptic regularisation epsilon [default 0.05]");
  sub->add_option("--zmax", f.zmax, "Height of the lifted surface; 0 picks it from the times [default 0]");
  sub->add_option("--seed", f.seed, "Random seed [default 1]");
}

int exit_for(nf_status s) {
  switch (s) {
    case NF_OK: return 0;
    case NF_INVALID_ARGUMENT:
    case NF_PARSE: return kExitUsage;
    case NF_IO: return kExitIo;
    case NF_DOMAIN: return kExitDomain;
    case NF_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netflow: curve network flow experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nf_version()) + " (" + nf_format_version() + ")");

  Flags flags;
  const char* names[] = {"simulate", "analyze", "regularize", "translate", "multiplicity", "convergence"};
  const char* help[] = {
      "Flow a scenario and write snapshots, diagnostics and the stop event",
      "Gaussian density ratios, classification, parity and entropy",
      "Detect and desingularise non-regular junctions; run the scale experiment",
      "Elliptic regularisation: minimise the lifted surface and slice it",
      "Z2 multiplicities, cycle check and removal of vanishing edges",
      "Refinement study of a scenario's flow",
  };
  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < std::size(names); ++i) {
    subs.push_back(app.add_subcommand(names[i], help[i]));
    add_flags(subs.back(), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  nf_options opt;
  nf_options_init(&opt);
  if (flags.zeta) opt.has_zeta = 1, opt.zeta = *flags.zeta;
  if (flags.cfl) opt.has_cfl = 1, opt.cfl = *flags.cfl;
  if (flags.target_h) opt.has_target_h = 1, opt.target_h = *flags.target_h;
  if (flags.epsilon) opt.has_epsilon = 1, opt.epsilon = *flags.epsilon;
  if (flags.zmax) opt.has_z_max = 1, opt.z_max = *flags.zmax;
  if (flags.seed) opt.has_seed = 1, opt.seed = *flags.seed;
  opt.snapshots = flags.snapshots.data();
  opt.snapshot_count = flags.snapshots.size();

  nf_command_result result{};
  const nf_status st = nf_run_command(command.c_str(), flags.scenario.c_str(), flags.out.c_str(), &opt, &result);
  if (st != NF_OK) {
    std::fprintf(stderr, "netflow %s: %s error: %s\n", command.c_str(), nf_status_name(st), nf_last_error());
    return exit_for(st);
  }
  std::vector<char> buf(nf_last_summary(nullptr, 0) + 1);
  nf_last_summary(buf.data(), buf.size());
  std::fputs(buf.data(), stdout);
  std::printf("files\t%d\n", result.files_written);
  if (result.stop != NF_STOP_NONE)
    std::fprintf(stderr, "netflow %s: stopped by %s at t = %.17g\n", command.c_str(), nf_stop_name(result.stop),
                 result.stop_time);
  return nf_exit_code_for_stop(result.stop);
}
