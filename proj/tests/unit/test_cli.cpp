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

// Runs the netflow executable on the sample scenarios.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = NETFLOW_SCENARIOS;

int netflow(const std::string& args) {
  const std::string cmd = std::string("\"") + NETFLOW_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path out_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("netflow_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string scenario(const std::string& name) { return "--scenario \"" + (kScenarios / name).string() + "\""; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("circle simulation exits with the edge-collapse code") {
  const fs::path out = out_dir("circle");
  CHECK(netflow("simulate " + scenario("circle.nfs") + " --out \"" + out.string() + "\" --target-h 0.1") == 13);
  const std::string stop = slurp(out / "stop.tsv");
  CHECK(stop.rfind("# netflow-1\n# command simulate\n", 0) == 0);
  CHECK(stop.find("# param target_h 0.10000000000000001\n") != std::string::npos);
  CHECK(stop.find("edge-collapse") != std::string::npos);
  CHECK(stop.find('\r') == std::string::npos);
}

TEST_CASE("lens simulation exits with the junction-collision code") {
  const fs::path out = out_dir("lens");
  CHECK(netflow("simulate " + scenario("lens.nfs") + " --out \"" + out.string() + "\" --target-h 0.05") == 11);
}

TEST_CASE("static Y runs to the end and exits 0") {
  const fs::path out = out_dir("y");
  CHECK(netflow("simulate " + scenario("y_static.nfs") + " --out \"" + out.string() + "\" --snapshots 0.01,0.02") == 0);
  CHECK(fs::exists(out / "snapshots" / "snapshot_0001.nfs"));
}

TEST_CASE("repeated runs give identical output") {
  const fs::path a = out_dir("det_a"), b = out_dir("det_b");
  const std::string common = "multiplicity " + scenario("two_circles_segment.nfs") + " --out ";
  REQUIRE(netflow(common + "\"" + a.string() + "\"") == 0);
  REQUIRE(netflow(common + "\"" + b.string() + "\"") == 0);
  for (const char* f : {"multiplicity.tsv", "regions.tsv", "summary.tsv", "dropped.nfs"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("usage and input errors") {
  CHECK(netflow("") == 2);
  CHECK(netflow("frobnicate --scenario x --out y") == 2);
  CHECK(netflow("simulate --scenario /nonexistent.nfs --out /tmp/x") == 2);
  CHECK(netflow("simulate " + scenario("circle.nfs") + " --out /tmp/x --cfl abc") == 2);

  const fs::path bad = out_dir("bad");
  fs::create_directories(bad);
  std::ofstream(bad / "bad.nfs") << "netflow-scenario 1\ndim 2\nedge 0 0 1 2\n";
  CHECK(netflow("simulate --scenario \"" + (bad / "bad.nfs").string() + "\" --out \"" + (bad / "o").string() + "\"") == 2);

  // Output directory below a regular file cannot be created.
  std::ofstream(bad / "file") << "x";
  CHECK(netflow("multiplicity " + scenario("two_circles_segment.nfs") + " --out \"" + (bad / "file" / "o").string() +
                "\"") == 3);
}

TEST_CASE("every subcommand accepts the shared flags") {
  const fs::path out = out_dir("flags");
  CHECK(netflow("analyze " + scenario("segment.nfs") + " --out \"" + out.string() +
                "\" --zeta 1.51 --cfl 0.1 --target-h 0.05 --seed 3 --snapshots 0.01") == 0);
  CHECK(fs::exists(out / "density.tsv"));
}
