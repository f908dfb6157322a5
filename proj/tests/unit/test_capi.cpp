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

// Exercises the shared library through the C header only.

#include "netflow/netflow.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string write_circle(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path p = dir / "circle.nfs";
  std::ofstream out(p, std::ios::binary);
  out << "netflow-scenario 1\ndim 2\nloop 0 64\n";
  for (int i = 0; i < 64; ++i) {
    const double a = 2.0 * M_PI * i / 64;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", std::cos(a), std::sin(a));
    out << buf;
  }
  out << "param t_end 1\nparam target_h 0.1\nend\n";
  return p.string();
}

}  // namespace

TEST_CASE("version strings and names") {
  CHECK(std::string(nf_format_version()) == "netflow-1");
  CHECK(std::string(nf_version()).size() > 0);
  CHECK(std::string(nf_stop_name(NF_STOP_EDGE_COLLAPSE)) == "edge-collapse");
  CHECK(std::string(nf_status_name(NF_IO)) == "io");
  CHECK(nf_exit_code_for_stop(NF_STOP_NONE) == 0);
  CHECK(nf_exit_code_for_stop(NF_STOP_JUNCTION_COLLISION) == 11);
}

TEST_CASE("network handles") {
  const fs::path dir = fs::temp_directory_path() / "netflow_test_capi";
  fs::remove_all(dir);
  const std::string path = write_circle(dir);
  nf_network* net = nullptr;
  REQUIRE(nf_network_load(path.c_str(), &net) == NF_OK);
  int dim = 0, nv = 0, ne = 0, nn = 0;
  CHECK(nf_network_counts(net, &dim, &nv, &ne, &nn) == NF_OK);
  CHECK(dim == 2);
  CHECK(nv == 0);
  CHECK(ne == 1);
  CHECK(nn == 64);
  double len = 0.0;
  CHECK(nf_network_length(net, &len) == NF_OK);
  CHECK(len == doctest::Approx(2 * M_PI).epsilon(1e-3));

  const double x[2] = {0.0, 0.0};
  double g = 0.0;
  CHECK(nf_network_gaussian(net, x, 2, 1.0 / std::sqrt(2.0), &g) == NF_OK);
  CHECK(g == doctest::Approx(std::sqrt(2 * M_PI / std::exp(1.0))).epsilon(1e-3));
  CHECK(nf_network_gaussian(net, x, 3, 1.0, &g) == NF_INVALID_ARGUMENT);
  CHECK(std::string(nf_last_error()).size() > 0);

  nf_options opt;
  nf_options_init(&opt);
  opt.has_target_h = 1;
  opt.target_h = 0.1;
  const double snaps[] = {0.1, 0.2};
  opt.snapshots = snaps;
  opt.snapshot_count = 2;
  nf_trajectory* traj = nullptr;
  nf_stop_kind stop = NF_STOP_NONE;
  REQUIRE(nf_simulate(net, 0.2, &opt, &traj, &stop) == NF_OK);
  size_t count = 0;
  CHECK(nf_trajectory_size(traj, &count) == NF_OK);
  CHECK(count >= 3);
  double t = -1.0;
  CHECK(nf_trajectory_time(traj, count - 1, &t) == NF_OK);
  CHECK(t == 0.2);
  CHECK(nf_trajectory_time(traj, count, &t) == NF_INVALID_ARGUMENT);
  nf_network* last = nullptr;
  CHECK(nf_trajectory_snapshot(traj, count - 1, &last) == NF_OK);
  CHECK(nf_network_length(last, &len) == NF_OK);
  CHECK(len == doctest::Approx(2 * M_PI * std::sqrt(0.6)).epsilon(5e-3));
  nf_network_free(last);
  nf_trajectory_free(traj);
  nf_network_free(net);

  CHECK(nf_network_load((dir / "missing.nfs").string().c_str(), &net) == NF_IO);
}

TEST_CASE("run_command through the C API") {
  const fs::path dir = fs::temp_directory_path() / "netflow_test_capi_cmd";
  fs::remove_all(dir);
  const std::string path = write_circle(dir);
  nf_options opt;
  nf_options_init(&opt);
  nf_command_result res{};
  REQUIRE(nf_run_command("simulate", path.c_str(), (dir / "out").string().c_str(), &opt, &res) == NF_OK);
  CHECK(res.stop == NF_STOP_EDGE_COLLAPSE);
  CHECK(res.stop_time == doctest::Approx(0.5).epsilon(0.05));
  CHECK(res.files_written > 4);
  const size_t n = nf_last_summary(nullptr, 0);
  std::string buf(n + 1, '\0');
  nf_last_summary(buf.data(), buf.size());
  CHECK(buf.find("stop\tedge-collapse") != std::string::npos);
  CHECK(nf_run_command("bogus", path.c_str(), (dir / "x").string().c_str(), &opt, &res) == NF_INVALID_ARGUMENT);
}
