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

// Regenerates the sample scenarios: netflow_make_scenarios <dir>

#include "netflow/builders.hpp"
#include "netflow/scenario.hpp"

#include <cstdio>
#include <string>

using namespace netflow;

namespace {

void emit(const std::string& dir, const std::string& name, const Network& net,
          const std::map<std::string, std::string>& params) {
  Scenario sc;
  sc.net = net;
  sc.params = params;
  save_scenario(dir + "/" + name, sc);
  std::printf("%s\n", name.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <output dir>\n", argv[0]);
    return 2;
  }
  const std::string dir = argv[1];
  try {
    emit(dir, "line.nfs", make_segment(vec2(-1, 0), vec2(1, 0), 41),
         {{"t_end", "0.05"}, {"snapshots", "0.01,0.02"}, {"source", "flow"}, {"centres", "0,0"},
          {"scales", "0.05,0.1,0.2"}, {"centre_time", "0.05"}});
    emit(dir, "y_static.nfs", make_y(2, 1.0, 21),
         {{"t_end", "0.05"}, {"snapshots", "0.01,0.02"}, {"source", "static"}, {"scales", "0.01,0.1,0.3"}});
    emit(dir, "circle.nfs", make_circle(1.0, 256),
         {{"t_end", "0.6"}, {"target_h", "0.0245436926061703"}, {"snapshots", "0.1,0.2,0.3,0.4"},
          {"exact_circle_r0", "1"}, {"levels", "3"}});
    emit(dir, "circle_extinction.nfs", make_circle(1.0, 256),
         {{"target_h", "0.0245436926061703"}, {"centres", "0,0"}, {"centre_time", "0.5"},
          {"scales", "0.3,0.4,0.5,0.6"}, {"source", "flow"}});
    emit(dir, "lens.nfs", make_lens(0.5, 1.5, 0.05), {{"t_end", "0.5"}, {"snapshots", "0.02,0.04"}, {"parity_circles", "50"}});
    emit(dir, "triod_90_135_135.nfs", make_triod_90_135_135(0.5, 101),
         {{"scales", "0.04,0.02,0.01"}, {"t_end", "0.01"}, {"target_h", "0.0025"}});
    emit(dir, "curved_triod.nfs", make_curved_triod(201), {{"epsilon", "0.05"}, {"snapshots", "0.01"}, {"target_h", "0.05"}});
    emit(dir, "segment.nfs", make_segment(vec2(0, 0), vec2(1, 0), 21),
         {{"epsilon", "0.05"}, {"snapshots", "0.005,0.01"}, {"target_h", "0.05"}});
    emit(dir, "two_circles_segment.nfs", make_two_circles_segment(1.0, 1.0, 64), {{"drop", "1"}});
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
