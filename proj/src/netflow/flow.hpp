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

// Explicit front-tracking curve shortening flow for networks. Interior
// nodes move with the three-point curvature vector plus an optional
// tangential redistribution term; triple junctions are placed at the
// Fermat point of their three neighbouring nodes, which makes the three
// unit tangents sum to zero; valence-1 vertices stay fixed.

#pragma once

#include "netflow/trajectory.hpp"

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace netflow {

struct FermatResult {
  Point point;
  bool degenerate = false;  // some triangle angle >= 120 degrees
  int clamped_to = -1;      // index of the q_i returned when degenerate
};

/// argmin_p sum_i |p - q_i|, in closed form.
FermatResult fermat_point(const std::array<Point, 3>& q);

struct StepParams {
  double cfl = 0.2;
  double target_h = 0.05;
  double omega = 0.5;  // tangential redistribution weight
  int remesh_interval = 1;  // 0 disables remeshing
  double dt_max = std::numeric_limits<double>::infinity();

  void check() const;
};

struct FlowState {
  Network net;
  double t = 0.0;
  long steps = 0;
  // Per edge, per node; zero at vertex-owned end nodes.
  std::vector<std::vector<Vec>> curvature;
  std::vector<std::vector<Vec>> velocity;
};

FlowState make_state(Network net, double t0 = 0.0);

FermatResult junction_project(const FlowState& state, int vertex);

/// cfl * h_min^2 clamped to dt_max; 0 when two consecutive nodes coincide.
double adaptive_dt(const FlowState& state, const StepParams& params);

/// Advances `state` by dt. Returns a stop event when the step collapsed an
/// edge; embeddedness and curvature are checked by run().
std::optional<StopEvent> step(FlowState& state, const StepParams& params, double dt);

/// Refines/coarsens edges whose spacing left [target_h/2, 2 target_h].
/// Returns the index of an edge that fell below three nodes, or -1.
int remesh(Network& net, double target_h);

struct Monitors {
  double max_curvature = std::numeric_limits<double>::infinity();
  double collision_factor = 1.0;  // junction collision below factor * target_h
  bool check_embedding = true;
  double embed_rel = 1e-9;
  bool density_monitor = false;
  double zeta = 1.51;
  int density_interval = 50;
  long max_steps = 50'000'000;
};

struct DiagnosticsRow {
  double t = 0.0;
  double length = 0.0;
  double sup_curvature = 0.0;
  double min_junction_distance = std::numeric_limits<double>::infinity();
  double min_spacing = 0.0;
  double angle_deviation = 0.0;  // max |angle - 2pi/3| over junctions, radians
};

DiagnosticsRow diagnose(const Network& net, double t);

struct RunResult {
  Trajectory trajectory;
  std::vector<DiagnosticsRow> diagnostics;  // one per accepted step, plus t0
  std::optional<StopEvent> stop;
  FlowState final_state;
  double max_length_increase = 0.0;  // max_k (L_{k+1} - L_k) / L_k
};

/// Runs to t_end or the first monitor event. Snapshot times are hit exactly;
/// t0 and the final time are always recorded.
RunResult run(FlowState state, double t_end, const StepParams& params, const Monitors& monitors = {},
              std::span<const double> snapshot_times = {});

}  // namespace netflow
