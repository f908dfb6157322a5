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

// Non-regular triple junctions: detection, desingularisation at a small
// scale s (a self-expanding triod glued into B_s, or a Fermat projection
// when the tangent cone is not planar) and the flow experiment over a
// sequence of scales.

#pragma once

#include "netflow/flow.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netflow {

struct JunctionAngles {
  int vertex = -1;  // vertex index
  int id = -1;      // vertex label
  Point position;
  std::array<double, 3> angles{};  // radians, between incident tangents (0,1), (1,2), (2,0)
  double tangent_sum = 0.0;
  bool regular = false;
  bool fatal = false;  // two tangents coincide
};

/// One entry per valence-3 vertex.
std::vector<JunctionAngles> detect_nonregular(const Network& net, const Tolerances& tol = {});
int count_nonregular(const std::vector<JunctionAngles>& report);

enum class GlueMethod { ExpanderGlue, FermatProjection };

const char* to_string(GlueMethod m);

struct GluedJunction {
  int vertex = -1;
  int id = -1;
  GlueMethod method = GlueMethod::ExpanderGlue;
  double expander_scale = 0.0;  // 0 for the projection
  double direction_error = 0.0;
};

struct Desingularisation {
  double scale = 0.0;
  Network net;
  std::vector<GluedJunction> junctions;
  double c0_distance = 0.0;  // Hausdorff distance to the input
};

struct DesingularizeOptions {
  double expander_ratio = 1.0 / 6.0;  // expander scale = ratio * s
  int blend_nodes = 24;               // nodes across the annulus s/2 < rho < s
  Tolerances tol;
};

/// Modifies the network inside B_s around every non-regular junction. Nodes
/// outside the balls are copied bitwise. Rejects coincident tangents,
/// overlapping balls and balls that reach another vertex.
Desingularisation desingularize(const Network& net, double s, const DesingularizeOptions& opt = {});

struct ConvergenceOptions {
  StepParams step;
  Monitors monitors;
  std::vector<double> snapshot_times;  // matched times for the Hausdorff comparison
  double t_window = -1.0;              // angle window; < 0 means s_1^2
  double density_epsilon = 0.1;
  double density_radius = 0.25;   // r: inner ball B_r and annulus B_2r \ B_r around the junction
  double density_tau = 0.01;      // scales sqrt(t) for t in (0, tau]
  int density_scales = 12;
  bool parallel = true;
  DesingularizeOptions desingularize;
};

struct ScaleRun {
  double s = 0.0;
  Desingularisation initial;
  RunResult run;
  double sup_curvature_sqrt_t = 0.0;  // sup over t in (0, T] of sup|A| sqrt(t)
  double max_angle_deviation_after_window = 0.0;  // radians
  double final_angle_deviation = 0.0;
  double density_inner_max = 0.0;  // initial data, centres in B_r
  double density_outer_max = 0.0;  // initial data, centres in B_2r \ B_r
  double density_flow_max = 0.0;   // ratios along the flow at the junction
};

struct MatchedDistance {
  double s_a = 0.0;
  double s_b = 0.0;
  double t = 0.0;
  double distance = 0.0;
};

struct ConvergenceReport {
  double T = 0.0;
  double t_window = 0.0;
  double density_epsilon = 0.0;
  std::vector<ScaleRun> runs;  // in the order of the requested scales
  std::vector<MatchedDistance> distances;  // consecutive scale pairs at the snapshot times
  double curvature_spread = 0.0;  // (max - min) / max of sup|A| sqrt(t) over runs
  bool stopped_early = false;

  bool densities_ok() const;
  double max_angle_deviation_after_window() const;
};

/// Desingularises at every scale, flows each to T (concurrently when
/// `parallel`) and compares the runs. Early stops are recorded per run.
ConvergenceReport convergence_experiment(const Network& net, const std::vector<double>& scales, double T,
                                         const ConvergenceOptions& opt = {});

/// sup over rows with t > t0 of sup_curvature * sqrt(t - t0).
double sup_curvature_sqrt_t(std::span<const DiagnosticsRow> rows, double t0);

}  // namespace netflow
