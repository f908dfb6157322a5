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

// Reference solutions: shrinking circles, self-shrinker and self-expander
// curves, and the shrinking-ball barrier.

#pragma once

#include "netflow/trajectory.hpp"

#include <array>
#include <optional>
#include <vector>

namespace netflow {

struct NodeResidual {
  std::vector<std::vector<Vec>> per_node;  // per edge, per node; zero at non-interior nodes
  double max = 0.0;
};

/// k + x^perp / 2 at interior nodes, perp taken against the chord direction.
NodeResidual shrinker_residual(const Network& curve);

/// k - x^perp / (2t) at interior nodes; t = 1 is the unit expander.
NodeResidual expander_residual(const Network& curve, double t = 1.0);

struct ShrinkerShot {
  std::vector<Point> nodes;  // planar polyline
  bool closed = false;
  double closure_error = 0.0;  // position gap at the detected closing point
  double length = 0.0;
};

/// Integrates the planar shrinker ODE theta' = -(x . nu) / 2 (arclength s,
/// nu the left normal) from (start, theta0) with RK4 step ds up to
/// max_length. The curve is reported closed when it returns to its start
/// with the same heading (mod 2 pi) within close_tol.
ShrinkerShot shoot_shrinker(const Point& start, double theta0, double max_length, double ds = 1e-3,
                            double close_tol = 1e-6);

struct ExpanderOptions {
  double radius = 8.0;       // arcs run out to |x - junction| >= radius at unit scale
  double ds = 2e-3;          // RK4 step at unit scale
  int nodes_per_arc = 161;   // output sampling, uniform in arclength
  double tolerance = 1e-9;   // on the asymptotic direction mismatch
  int max_iterations = 50;
};

struct ExpanderTriod {
  Network net;               // junction id 0, fixed ends 1..3, edges 0..2 run outward
  Point junction;            // in ambient coordinates, after scaling
  double rotation = 0.0;     // in-plane angle of the first arc at the junction
  std::array<double, 3> direction_error{};
  double max_direction_error = 0.0;
  int iterations = 0;
  std::array<Vec, 3> plane;  // plane[0], plane[1]: orthonormal in-plane basis; plane[2] unused
  std::array<int, 3> order{};  // arc k matches input direction order[k]
};

/// Self-expanding triod asymptotic to the rays R_+ d_i, scaled by `scale`.
/// Rejects non-coplanar or nearly coincident directions.
ExpanderTriod expander_triod(const std::array<Vec, 3>& directions, double scale = 1.0,
                             const ExpanderOptions& opt = {});

/// Closed loop of radius sqrt(R0^2 - 2t) with `nodes` equally spaced nodes.
Network exact_circle(double R0, double t, int nodes = 256, const Point* centre = nullptr);
double circle_radius(double R0, double t);

struct BarrierBall {
  Point centre;
  double R0 = 1.0;

  double radius(double t) const;  // 0 after extinction
};

struct BarrierViolation {
  double t = 0.0;
  double distance = 0.0;
  double radius = 0.0;
  double tolerance = 0.0;
};

struct BarrierResult {
  bool pass = true;
  int snapshots_checked = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // min of distance - R(t) + tol
  std::optional<BarrierViolation> first_violation;
};

/// Checks dist(M_t, centre) >= R(t) - c * h^2 / R(t) at every snapshot, where
/// h is the snapshot's longest segment. Rejects a first snapshot that meets
/// the initial ball.
BarrierResult barrier_check(const Trajectory& traj, const BarrierBall& ball, double c = 1.0);

}  // namespace netflow
