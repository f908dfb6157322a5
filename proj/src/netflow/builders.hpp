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

// Standard networks used by the sample scenarios and the tests.

#pragma once

#include "netflow/network.hpp"

#include <array>

namespace netflow {

/// Straight segment with fixed ends and `nodes` equally spaced nodes.
Network make_segment(const Point& a, const Point& b, int nodes);

/// Closed loop of radius R around `centre` (origin of R^2 when null).
Network make_circle(double R, int nodes, const Point* centre = nullptr);

/// Junction at the origin with straight arms of the given lengths along
/// `directions` (normalised here); outer ends are fixed.
Network make_triod(const std::array<Vec, 3>& directions, const std::array<double, 3>& lengths, int nodes_per_arm);

/// Planar triod with arms at angles 0, 90 and 225 degrees, i.e. pairwise
/// angles (90, 135, 135).
Network make_triod_90_135_135(double arm_length, int nodes_per_arm);

/// Symmetric triod of arcs (u, bend u^2), u in [0, 1], rotated by 0, 120
/// and 240 degrees; fixed ends.
Network make_curved_triod(int nodes_per_arm, double bend = 0.3);

/// Two circular arcs meeting at junctions (-a, 0) and (a, 0) at 120 degrees
/// with straight legs out to fixed ends (-leg_end, 0) and (leg_end, 0).
/// Node spacing is about h.
Network make_lens(double a, double leg_end, double h);

/// Circles of radius R centred at (-(R + gap/2), 0) and (R + gap/2, 0),
/// each one edge starting and ending at its junction on the x axis, joined
/// by a segment across the gap.
Network make_two_circles_segment(double R, double gap, int nodes_per_circle);

}  // namespace netflow
