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

#include "netflow/builders.hpp"

#include <cmath>

namespace netflow {

namespace {

std::vector<Point> straight(const Point& a, const Point& b, int n) {
  std::vector<Point> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(a + (static_cast<double>(i) / (n - 1)) * (b - a));
  return nodes;
}

// Arc of the circle (centre c, radius R) from angle a0 to a1.
std::vector<Point> arc(const Point& c, double R, double a0, double a1, int n) {
  std::vector<Point> nodes;
  for (int i = 0; i < n; ++i) {
    const double a = a0 + (a1 - a0) * i / (n - 1);
    nodes.push_back(c + vec2(R * std::cos(a), R * std::sin(a)));
  }
  return nodes;
}

}  // namespace

Network make_segment(const Point& a, const Point& b, int nodes) {
  if (a.size() != b.size()) fail("segment end dimensions differ");
  if (nodes < 2) fail("segment needs at least two nodes");
  Network net(static_cast<int>(a.size()));
  const int v0 = net.add_vertex(a, VertexKind::Fixed, 0);
  const int v1 = net.add_vertex(b, VertexKind::Fixed, 1);
  net.add_edge(v0, v1, straight(a, b, nodes), 0);
  return net;
}

Network make_circle(double R, int nodes, const Point* centre) {
  if (!(R > 0.0) || nodes < 3) fail("circle needs R > 0 and at least three nodes");
  const Point c = centre ? *centre : zeros(2);
  if (c.size() != 2) fail("circle centre must be planar");
  Network net(2);
  std::vector<Point> pts;
  for (int i = 0; i < nodes; ++i) {
    const double a = 2.0 * kPi * i / nodes;
    pts.push_back(c + vec2(R * std::cos(a), R * std::sin(a)));
  }
  net.add_loop(std::move(pts), 0);
  return net;
}

Network make_triod(const std::array<Vec, 3>& directions, const std::array<double, 3>& lengths, int nodes_per_arm) {
  const int dim = static_cast<int>(directions[0].size());
  if (nodes_per_arm < 2) fail("triod arms need at least two nodes");
  Network net(dim);
  const int j = net.add_vertex(zeros(dim), VertexKind::Junction, 0);
  for (int k = 0; k < 3; ++k) {
    const Vec& d = directions[static_cast<size_t>(k)];
    if (d.size() != dim || !(d.norm() > 0.0)) fail("triod directions must be nonzero and of equal dimension");
    if (!(lengths[static_cast<size_t>(k)] > 0.0)) fail("triod arm lengths must be positive");
    const Point end = lengths[static_cast<size_t>(k)] * d / d.norm();
    const int v = net.add_vertex(end, VertexKind::Fixed, k + 1);
    net.add_edge(j, v, straight(zeros(dim), end, nodes_per_arm), k);
  }
  return net;
}

Network make_triod_90_135_135(double arm_length, int nodes_per_arm) {
  return make_triod({vec2(1.0, 0.0), vec2(0.0, 1.0), vec2(-1.0, -1.0)}, {arm_length, arm_length, arm_length},
                    nodes_per_arm);
}

Network make_curved_triod(int nodes_per_arm, double bend) {
  if (nodes_per_arm < 3) fail("curved triod arms need at least three nodes");
  Network net(2);
  const int j = net.add_vertex(zeros(2), VertexKind::Junction, 0);
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * kPi * k / 3.0, c = std::cos(a), s = std::sin(a);
    std::vector<Point> nodes;
    for (int i = 0; i < nodes_per_arm; ++i) {
      const double u = static_cast<double>(i) / (nodes_per_arm - 1);
      const double x = u, y = bend * u * u;
      nodes.push_back(vec2(c * x - s * y, s * x + c * y));
    }
    const int v = net.add_vertex(nodes.back(), VertexKind::Fixed, k + 1);
    net.add_edge(j, v, std::move(nodes), k);
  }
  return net;
}

Network make_lens(double a, double leg_end, double h) {
  if (!(a > 0.0) || !(leg_end > a) || !(h > 0.0)) fail("lens needs 0 < a < leg_end and h > 0");
  // Arcs of radius 2a/sqrt(3) centred at (0, -+a/sqrt(3)) leave the
  // junctions at 120 degrees to the legs.
  const double R = 2.0 * a / std::sqrt(3.0);
  const double c = a / std::sqrt(3.0);
  const double half = kPi / 3.0;
  const int n_arc = std::max(5, static_cast<int>(std::ceil(2.0 * half * R / h)) + 1);
  const int n_leg = std::max(3, static_cast<int>(std::ceil((leg_end - a) / h)) + 1);
  Network net(2);
  const int left = net.add_vertex(vec2(-a, 0.0), VertexKind::Junction, 0);
  const int right = net.add_vertex(vec2(a, 0.0), VertexKind::Junction, 1);
  const int far_left = net.add_vertex(vec2(-leg_end, 0.0), VertexKind::Fixed, 2);
  const int far_right = net.add_vertex(vec2(leg_end, 0.0), VertexKind::Fixed, 3);
  net.add_edge(left, right, arc(vec2(0.0, -c), R, kPi / 2 + half, kPi / 2 - half, n_arc), 0);
  net.add_edge(left, right, arc(vec2(0.0, c), R, -kPi / 2 - half, -kPi / 2 + half, n_arc), 1);
  net.add_edge(far_left, left, straight(vec2(-leg_end, 0.0), vec2(-a, 0.0), n_leg), 2);
  net.add_edge(right, far_right, straight(vec2(a, 0.0), vec2(leg_end, 0.0), n_leg), 3);
  return net;
}

Network make_two_circles_segment(double R, double gap, int nodes_per_circle) {
  if (!(R > 0.0) || !(gap > 0.0) || nodes_per_circle < 4) fail("two circles need R > 0, gap > 0 and four nodes");
  const double cx = R + 0.5 * gap;
  Network net(2);
  const int pl = net.add_vertex(vec2(-0.5 * gap, 0.0), VertexKind::Junction, 0);
  const int pr = net.add_vertex(vec2(0.5 * gap, 0.0), VertexKind::Junction, 1);
  net.add_edge(pl, pl, arc(vec2(-cx, 0.0), R, 0.0, 2.0 * kPi, nodes_per_circle + 1), 0);
  net.add_edge(pr, pr, arc(vec2(cx, 0.0), R, kPi, 3.0 * kPi, nodes_per_circle + 1), 1);
  const int n_seg = std::max(3, static_cast<int>(std::ceil(gap / (2.0 * kPi * R / nodes_per_circle))) + 1);
  net.add_edge(pl, pr, straight(vec2(-0.5 * gap, 0.0), vec2(0.5 * gap, 0.0), n_seg), 2);
  return net;
}

}  // namespace netflow
