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

// Test-side reference computations. Nothing here calls the library's own
// numerics for the quantity being checked: kernel integrals use adaptive
// Simpson quadrature instead of the closed form, and network generators
// build their geometry by hand.

#pragma once

#include "netflow/elliptic.hpp"
#include "netflow/network.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using netflow::Network;
using netflow::Point;
using netflow::Vec;

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

inline double kernel(const Point& y, const Point& x, double r) {
  return std::exp(-(y - x).squaredNorm() / (4.0 * r * r)) / std::sqrt(4.0 * M_PI * r * r);
}

/// Kernel integral over a polyline network, segment by segment. Segments
/// are split at the foot of the perpendicular so the integrand is unimodal.
inline double network_integral(const Network& net, const Point& x, double r) {
  double total = 0.0;
  for (const auto& e : net.edges)
    for (int s = 0; s < e.segment_count(); ++s) {
      const Point a = e.seg_a(s), b = e.seg_b(s);
      const double len = (b - a).norm();
      if (len == 0.0) continue;
      auto f = [&](double u) { return kernel(a + (u / len) * (b - a), x, r) ; };
      const double foot = std::clamp((x - a).dot(b - a) / len, 0.0, len);
      if (foot > 0.0) total += simpson(f, 0.0, foot);
      if (foot < len) total += simpson(f, foot, len);
    }
  return total;
}

/// Kernel integral over the exact circle |y - c| = rho, in angle.
inline double circle_integral(const Point& c, double rho, const Point& x, double r) {
  auto f = [&](double th) {
    Vec y(2);
    y << c[0] + rho * std::cos(th), c[1] + rho * std::sin(th);
    return rho * kernel(y, x, r);
  };
  return simpson(f, 0.0, M_PI) + simpson(f, M_PI, 2.0 * M_PI);
}

/// Planar network on a jittered grid: a random subset of grid edges (each
/// a polyline with a slight bend) plus nested circles inside empty cells.
/// Planar by construction; vertices of any valence.
inline Network random_planar_network(std::mt19937_64& rng, int grid = 4) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Network net(2);
  std::vector<Point> pos;
  std::vector<int> vid(static_cast<size_t>((grid + 1) * (grid + 1)), -1);
  auto at = [&](int i, int j) { return static_cast<size_t>(i * (grid + 1) + j); };
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      Vec p(2);
      p << i + 0.2 * (u(rng) - 0.5), j + 0.2 * (u(rng) - 0.5);
      pos.push_back(p);
    }
  struct E {
    size_t a, b;
  };
  std::vector<E> chosen;
  const double density = 0.3 + 0.5 * u(rng);
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      if (i < grid && u(rng) < density) chosen.push_back({at(i, j), at(i + 1, j)});
      if (j < grid && u(rng) < density) chosen.push_back({at(i, j), at(i, j + 1)});
    }
  auto vertex = [&](size_t k) {
    if (vid[k] < 0) vid[k] = net.add_vertex(pos[k], netflow::VertexKind::Fixed, static_cast<int>(k));
    return vid[k];
  };
  int id = 0;
  for (const auto& e : chosen) {
    const Point a = pos[e.a], b = pos[e.b];
    Vec n(2);
    n << -(b - a)[1], (b - a)[0];
    const double bend = 0.1 * (u(rng) - 0.5);
    std::vector<Point> nodes;
    for (int k = 0; k <= 4; ++k) {
      const double s = k / 4.0;
      nodes.push_back(a + s * (b - a) + bend * 4.0 * s * (1.0 - s) * n);
    }
    net.add_edge(vertex(e.a), vertex(e.b), nodes, id++);
  }
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      if (u(rng) > 0.3) continue;
      const int rings = 1 + static_cast<int>(u(rng) * 2.0);
      for (int k = 0; k < rings; ++k) {
        const double rho = 0.25 - 0.1 * k;
        std::vector<Point> nodes;
        for (int m = 0; m < 24; ++m) {
          Vec p(2);
          p << i + 0.5 + rho * std::cos(2 * M_PI * m / 24), j + 0.5 + rho * std::sin(2 * M_PI * m / 24);
          nodes.push_back(p);
        }
        net.add_loop(nodes, id++);
      }
    }
  for (auto& v : net.vertices)
    if (v.valence() == 3) v.kind = netflow::VertexKind::Junction;
  return net;
}

/// Weighted area of the triangles around vertex v of a glued surface,
/// computed from scratch; used for finite-difference gradient checks.
inline double local_energy(const netflow::GluedSurface& s, int v) {
  double e = 0.0;
  for (size_t t = 0; t < s.triangles.size(); ++t) {
    const auto& tri = s.triangles[t];
    if (tri[0] != v && tri[1] != v && tri[2] != v) continue;
    const Eigen::Vector3d& a = s.X[static_cast<size_t>(tri[0])];
    const Eigen::Vector3d& b = s.X[static_cast<size_t>(tri[1])];
    const Eigen::Vector3d& c = s.X[static_cast<size_t>(tri[2])];
    e += s.triangle_weight[t] * 0.5 * (b - a).cross(c - a).norm();
  }
  return e;
}

}  // namespace oracle
