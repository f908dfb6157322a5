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

#include "../support.hpp"

#include "netflow/builders.hpp"
#include "netflow/elliptic.hpp"

#include <doctest.h>

#include <random>

using namespace netflow;

TEST_CASE("orientation of a triod alternates in/out") {
  const OrientationAssignment o = assign_orientation(make_curved_triod(9));
  CHECK(o.consistent);
  CHECK(o.junction_colour[0] >= 0);
}

TEST_CASE("a triangle of junctions is an odd cycle") {
  Network net(2);
  std::array<int, 3> j{}, f{};
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * kPi * k / 3;
    j[static_cast<size_t>(k)] = net.add_vertex(vec2(std::cos(a), std::sin(a)), VertexKind::Junction, k);
    f[static_cast<size_t>(k)] = net.add_vertex(vec2(3 * std::cos(a), 3 * std::sin(a)), VertexKind::Fixed, k + 3);
  }
  for (int k = 0; k < 3; ++k) {
    const auto a = static_cast<size_t>(k), b = static_cast<size_t>((k + 1) % 3);
    net.add_edge(j[a], j[b], {net.vertices[static_cast<size_t>(j[a])].position, net.vertices[static_cast<size_t>(j[b])].position}, k);
    net.add_edge(j[a], f[a], {net.vertices[static_cast<size_t>(j[a])].position, net.vertices[static_cast<size_t>(f[a])].position}, k + 3);
  }
  const OrientationAssignment o = assign_orientation(net);
  CHECK_FALSE(o.consistent);
  CHECK(o.witness.size() % 2 == 1);
  CHECK_THROWS_AS(build_initial_surface(net, {}), Error);
}

TEST_CASE("energy gradient matches central differences") {
  SurfaceOptions so;
  so.target_h = 0.1;
  so.z_max = 0.3;
  GluedSurface s = build_initial_surface(make_curved_triod(21), so);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.01);
  for (size_t v = 0; v < s.X.size(); ++v)
    if (!s.fixed[v]) s.X[v].head<2>() += Eigen::Vector2d(g(rng), g(rng));
  const auto grad = energy_gradient(s);
  for (int v = 0; v < s.vertex_count(); v += 7) {
    if (s.fixed[static_cast<size_t>(v)]) continue;
    for (int k = 0; k < 2; ++k) {
      GluedSurface p = s;
      p.X[static_cast<size_t>(v)][k] += 1e-6;
      const double ep = oracle::local_energy(p, v);
      p.X[static_cast<size_t>(v)][k] -= 2e-6;
      const double em = oracle::local_energy(p, v);
      CHECK(grad[static_cast<size_t>(v)][k] == doctest::Approx((ep - em) / 2e-6).epsilon(1e-6));
    }
  }
}

TEST_CASE("minimisation lowers the energy monotonically and keeps the bottom row") {
  SurfaceOptions so;
  so.target_h = 0.1;
  so.z_max = 0.3;
  GluedSurface s = build_initial_surface(make_curved_triod(21), so);
  const auto bottom = s.X;
  const MinimizeReport rep = minimize(s);
  REQUIRE(rep.energy.size() >= 2);
  for (size_t i = 1; i < rep.energy.size(); ++i) CHECK(rep.energy[i] <= rep.energy[i - 1]);
  for (size_t v = 0; v < s.X.size(); ++v)
    if (s.fixed[v]) CHECK(s.X[v] == bottom[v]);
  CHECK(translator_residual(s).minimized);
}

TEST_CASE("slice at z = 0 reproduces the input") {
  SurfaceOptions so;
  so.target_h = 0.1;
  so.z_max = 0.3;
  const GluedSurface s = build_initial_surface(make_curved_triod(21), so);
  CHECK(hausdorff_distance(slice(s, 0.0), s.base) < 1e-12);
}
