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
#include "netflow/flow.hpp"

#include <doctest.h>

#include <random>

using namespace netflow;

namespace {

// Weiszfeld iteration from the centroid; converges to the Fermat point
// when it is not one of the q_i.
Point weiszfeld(const std::array<Point, 3>& q) {
  Point p = (q[0] + q[1] + q[2]) / 3.0;
  for (int it = 0; it < 200000; ++it) {
    Point num = zeros(2);
    double den = 0.0;
    for (const auto& qi : q) {
      const double r = (p - qi).norm();
      num += qi / r;
      den += 1.0 / r;
    }
    p = num / den;
  }
  return p;
}

}  // namespace

TEST_CASE("Fermat point matches Weiszfeld iteration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::array<Point, 3> q{vec2(u(rng), u(rng)), vec2(u(rng), u(rng)), vec2(u(rng), u(rng))};
    const FermatResult f = fermat_point(q);
    if (f.degenerate) {
      CHECK(f.point == q[static_cast<size_t>(f.clamped_to)]);
      continue;
    }
    CHECK((f.point - weiszfeld(q)).norm() < 1e-9);
  }
}

TEST_CASE("Fermat point of an obtuse triangle is the obtuse vertex") {
  const std::array<Point, 3> q{vec2(0, 0), vec2(1, 0.05), vec2(-1, 0.05)};
  const FermatResult f = fermat_point(q);
  CHECK(f.degenerate);
  CHECK(f.clamped_to == 0);
  CHECK(f.point == q[0]);
}

TEST_CASE("static Y does not move") {
  FlowState st = make_state(make_y(2, 1.0, 21));
  const StepParams sp;
  for (int k = 0; k < 200; ++k) REQUIRE_FALSE(step(st, sp, adaptive_dt(st, sp)));
  for (const auto& ve : st.velocity)
    for (const auto& v : ve) CHECK(v.norm() < 1e-12);
}

TEST_CASE("circle follows R^2 = 1 - 2t") {
  StepParams sp;
  sp.target_h = 2 * kPi / 128;
  const std::vector<double> snaps{0.1, 0.2};
  const RunResult r = run(make_state(make_circle(1.0, 128)), 0.2, sp, {}, snaps);
  for (const auto& s : r.trajectory.snapshots) {
    double mean = 0.0;
    for (const auto& p : s.net.edges[0].nodes) mean += p.norm();
    mean /= s.net.edges[0].node_count();
    CHECK(mean == doctest::Approx(std::sqrt(1.0 - 2.0 * s.t)).epsilon(2e-3));
  }
}

TEST_CASE("length never increases") {
  StepParams sp;
  sp.target_h = 0.04;
  const RunResult r = run(make_state(make_curved_triod(41)), 0.02, sp);
  CHECK(r.max_length_increase <= 1e-12);
  CHECK(r.diagnostics.back().length < r.diagnostics.front().length);
}

TEST_CASE("junctions stay at 120 degrees") {
  StepParams sp;
  sp.target_h = 0.04;
  const RunResult r = run(make_state(make_curved_triod(41)), 0.01, sp);
  for (const auto& d : r.diagnostics) CHECK(d.angle_deviation < 1e-6);
}

TEST_CASE("lens ends in a junction collision, circle in an edge collapse") {
  StepParams sp;
  sp.target_h = 0.04;
  const RunResult lens = run(make_state(make_lens(0.5, 1.5, 0.04)), 1.0, sp);
  REQUIRE(lens.stop);
  CHECK(lens.stop->kind == StopKind::JunctionCollision);
  sp.target_h = 2 * kPi / 64;
  const RunResult circle = run(make_state(make_circle(1.0, 64)), 1.0, sp);
  REQUIRE(circle.stop);
  CHECK(circle.stop->kind == StopKind::EdgeCollapse);
  CHECK(circle.stop->time == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("step budget ends the run without a stop event") {
  Monitors m;
  m.max_steps = 10;
  const RunResult r = run(make_state(make_circle(1.0, 32)), 1.0, {}, m);
  REQUIRE(r.stop);
  CHECK(r.stop->kind == StopKind::None);
  CHECK(r.final_state.steps == 10);
}

TEST_CASE("snapshots land on the requested times") {
  StepParams sp;
  sp.target_h = 0.1;
  const std::vector<double> snaps{0.013, 0.05};
  const RunResult r = run(make_state(make_circle(1.0, 64)), 0.05, sp, {}, snaps);
  std::vector<double> times;
  for (const auto& s : r.trajectory.snapshots) times.push_back(s.t);
  CHECK(std::find(times.begin(), times.end(), 0.013) != times.end());
  CHECK(times.back() == 0.05);
}
