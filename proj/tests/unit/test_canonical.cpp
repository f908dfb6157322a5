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
#include "netflow/canonical.hpp"
#include "netflow/flow.hpp"

#include <doctest.h>

using namespace netflow;

TEST_CASE("circle of radius sqrt(2) is a shrinker") {
  const Network c = make_circle(std::sqrt(2.0), 512);
  CHECK(shrinker_residual(c).max < 1e-4);
  CHECK(shrinker_residual(make_circle(1.0, 512)).max > 0.1);
}

TEST_CASE("shooting from radius sqrt(2) closes into the circle") {
  const ShrinkerShot shot = shoot_shrinker(vec2(std::sqrt(2.0), 0.0), kPi / 2, 10.0);
  CHECK(shot.closed);
  CHECK(shot.length == doctest::Approx(2.0 * kPi * std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("expander for the (90, 135, 135) cone is regular with the right asymptotics") {
  const ExpanderTriod e = expander_triod({vec2(1, 0), vec2(0, 1), vec2(-1, -1)});
  CHECK(e.max_direction_error < 1e-6);
  Network net = e.net;
  // Chord tangents at the junction carry an O(h) error.
  Tolerances tol;
  tol.regular = 1e-2;
  tol.angle = 1e-2;
  const ValidationReport r = validate(net, tol);
  CHECK(r.valid());
  CHECK(r.all_regular());
  CHECK(expander_residual(net).max < 1e-2);
}

TEST_CASE("expander scaling") {
  const std::array<Vec, 3> d{vec2(1, 0), vec2(0, 1), vec2(-1, -1)};
  const ExpanderTriod a = expander_triod(d, 1.0);
  const ExpanderTriod b = expander_triod(d, 0.5);
  CHECK((b.junction - 0.5 * a.junction).norm() < 1e-9);
}

TEST_CASE("coincident directions are rejected") {
  CHECK_THROWS_AS(expander_triod({vec2(1, 0), vec2(1, 1e-9), vec2(-1, 0)}), Error);
}

TEST_CASE("exact circle and barrier") {
  CHECK(circle_radius(1.0, 0.32) == doctest::Approx(0.6));
  CHECK(exact_circle(1.0, 0.32, 64).edges[0].nodes[0].norm() == doctest::Approx(0.6));
  const BarrierBall ball{vec2(0, 0), 0.5};
  CHECK(ball.radius(0.1) == doctest::Approx(std::sqrt(0.05)));
  CHECK(ball.radius(0.2) == 0.0);

  StepParams sp;
  sp.target_h = 2 * kPi / 128;
  const std::vector<double> snaps{0.1, 0.2, 0.3};
  const RunResult rr = run(make_state(make_circle(1.0, 128)), 0.3, sp, {}, snaps);
  CHECK(barrier_check(rr.trajectory, {vec2(0.3, 0.0), 0.5}).pass);
  CHECK_THROWS_AS(barrier_check(rr.trajectory, {vec2(0.0, 0.0), 1.2}), Error);

  // A circle that jumps sideways into the ball.
  Trajectory jump;
  jump.snapshots.push_back({0.0, make_circle(1.0, 128)});
  const Point shifted = vec2(0.5, 0.0);
  jump.snapshots.push_back({0.01, make_circle(1.0, 128, &shifted)});
  const BarrierResult br = barrier_check(jump, {vec2(1.5, 0.0), 0.45});
  CHECK_FALSE(br.pass);
  REQUIRE(br.first_violation);
  CHECK(br.first_violation->t == 0.01);
}
