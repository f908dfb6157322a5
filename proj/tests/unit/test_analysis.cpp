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

#include "netflow/analysis.hpp"
#include "netflow/builders.hpp"
#include "netflow/flow.hpp"

#include <doctest.h>

#include <random>

using namespace netflow;

TEST_CASE("closed-form segment integral agrees with quadrature") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Network lens = make_lens(0.5, 1.5, 0.1);
  for (int i = 0; i < 20; ++i) {
    const Point x = vec2(u(rng), 0.5 * u(rng));
    const double r = 0.05 + 0.5 * (u(rng) + 1.0);
    CHECK(gaussian_integral(lens, x, r) == doctest::Approx(oracle::network_integral(lens, x, r)).epsilon(1e-10));
  }
}

TEST_CASE("unit density of a line and 3/2 of a Y") {
  const Network line = make_segment(vec2(-100, 0), vec2(100, 0), 3);
  const Network y = make_y(2, 100.0, 3);
  for (double r : {0.01, 0.1, 1.0, 3.0}) {
    CHECK(gaussian_integral(line, vec2(0.7, 0), r) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gaussian_integral(y, zeros(2), r) == doctest::Approx(1.5).epsilon(1e-12));
  }
}

TEST_CASE("circle through its extinction point gives sqrt(2 pi / e)") {
  const double target = std::sqrt(2.0 * kPi / std::exp(1.0));
  CHECK(oracle::circle_integral(zeros(2), std::sqrt(2.0), zeros(2), 1.0) == doctest::Approx(target).epsilon(1e-12));
  CHECK(gaussian_integral(make_circle(std::sqrt(2.0), 2048), zeros(2), 1.0) == doctest::Approx(target).epsilon(1e-5));
}

TEST_CASE("density ratio uses the snapshot at t - r^2") {
  Trajectory traj;
  traj.snapshots.push_back({0.0, make_segment(vec2(-10, 0), vec2(10, 0), 3)});
  traj.snapshots.push_back({0.75, make_y(2, 10.0, 3)});
  const DensityRatio a = gaussian_density_ratio(traj, {zeros(2), 1.0}, 0.5);
  CHECK(a.snapshot_time == 0.75);
  CHECK(a.value == doctest::Approx(1.5));
  const DensityRatio b = gaussian_density_ratio(traj, {zeros(2), 1.0}, 1.0);
  CHECK(b.snapshot_time == 0.0);
  CHECK(b.value == doctest::Approx(1.0));
}

TEST_CASE("classification bands") {
  Thresholds th;
  CHECK(classify(1.0, th) == DensityLabel::Regular);
  CHECK(classify(1.5, th) == DensityLabel::Triple);
  CHECK(classify(1.7, th) == DensityLabel::AboveZeta);
  CHECK(classify(2.1, th) == DensityLabel::Above2);
  CHECK(classify(1.25, th) == DensityLabel::Unclassified);
}

TEST_CASE("parity: transversal circles away from vertices cross an even number of times") {
  const Network lens = make_lens(0.5, 1.5, 0.05);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  for (int k = 0; k < 400 && tested < 50; ++k) {
    const Point c = vec2(-1.6 + 3.2 * u(rng), -0.7 + 1.4 * u(rng));
    const double rad = 0.05 + 0.5 * u(rng);
    bool encloses = false;
    for (const auto& v : lens.vertices) encloses = encloses || (v.position - c).norm() <= rad;
    if (encloses) continue;
    try {
      const ParityResult p = disk_parity(lens, c, rad);
      CHECK(p.even);
      ++tested;
    } catch (const NonTransversal&) {
    }
  }
  CHECK(tested == 50);
  const ParityResult j = disk_parity(lens, vec2(-0.5, 0), 0.03);
  CHECK(j.count == 3);
  CHECK_FALSE(j.even);
  CHECK(j.triple_candidate);
}

TEST_CASE("monotone density ratios along a flow") {
  StepParams sp;
  sp.target_h = 0.03;
  const std::vector<double> scales = geometric_scales(0.03, 0.15, 4);
  std::vector<double> times;
  for (double r : scales) times.push_back(0.04 - r * r);
  std::sort(times.begin(), times.end());
  const RunResult rr = run(make_state(make_lens(0.5, 3.0, 0.03)), 0.04, sp, {}, times);
  // Centred where the left junction is at the end.
  const Point x = rr.final_state.net.vertices[0].position;
  const DensityReport rep = density_report(rr.trajectory, {x, 0.04}, scales);
  CHECK(rep.max_monotonicity_violation <= 1e-3);
  CHECK(rep.ratios.front() == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("entropy of a line is one") {
  const EntropyEstimate e = entropy_estimate(make_segment(vec2(-50, 0), vec2(50, 0), 1001), 12, 5);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-3));
}
