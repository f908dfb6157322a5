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
#include "netflow/multiplicity.hpp"

#include <doctest.h>

#include <random>

using namespace netflow;

TEST_CASE("group element arithmetic") {
  GroupElement a(70), b(70);
  CHECK(a.is_zero());
  a.flip(3);
  a.flip(65);
  b.flip(65);
  const GroupElement c = a ^ b;
  CHECK(c.test(3));
  CHECK_FALSE(c.test(65));
  CHECK((c ^ c).is_zero());
  CHECK(GroupElement(4).bits() == "0000");
}

TEST_CASE("two circles joined by a segment") {
  const Network net = make_two_circles_segment(1.0, 1.0, 48);
  const MultiplicityAssignment a = assign_multiplicity(net);
  CHECK(a.regions.regions == 3);
  CHECK(a.regions.euler_ok());
  CHECK(a.cycle);
  CHECK(a.vanishing == std::vector<int>{2});
  CHECK_FALSE(a.element[0].is_zero());
  CHECK_FALSE(a.element[1].is_zero());
  CHECK(a.element[0] != a.element[1]);

  const Network kept = drop_vanishing(net, a);
  REQUIRE(kept.edges.size() == 2);
  CHECK(kept.edges[0].closed);
  CHECK(kept.edges[1].closed);
  CHECK(kept.total_length() == doctest::Approx(net.edges[0].length() + net.edges[1].length()));
}

TEST_CASE("theta graph: every edge separates two distinct regions") {
  const Network lens = make_lens(0.5, 1.5, 0.1);
  const MultiplicityAssignment a = assign_multiplicity(lens);
  CHECK(a.cycle);
  CHECK(a.regions.regions == 2);
  CHECK_FALSE(a.element[0].is_zero());
  CHECK_FALSE(a.element[1].is_zero());
  CHECK(a.element[2].is_zero());
  CHECK(a.element[3].is_zero());
}

TEST_CASE("nested circles bound an annulus") {
  Network net(2);
  for (double R : {1.0, 0.5}) {
    std::vector<Point> nodes;
    for (int i = 0; i < 32; ++i) nodes.push_back(vec2(R * std::cos(2 * kPi * i / 32), R * std::sin(2 * kPi * i / 32)));
    net.add_loop(nodes);
  }
  const MultiplicityAssignment a = assign_multiplicity(net);
  CHECK(a.regions.regions == 3);
  CHECK(a.regions.euler_ok());
  CHECK(a.vanishing.empty());
  const double area_annulus = std::min(a.regions.area[1], a.regions.area[2]);
  CHECK(area_annulus > 0.0);
}

TEST_CASE("weighted measure of a circle") {
  const Network c = make_circle(1.0, 256);
  const MultiplicityAssignment a = assign_multiplicity(c);
  CHECK(weighted_measure(c, a, [](const Point&) { return 1.0; }) == doctest::Approx(c.total_length()));
}

TEST_CASE("random planar networks satisfy the cycle condition") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    const Network net = oracle::random_planar_network(rng, 2 + i % 4);
    const MultiplicityAssignment a = assign_multiplicity(net);
    CHECK(a.cycle);
    CHECK(a.regions.euler_ok());
    CHECK(cycle_check(a.element, net).pass);
  }
}
