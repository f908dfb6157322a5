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

// Z2 multiplicities of planar networks: faces of the complement, per-edge
// coefficients [left region] + [right region], the cycle condition at
// vertices and removal of zero-multiplicity edges.

#pragma once

#include "netflow/network.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace netflow {

/// Bit vector over region ids with exclusive-or addition.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(int regions);

  int size() const { return size_; }
  void flip(int region);
  bool test(int region) const;
  bool is_zero() const;
  /// 1 for nonzero elements, 0 otherwise.
  int norm() const { return is_zero() ? 0 : 1; }
  GroupElement& operator^=(const GroupElement& o);
  friend GroupElement operator^(GroupElement a, const GroupElement& b) { return a ^= b; }
  friend bool operator==(const GroupElement& a, const GroupElement& b) = default;
  /// Region bits, lowest region first, e.g. "0110".
  std::string bits() const;

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct RegionMap {
  int regions = 0;
  int unbounded = -1;
  std::vector<int> left;   // per edge, region on the left of the stored direction
  std::vector<int> right;
  std::vector<double> area;  // per region; unbounded is +inf
  int components = 0;
  int euler_vertices = 0;  // vertices, plus one per vertex-free loop
  int euler_edges = 0;

  /// V - E + F == 1 + C.
  bool euler_ok() const { return euler_vertices - euler_edges + regions == 1 + components; }
};

/// Faces of the planar subdivision by angular ordering and face tracing.
/// Any vertex valence is accepted.
RegionMap compute_regions(const Network& net);

GroupElement edge_multiplicity(int edge, const RegionMap& regions);

struct MultiplicityAssignment {
  std::vector<GroupElement> element;  // per edge
  RegionMap regions;
  bool cycle = false;
  int witness_vertex = -1;  // first vertex where the sum is nonzero
  std::vector<int> vanishing;  // edge indices with the zero element
};

struct CycleCheck {
  bool pass = true;
  int witness_vertex = -1;
};

/// Z2 sum of incident edge elements at every vertex (a loop edge counts twice).
CycleCheck cycle_check(const std::vector<GroupElement>& element, const Network& net);

MultiplicityAssignment assign_multiplicity(const Network& net);

/// Sum over edges with |g| = 1 of the trapezoid integral of phi, given per
/// edge, per node.
double weighted_measure(const Network& net, const MultiplicityAssignment& a,
                        const std::vector<std::vector<double>>& phi);
double weighted_measure(const Network& net, const MultiplicityAssignment& a,
                        const std::function<double(const Point&)>& phi);

/// Removes zero-multiplicity edges, then merges every valence-2 vertex into
/// a smooth edge (a loop on a single vertex becomes a closed loop). Rejects
/// results where a former junction is left with a single edge.
Network drop_vanishing(const Network& net, const MultiplicityAssignment& a);

}  // namespace netflow
