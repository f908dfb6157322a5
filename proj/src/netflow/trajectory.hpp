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

#pragma once

#include "netflow/network.hpp"

#include <string>
#include <vector>

namespace netflow {

enum class StopKind { None, CurvatureBlowup, JunctionCollision, EmbeddednessLoss, EdgeCollapse, DensityExceedsZeta };

const char* to_string(StopKind kind);

struct StopEvent {
  StopKind kind = StopKind::None;
  double time = 0.0;
  Point location;
  std::string detail;
};

struct Snapshot {
  double t = 0.0;
  Network net;
};

/// Snapshots in increasing time order.
struct Trajectory {
  std::vector<Snapshot> snapshots;

  bool empty() const { return snapshots.empty(); }
  double t_begin() const { return snapshots.front().t; }
  double t_end() const { return snapshots.back().t; }
  /// Snapshot whose time is closest to t.
  const Snapshot& nearest(double t) const;
  /// Parabolic rescaling of every snapshot.
  Trajectory rescaled(double lambda) const;
};

}  // namespace netflow
