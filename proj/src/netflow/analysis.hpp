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

// Gaussian density ratios, entropy, density classification, sphere
// parity counts and regularity monitors over trajectories.

#pragma once

#include "netflow/flow.hpp"
#include "netflow/trajectory.hpp"

#include <span>
#include <string>
#include <vector>

namespace netflow {

/// Backwards heat kernel of a curve flow: (4 pi tau)^{-1/2} exp(-|y-x|^2 / (4 tau)).
double heat_kernel(const Point& y, const Point& x, double tau);

/// Exact integral of the heat kernel with tau = r^2 over every segment of
/// the polyline network (closed form via erf).
double gaussian_integral(const Network& slice, const Point& x, double r);

struct DensityRatio {
  double value = 0.0;
  double snapshot_time = 0.0;
  double time_error = 0.0;  // |snapshot time - (t - r^2)|
};

/// Theta(X, r): the kernel centred at X = (x, t) integrated over the
/// snapshot nearest to time t - r^2.
DensityRatio gaussian_density_ratio(const Trajectory& traj, const SpacetimePoint& X, double r);

enum class DensityLabel { Regular, Triple, AboveZeta, Above2, Unclassified };

const char* to_string(DensityLabel label);

struct Thresholds {
  double zeta = 1.51;
  double delta = 0.02;

  void check() const;
};

/// Precedence: above-2, above-zeta, triple, regular; values in the gaps
/// between the bands are unclassified.
DensityLabel classify(double theta, const Thresholds& th = {});

struct DensityReport {
  SpacetimePoint centre;
  std::vector<double> scales;
  std::vector<double> ratios;
  std::vector<double> time_errors;
  std::vector<DensityLabel> labels;
  DensityLabel classification = DensityLabel::Unclassified;  // of the smallest scale
  Thresholds thresholds;
  double max_monotonicity_violation = 0.0;  // max over consecutive scales of Theta(r_i) - Theta(r_{i+1})
};

DensityReport density_report(const Trajectory& traj, const SpacetimePoint& X, std::span<const double> scales,
                             const Thresholds& th = {});

/// Times t - r_i^2 for a geometric ladder of scales, sorted ascending. Used
/// to request the snapshot history a density report needs.
std::vector<double> density_history_times(double t, double r_min, double r_max, int count);
std::vector<double> geometric_scales(double r_min, double r_max, int count);

struct StaticDensityPeak {
  double value = 0.0;
  Point centre;
  double scale = 0.0;
};

/// sup of gaussian_integral over centres at nodes/vertices and a geometric
/// ladder of scales.
StaticDensityPeak static_density_peak(const Network& net, double r_min, double r_max, int n_scales);

struct EntropyEstimate {
  double value = 0.0;
  Point centre;
  double scale = 0.0;
  // Grid used; the estimate is a lower bound on the true entropy.
  int centres = 0;
  int scales = 0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Lower bound on the entropy of the static network: sup over centres
/// (nodes, vertices, a lattice over the bounding box) and scales
/// r in [h, 4 diam], followed by a local pattern search around the best.
EntropyEstimate entropy_estimate(const Network& net, int n_scales = 48, int lattice = 17);

struct ParityResult {
  int count = 0;
  bool even = true;
  bool triple_candidate = false;
  int enclosed_vertices = 0;
  int enclosed_odd_valence = 0;  // the count is even iff this is even
};

/// Raised when the sphere is not transversal to the network.
class NonTransversal : public Error {
 public:
  NonTransversal(const std::string& what, Vec shift)
      : Error(Code::Domain, what), suggested_shift(std::move(shift)) {}
  Vec suggested_shift;
};

/// Transversal crossings of the sphere |y - centre| = radius with the
/// network (a circle in the plane). Rejects tangencies, nodes on the sphere
/// and vertices closer than the embedding tolerance.
ParityResult disk_parity(const Network& net, const Point& centre, double radius, const Tolerances& tol = {});

struct RegularityScale {
  double r = 0.0;
  bool history_capped = false;
};

/// Largest dyadic r <= r_max such that every snapshot in the backwards
/// cylinder B_r(x) x [t - r^2, t] has at most one junction in the ball and
/// curvature at most 1/r there. r_max <= 0 means 4 * diameter.
RegularityScale regularity_scale(const Trajectory& traj, const SpacetimePoint& X, double r_max = 0.0);

struct CurvatureBoundReport {
  std::vector<double> t;
  std::vector<double> value;  // sup|A| * sqrt(t - t0)
  double max = 0.0;
  double value_at_window = 0.0;
  double max_after_window = 0.0;
  bool nonincreasing_after_window = true;
};

CurvatureBoundReport monitor_curvature_bound(std::span<const DiagnosticsRow> rows, double t_window);
CurvatureBoundReport monitor_curvature_bound(const Trajectory& traj, double t_window);

}  // namespace netflow
