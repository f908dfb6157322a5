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

// Elliptic regularisation of planar network flow. A planar network T0 is
// lifted to glued sheets in R^2 x [0, z_max] (one structured grid per edge,
// shared columns along junctions), the weighted area
//   I = (1/eps) * integral of exp(-z/eps) dA
// is minimised with the bottom row held at T0, and horizontal slices at
// height z approximate the flow at time eps * z.
//
// Vertex heights are fixed to their grid rows, so every row is a network
// with the topology of T0. Sheet vertices move along the horizontal normal
// of T0 at their column and junction vertices move freely in the plane;
// this removes the tangential sliding that leaves the energy unchanged.

#pragma once

#include "netflow/network.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace netflow {

struct OrientationAssignment {
  std::vector<int> sign;             // per edge, +1 keeps the stored direction
  std::vector<int> junction_colour;  // per vertex: 0 all-in, 1 all-out, -1 not a junction
  bool consistent = true;
  std::vector<int> witness;          // edge indices of an odd cycle when inconsistent
  std::string message;
};

/// Orients edges so that at each junction all incident edges point in or
/// all point out. Fails exactly when the junction graph has an odd cycle
/// (or an edge with both ends on one junction).
OrientationAssignment assign_orientation(const Network& net);

struct SurfaceOptions {
  double epsilon = 0.05;
  double z_max = 0.5;
  double target_h = 0.05;      // edge resampling; <= 0 keeps the input nodes
  int rows_per_epsilon = 4;    // dz <= epsilon / rows_per_epsilon
};

struct GluedSurface {
  Network base;  // T0 as sampled on the bottom row
  double epsilon = 0.05;
  double z_max = 0.5;
  int rows = 0;  // grid rows are z_j = j * dz, j = 0..rows
  double dz = 0.0;

  std::vector<Eigen::Vector3d> X;  // vertex positions
  std::vector<char> fixed;
  std::vector<int> vertex_row;
  std::vector<int> vertex_column;

  // A column is a stack of rows+1 vertices over one node of T0. Junction
  // columns are shared by three sheets.
  std::vector<std::vector<int>> columns;
  std::vector<int> column_junction;       // base vertex index, or -1
  // Horizontal unit direction a sheet column may move along; junction
  // columns move freely in the plane and carry a zero vector here.
  std::vector<Eigen::Vector2d> column_direction;
  std::vector<std::vector<int>> sheets;   // per base edge: its column sequence
  std::vector<int> vertex_column_of_base; // per base vertex: column, or -1

  std::vector<std::array<int, 3>> triangles;
  std::vector<double> triangle_weight;  // (1/eps) * mean of exp(-z/eps) over the row band
  std::vector<int> triangle_sheet;

  OrientationAssignment orientation;
  bool minimized = false;

  int vertex_count() const { return static_cast<int>(X.size()); }
  int free_count() const;
};

/// Product surface T0 x [0, z_max]. Rejects non-planar or non-orientable
/// networks, eps <= 0 and z_max < 5 eps.
GluedSurface build_initial_surface(const Network& net, const SurfaceOptions& opt);

struct TranslatorEnergy {
  double value = 0.0;
  std::vector<double> contributions;  // per triangle
};

TranslatorEnergy translator_energy(const GluedSurface& s);
double energy_value(const GluedSurface& s);

/// Gradient of the energy with respect to every vertex position (the z
/// components are reported but are not unknowns).
std::vector<Eigen::Vector3d> energy_gradient(const GluedSurface& s);

struct MinimizeOptions {
  int max_iterations = 5000;
  double rel_decrease = 1e-14;  // stop when a step lowers I by less than this, relative
  double gradient_tol = 1e-12;  // stop when the max free gradient component is below this
  int refactor_interval = 25;
};

struct MinimizeReport {
  std::vector<double> energy;  // before the first step and after each accepted step
  int iterations = 0;
  double gradient_norm = 0.0;  // max |free gradient component|
  double max_displacement = 0.0;
  bool converged = false;
  std::string reason;
};

/// L-BFGS preconditioned by the weighted cotangent Laplacian, with
/// Armijo backtracking. Throws if every trial step inverts a triangle.
MinimizeReport minimize(GluedSurface& s, const MinimizeOptions& opt = {});

/// Horizontal slice at height z, read from the bilinear quads. z = 0 and
/// heights in [2 eps, z_max - 2 eps] are admissible.
Network slice(const GluedSurface& s, double z);

struct TranslatorResidual {
  double max = 0.0;
  double rms = 0.0;
  int vertices = 0;
  bool minimized = false;
};

/// |H . n + (1/eps) e_z . n| at sheet vertices with 2 eps <= z <= z_max - 2 eps,
/// junction and fixed columns excluded; H is the cotangent mean curvature vector.
TranslatorResidual translator_residual(const GluedSurface& s);

struct RegularizedFlow {
  GluedSurface surface;
  MinimizeReport report;
  std::vector<double> times;
  std::vector<Network> slices;
};

/// Builds, minimises and slices at z = t / eps. z_max defaults to
/// max(10 eps, t_max / eps + 4 eps) when opt.z_max <= 0.
RegularizedFlow regularized_flow(const Network& net, const std::vector<double>& times, SurfaceOptions opt,
                                 const MinimizeOptions& mopt = {});

/// Checkpoint: vertex table (sheet, u index, z index, vertex id, x y z) and
/// the shared-column map.
void write_checkpoint(std::ostream& out, const GluedSurface& s);

}  // namespace netflow
