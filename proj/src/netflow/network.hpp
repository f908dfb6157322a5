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

// Curve networks: embedded polylines in R^d whose ends meet at fixed
// boundary points (valence 1) or triple junctions (valence 3).

#pragma once

#include "netflow/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace netflow {

using Point = Vec;

struct SpacetimePoint {
  Point x;
  double t = 0.0;
};

enum class VertexKind { Fixed, Junction };
enum class EdgeEnd : unsigned char { Start, End };

struct Incidence {
  int edge = -1;
  EdgeEnd end = EdgeEnd::Start;
};

struct Vertex {
  int id = -1;
  VertexKind kind = VertexKind::Fixed;
  Point position;
  std::vector<Incidence> incident;

  int valence() const { return static_cast<int>(incident.size()); }
};

/// Polyline edge. Open edges store their endpoints as first/last node and
/// reference the vertices there; closed loops have no vertices and do not
/// repeat the first node.
struct Edge {
  int id = -1;
  std::vector<Point> nodes;
  int v0 = -1;
  int v1 = -1;
  bool closed = false;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int segment_count() const {
    const int n = node_count();
    return closed ? n : std::max(0, n - 1);
  }
  const Point& seg_a(int s) const { return nodes[static_cast<size_t>(s)]; }
  const Point& seg_b(int s) const {
    return nodes[static_cast<size_t>(closed ? (s + 1) % node_count() : s + 1)];
  }
  double length() const;
  bool is_interior(int i) const { return closed || (i > 0 && i + 1 < node_count()); }
};

/// Value type; vertices and edges are addressed by their index, `id` is the
/// user-facing label carried through files.
struct Network {
  int dim = 2;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  Network() = default;
  explicit Network(int d);

  int add_vertex(const Point& p, VertexKind kind, int id = -1);
  /// Endpoints of `nodes` are snapped onto the vertex positions.
  int add_edge(int v0, int v1, std::vector<Point> nodes, int id = -1);
  int add_loop(std::vector<Point> nodes, int id = -1);

  void rebuild_incidence();
  /// Moves a vertex and the coinciding end nodes of its incident edges.
  void set_vertex_position(int v, const Point& p);
  /// Node adjacent to the vertex end of an incident edge.
  const Point& neighbour_node(const Incidence& inc) const;

  double total_length() const;
  double diameter() const;
  int node_count() const;
  std::vector<int> junction_indices() const;
  int vertex_index(int id) const;
  int edge_index(int id) const;
};

struct Tolerances {
  double embed_rel = 1e-9;  // times network diameter
  double angle = 1e-3;      // radians
  double regular = 1e-6;    // |sum of unit tangents|
};

struct JunctionInfo {
  int vertex = -1;
  std::array<Point, 3> tangents;
  std::array<double, 3> angles{};  // between tangent pairs (0,1), (1,2), (2,0)
  double tangent_sum = 0.0;
  bool regular = false;
  bool coincident = false;
};

struct ValidationIssue {
  enum class Kind { NonFinite, DegenerateEdge, Valence, KindMismatch, CoincidentTangents, Embeddedness };
  Kind kind;
  std::string message;
  int edge_a = -1;
  int edge_b = -1;
  int vertex = -1;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<JunctionInfo> junctions;

  bool valid() const { return issues.empty(); }
  bool all_regular() const;
  bool has(ValidationIssue::Kind k) const;
  std::string summary() const;
};

/// Checks embeddedness, valence in {1,3}, distinct junction tangents and
/// junction regularity. `flow_valence` = false admits any valence >= 1.
ValidationReport validate(const Network& net, const Tolerances& tol = {}, bool flow_valence = true);

/// Unit tangents at a vertex, pointing into each incident edge.
JunctionInfo junction_info(const Network& net, int vertex, const Tolerances& tol = {});

/// D_lambda(x, t) = (lambda x, lambda^2 t).
SpacetimePoint parabolic_rescale(const SpacetimePoint& X, double lambda);
/// Spatial part of D_lambda applied to every node.
Network scale_network(const Network& net, double lambda);
Network transform_network(const Network& net, const Eigen::MatrixXd& rotation, const Vec& shift);

/// Three straight rays from the origin at mutual 120 degrees in the (e1,e2)
/// plane, rotated by `rotation` (d x d orthogonal). Outer ends are fixed.
Network make_y(int dim, const Eigen::MatrixXd& rotation, double ray_length, int nodes_per_ray);
Network make_y(int dim = 2, double ray_length = 1.0, int nodes_per_ray = 21);

/// Arclength-equidistributed copy with spacing close to target_h. Endpoints
/// (and node 0 of a loop) are kept bitwise. An open edge shorter than
/// target_h becomes a two-node segment.
Edge resample(const Edge& edge, double target_h);

/// 2 (u+ - u-) / (d+ + d-) from unit chords u+-, lengths d+-.
Vec curvature_vector(const Point& prev, const Point& x, const Point& next);
Vec discrete_curvature(const Edge& edge, int node);
/// max |k| over interior nodes of all edges.
double max_curvature(const Network& net);
double min_node_spacing(const Network& net);

/// Visits every pair of segments closer than `radius` that do not share a
/// node or a vertex. Callback gets (edge a, segment a, edge b, segment b, dist2).
void for_each_close_segment_pair(
    const Network& net, double radius,
    const std::function<void(int, int, int, int, double)>& visit);

/// Symmetric Hausdorff distance between the point sets of two networks,
/// sampled at nodes plus `samples_per_segment` interior points.
double hausdorff_distance(const Network& a, const Network& b, int samples_per_segment = 4);

/// Smallest distance from a point to the network.
double distance_to_network(const Network& net, const Point& p);

}  // namespace netflow
