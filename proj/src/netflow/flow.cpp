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

#include "netflow/flow.hpp"

#include "netflow/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace netflow {

const char* to_string(StopKind kind) {
  switch (kind) {
    case StopKind::None: return "none";
    case StopKind::CurvatureBlowup: return "curvature-blowup";
    case StopKind::JunctionCollision: return "junction-collision";
    case StopKind::EmbeddednessLoss: return "embeddedness-loss";
    case StopKind::EdgeCollapse: return "edge-collapse";
    case StopKind::DensityExceedsZeta: return "density-exceeds-zeta";
  }
  return "unknown";
}

const Snapshot& Trajectory::nearest(double t) const {
  if (snapshots.empty()) fail("empty trajectory");
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                             [](const Snapshot& s, double v) { return s.t < v; });
  if (it == snapshots.end()) return snapshots.back();
  if (it == snapshots.begin()) return *it;
  auto prev = std::prev(it);
  return (t - prev->t) <= (it->t - t) ? *prev : *it;
}

Trajectory Trajectory::rescaled(double lambda) const {
  Trajectory out;
  for (const auto& s : snapshots) out.snapshots.push_back({lambda * lambda * s.t, scale_network(s.net, lambda)});
  return out;
}

FermatResult fermat_point(const std::array<Point, 3>& q) {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if ((q[static_cast<size_t>(i)] - q[static_cast<size_t>(j)]).squaredNorm() == 0.0)
        fail("junction projection: coincident neighbour nodes");

  FermatResult res;
  constexpr double kTwoThirdsPi = 2.0 * kPi / 3.0;
  for (int i = 0; i < 3; ++i) {
    const Vec a = q[static_cast<size_t>((i + 1) % 3)] - q[static_cast<size_t>(i)];
    const Vec b = q[static_cast<size_t>((i + 2) % 3)] - q[static_cast<size_t>(i)];
    if (angle_between(a, b) >= kTwoThirdsPi) {
      res.point = q[static_cast<size_t>(i)];
      res.degenerate = true;
      res.clamped_to = i;
      return res;
    }
  }

  // All angles below 120 degrees: the classical construction in the plane
  // of the triangle. The Fermat point lies on the line from each vertex to
  // the apex of the equilateral triangle erected outward on the opposite
  // side. Closed form, so no iteration can stall at a vertex.
  const Vec e1 = (q[1] - q[0]).normalized();
  Vec e2 = (q[2] - q[0]) - (q[2] - q[0]).dot(e1) * e1;
  e2.normalize();
  std::array<Eigen::Vector2d, 3> z;
  for (int i = 0; i < 3; ++i) {
    const Vec d = q[static_cast<size_t>(i)] - q[0];
    z[static_cast<size_t>(i)] = Eigen::Vector2d(d.dot(e1), d.dot(e2));
  }
  auto apex = [&](int opposite) {
    const Eigen::Vector2d& a = z[static_cast<size_t>(opposite)];
    const Eigen::Vector2d& b = z[static_cast<size_t>((opposite + 1) % 3)];
    const Eigen::Vector2d& c = z[static_cast<size_t>((opposite + 2) % 3)];
    const Eigen::Vector2d mid = 0.5 * (b + c);
    Eigen::Vector2d n(-(c - b)[1], (c - b)[0]);
    n.normalize();
    if (n.dot(a - mid) > 0.0) n = -n;
    return Eigen::Vector2d(mid + (std::sqrt(3.0) / 2.0) * (c - b).norm() * n);
  };
  const Eigen::Vector2d a0 = apex(0), a1 = apex(1);
  Eigen::Matrix2d M;
  M.col(0) = a0 - z[0];
  M.col(1) = -(a1 - z[1]);
  const Eigen::Vector2d su = M.colPivHouseholderQr().solve(z[1] - z[0]);
  const Eigen::Vector2d f = z[0] + su[0] * (a0 - z[0]);
  Vec p = q[0] + f[0] * e1 + f[1] * e2;
  res.point = p;
  return res;
}

void StepParams::check() const {
  if (!(cfl > 0.0 && cfl <= 0.5)) fail("cfl must lie in (0, 0.5]");
  if (!(target_h > 0.0)) fail("target_h must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) fail("omega must lie in [0, 1]");
  if (remesh_interval < 0) fail("remesh interval must be >= 0");
  if (!(dt_max > 0.0)) fail("dt_max must be positive");
}

FlowState make_state(Network net, double t0) {
  FlowState st;
  st.net = std::move(net);
  st.t = t0;
  return st;
}

FermatResult junction_project(const FlowState& state, int vertex) {
  const Network& net = state.net;
  const Vertex& v = net.vertices.at(static_cast<size_t>(vertex));
  if (v.valence() != 3) fail("junction projection needs a valence-3 vertex");
  std::array<Point, 3> q;
  for (size_t k = 0; k < 3; ++k) q[k] = net.neighbour_node(v.incident[k]);
  return fermat_point(q);
}

double adaptive_dt(const FlowState& state, const StepParams& params) {
  const double h = min_node_spacing(state.net);
  if (!(h > 0.0)) return 0.0;
  return std::min(params.cfl * h * h, params.dt_max);
}

namespace {

bool is_junction(const Network& net, int v) { return v >= 0 && net.vertices[static_cast<size_t>(v)].valence() == 3; }

StopKind collapse_kind(const Network& net, const Edge& e) {
  return (!e.closed && is_junction(net, e.v0) && is_junction(net, e.v1)) ? StopKind::JunctionCollision
                                                                         : StopKind::EdgeCollapse;
}

Point edge_centre(const Edge& e) {
  Vec c = zeros(static_cast<int>(e.nodes.front().size()));
  for (const auto& p : e.nodes) c += p;
  return c / static_cast<double>(e.nodes.size());
}

}  // namespace

int remesh(Network& net, double target_h) {
  const double lo = 0.5 * target_h;
  const double hi = 2.0 * target_h;
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    Edge& e = net.edges[ei];
    const int before = e.node_count();
    // Coarsen: drop an interior node of each short segment.
    std::vector<Point> kept;
    kept.reserve(e.nodes.size());
    const int n = e.node_count();
    if (e.closed) {
      kept.push_back(e.nodes.front());
      for (int i = 1; i < n; ++i)
        if ((e.nodes[static_cast<size_t>(i)] - kept.back()).norm() >= lo) kept.push_back(e.nodes[static_cast<size_t>(i)]);
      if (kept.size() > 1 && (e.nodes.front() - kept.back()).norm() < lo) kept.pop_back();
    } else {
      kept.push_back(e.nodes.front());
      for (int i = 1; i + 1 < n; ++i)
        if ((e.nodes[static_cast<size_t>(i)] - kept.back()).norm() >= lo) kept.push_back(e.nodes[static_cast<size_t>(i)]);
      // Last interior node too close to the far end.
      if (kept.size() > 1 && (e.nodes.back() - kept.back()).norm() < lo) kept.pop_back();
      kept.push_back(e.nodes.back());
    }
    // Refine: split long segments evenly.
    std::vector<Point> out;
    out.reserve(kept.size() * 2);
    const int m = static_cast<int>(kept.size());
    const int segs = e.closed ? m : m - 1;
    for (int s = 0; s < segs; ++s) {
      const Point& a = kept[static_cast<size_t>(s)];
      const Point& b = kept[static_cast<size_t>((s + 1) % m)];
      out.push_back(a);
      const double len = (b - a).norm();
      if (len > hi) {
        const int pieces = static_cast<int>(std::ceil(len / target_h));
        for (int k = 1; k < pieces; ++k) out.push_back(a + (static_cast<double>(k) / pieces) * (b - a));
      }
    }
    if (!e.closed) out.push_back(kept.back());
    e.nodes = std::move(out);
    if (e.node_count() < 3 && before >= 3) return static_cast<int>(ei);
  }
  return -1;
}

std::optional<StopEvent> step(FlowState& st, const StepParams& params, double dt) {
  Network& net = st.net;
  const int ne = static_cast<int>(net.edges.size());
  st.curvature.resize(static_cast<size_t>(ne));
  st.velocity.resize(static_cast<size_t>(ne));

  for (int ei = 0; ei < ne; ++ei) {
    const Edge& e = net.edges[static_cast<size_t>(ei)];
    const int n = e.node_count();
    auto& kap = st.curvature[static_cast<size_t>(ei)];
    auto& vel = st.velocity[static_cast<size_t>(ei)];
    kap.assign(static_cast<size_t>(n), zeros(net.dim));
    vel.assign(static_cast<size_t>(n), zeros(net.dim));
    for (int i = 0; i < n; ++i) {
      if (!e.is_interior(i)) continue;
      const Point& xm = e.nodes[static_cast<size_t>(e.closed ? (i + n - 1) % n : i - 1)];
      const Point& x = e.nodes[static_cast<size_t>(i)];
      const Point& xp = e.nodes[static_cast<size_t>(e.closed ? (i + 1) % n : i + 1)];
      const Vec k = curvature_vector(xm, x, xp);
      Vec v = k;
      if (params.omega > 0.0) {
        const Vec chord = xp - xm;
        const double cl = chord.norm();
        const double hbar = 0.5 * ((xp - x).norm() + (x - xm).norm());
        if (cl > 0.0) {
          const Vec tangent = chord / cl;
          const double tang = (xp + xm - 2.0 * x).dot(tangent) / (hbar * hbar);
          v += params.omega * tang * tangent;
        }
      }
      kap[static_cast<size_t>(i)] = k;
      vel[static_cast<size_t>(i)] = v;
    }
  }

  for (int ei = 0; ei < ne; ++ei) {
    Edge& e = net.edges[static_cast<size_t>(ei)];
    const auto& vel = st.velocity[static_cast<size_t>(ei)];
    for (int i = 0; i < e.node_count(); ++i)
      if (e.is_interior(i)) e.nodes[static_cast<size_t>(i)] += dt * vel[static_cast<size_t>(i)];
  }

  // Junctions see their already-moved neighbours; all are placed together.
  std::vector<std::pair<int, FermatResult>> placed;
  for (int vi = 0; vi < static_cast<int>(net.vertices.size()); ++vi) {
    if (net.vertices[static_cast<size_t>(vi)].valence() != 3) continue;
    FermatResult r = junction_project(st, vi);
    placed.emplace_back(vi, std::move(r));
  }
  for (auto& [vi, r] : placed) {
    const Point old = net.vertices[static_cast<size_t>(vi)].position;
    const Vec disp = r.point - old;
    net.set_vertex_position(vi, r.point);
    auto& vel = st.velocity;
    for (const auto& inc : net.vertices[static_cast<size_t>(vi)].incident) {
      auto& ve = vel[static_cast<size_t>(inc.edge)];
      ve[inc.end == EdgeEnd::Start ? 0 : ve.size() - 1] = disp / dt;
    }
  }
  // A clamped Fermat point sits on a neighbour node: merge it away.
  for (auto& [vi, r] : placed) {
    if (!r.degenerate) continue;
    const Incidence inc = net.vertices[static_cast<size_t>(vi)].incident[static_cast<size_t>(r.clamped_to)];
    Edge& e = net.edges[static_cast<size_t>(inc.edge)];
    if (e.node_count() >= 3) {
      const size_t idx = inc.end == EdgeEnd::Start ? 1 : e.nodes.size() - 2;
      e.nodes.erase(e.nodes.begin() + static_cast<long>(idx));
      st.curvature[static_cast<size_t>(inc.edge)].erase(st.curvature[static_cast<size_t>(inc.edge)].begin() +
                                                       static_cast<long>(idx));
      st.velocity[static_cast<size_t>(inc.edge)].erase(st.velocity[static_cast<size_t>(inc.edge)].begin() +
                                                      static_cast<long>(idx));
    }
    if (e.node_count() < 3) {
      st.t += dt;
      ++st.steps;
      return StopEvent{collapse_kind(net, e), st.t, net.vertices[static_cast<size_t>(vi)].position,
                       "degenerate junction merged edge " + std::to_string(e.id)};
    }
  }

  st.t += dt;
  ++st.steps;
  if (params.remesh_interval > 0 && st.steps % params.remesh_interval == 0) {
    const int collapsed = remesh(net, params.target_h);
    if (collapsed >= 0) {
      const Edge& e = net.edges[static_cast<size_t>(collapsed)];
      return StopEvent{collapse_kind(net, e), st.t, edge_centre(e),
                       "edge " + std::to_string(e.id) + " fell below three nodes"};
    }
  }
  return std::nullopt;
}

DiagnosticsRow diagnose(const Network& net, double t) {
  DiagnosticsRow row;
  row.t = t;
  row.length = net.total_length();
  row.sup_curvature = max_curvature(net);
  row.min_spacing = min_node_spacing(net);
  std::vector<int> js;
  for (int vi = 0; vi < static_cast<int>(net.vertices.size()); ++vi)
    if (net.vertices[static_cast<size_t>(vi)].valence() == 3) js.push_back(vi);
  for (size_t a = 0; a < js.size(); ++a) {
    for (size_t b = a + 1; b < js.size(); ++b)
      row.min_junction_distance =
          std::min(row.min_junction_distance, (net.vertices[static_cast<size_t>(js[a])].position -
                                               net.vertices[static_cast<size_t>(js[b])].position)
                                                  .norm());
    const JunctionInfo info = junction_info(net, js[a]);
    for (double ang : info.angles) row.angle_deviation = std::max(row.angle_deviation, std::abs(ang - 2.0 * kPi / 3.0));
  }
  return row;
}

namespace {

Point argmax_curvature(const Network& net) {
  double best = -1.0;
  Point where = zeros(net.dim);
  for (const auto& e : net.edges) {
    if (e.closed && e.node_count() < 3) continue;
    for (int i = 0; i < e.node_count(); ++i)
      if (e.is_interior(i)) {
        const double k = discrete_curvature(e, i).norm();
        if (k > best) {
          best = k;
          where = e.nodes[static_cast<size_t>(i)];
        }
      }
  }
  return where;
}

std::optional<StopEvent> check_monitors(const FlowState& st, const DiagnosticsRow& row, const StepParams& params,
                                        const Monitors& mon) {
  const Network& net = st.net;
  if (row.sup_curvature > mon.max_curvature)
    return StopEvent{StopKind::CurvatureBlowup, st.t, argmax_curvature(net),
                     "sup|A| = " + std::to_string(row.sup_curvature)};
  if (row.min_junction_distance < mon.collision_factor * params.target_h) {
    Point where = zeros(net.dim);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : net.vertices)
      for (const auto& b : net.vertices)
        if (&a != &b && a.valence() == 3 && b.valence() == 3) {
          const double d = (a.position - b.position).norm();
          if (d < best) {
            best = d;
            where = 0.5 * (a.position + b.position);
          }
        }
    return StopEvent{StopKind::JunctionCollision, st.t, where, "junction distance " + std::to_string(best)};
  }
  if (mon.check_embedding) {
    const double tau = mon.embed_rel * std::max(net.diameter(), 1e-300);
    std::optional<StopEvent> ev;
    for_each_close_segment_pair(net, tau, [&](int ea, int sa, int eb, int, double) {
      if (ev) return;
      ev = StopEvent{StopKind::EmbeddednessLoss, st.t, net.edges[static_cast<size_t>(ea)].nodes[static_cast<size_t>(sa)],
                     "edges " + std::to_string(net.edges[static_cast<size_t>(ea)].id) + " and " +
                         std::to_string(net.edges[static_cast<size_t>(eb)].id) + " touch"};
    });
    if (ev) return ev;
  }
  if (mon.density_monitor && st.steps % std::max(1, mon.density_interval) == 0) {
    const StaticDensityPeak peak = static_density_peak(net, 2.0 * params.target_h, 0.5 * net.diameter(), 8);
    if (peak.value > mon.zeta)
      return StopEvent{StopKind::DensityExceedsZeta, st.t, peak.centre, "density " + std::to_string(peak.value)};
  }
  return std::nullopt;
}

}  // namespace

RunResult run(FlowState state, double t_end, const StepParams& params, const Monitors& monitors,
              std::span<const double> snapshot_times) {
  params.check();
  if (!(t_end > state.t)) fail("run needs t_end > t0");
  std::vector<double> marks;
  for (double t : snapshot_times)
    if (t > state.t && t < t_end) marks.push_back(t);
  marks.push_back(t_end);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  RunResult res;
  res.trajectory.snapshots.push_back({state.t, state.net});
  res.diagnostics.push_back(diagnose(state.net, state.t));
  size_t next = 0;
  double length = res.diagnostics.back().length;

  while (next < marks.size()) {
    if (state.steps >= monitors.max_steps) {
      res.stop = StopEvent{StopKind::None, state.t, zeros(state.net.dim), "step budget exhausted"};
      break;
    }
    double dt = adaptive_dt(state, params);
    if (!(dt > 0.0)) {
      res.stop = StopEvent{StopKind::EdgeCollapse, state.t, zeros(state.net.dim), "zero node spacing"};
      break;
    }
    const double target = marks[next];
    bool hit = false;
    if (state.t + dt >= target) {
      dt = target - state.t;
      hit = true;
    }
    auto ev = step(state, params, dt);
    if (hit) state.t = target;
    if (ev) {
      ev->time = state.t;
      res.stop = ev;
      res.diagnostics.push_back(diagnose(state.net, state.t));
      break;
    }
    DiagnosticsRow row = diagnose(state.net, state.t);
    if (length > 0.0) res.max_length_increase = std::max(res.max_length_increase, (row.length - length) / length);
    length = row.length;
    res.diagnostics.push_back(row);
    if (auto mev = check_monitors(state, row, params, monitors)) {
      res.stop = mev;
      break;
    }
    if (hit) {
      res.trajectory.snapshots.push_back({state.t, state.net});
      ++next;
    }
  }
  if (res.trajectory.snapshots.back().t != state.t) res.trajectory.snapshots.push_back({state.t, state.net});
  res.final_state = std::move(state);
  return res;
}

}  // namespace netflow
