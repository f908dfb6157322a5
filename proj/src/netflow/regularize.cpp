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

#include "netflow/regularize.hpp"

#include "netflow/analysis.hpp"
#include "netflow/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace netflow {

std::vector<JunctionAngles> detect_nonregular(const Network& net, const Tolerances& tol) {
  std::vector<JunctionAngles> out;
  for (int v = 0; v < static_cast<int>(net.vertices.size()); ++v) {
    const Vertex& vx = net.vertices[static_cast<size_t>(v)];
    if (vx.valence() != 3) continue;
    const JunctionInfo info = junction_info(net, v, tol);
    JunctionAngles j;
    j.vertex = v;
    j.id = vx.id;
    j.position = vx.position;
    j.angles = info.angles;
    j.tangent_sum = info.tangent_sum;
    j.regular = info.regular;
    j.fatal = info.coincident;
    out.push_back(std::move(j));
  }
  return out;
}

int count_nonregular(const std::vector<JunctionAngles>& report) {
  return static_cast<int>(std::count_if(report.begin(), report.end(), [](const JunctionAngles& j) { return !j.regular; }));
}

const char* to_string(GlueMethod m) {
  return m == GlueMethod::ExpanderGlue ? "expander-glue" : "fermat-projection";
}

namespace {

double quintic(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

// Point on the polyline where the projection onto d first reaches rho,
// searching from node `from`; extrapolates along d past the last node.
Point at_projection(const std::vector<Point>& poly, const Point& p, const Vec& d, double rho, size_t from = 0) {
  for (size_t j = from; j + 1 < poly.size(); ++j) {
    const double a = (poly[j] - p).dot(d);
    const double b = (poly[j + 1] - p).dot(d);
    if (a <= rho && rho <= b && b > a) return poly[j] + (rho - a) / (b - a) * (poly[j + 1] - poly[j]);
  }
  const Point& last = poly.back();
  return last + (rho - (last - p).dot(d)) * d;
}

// Edge nodes ordered away from the vertex at incidence `inc`.
std::vector<Point> outward_nodes(const Network& net, const Incidence& inc) {
  std::vector<Point> nodes = net.edges[static_cast<size_t>(inc.edge)].nodes;
  if (inc.end == EdgeEnd::End) std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

void store_outward(Network& net, const Incidence& inc, std::vector<Point> nodes) {
  if (inc.end == EdgeEnd::End) std::reverse(nodes.begin(), nodes.end());
  net.edges[static_cast<size_t>(inc.edge)].nodes = std::move(nodes);
}

}  // namespace

Desingularisation desingularize(const Network& net, double s, const DesingularizeOptions& opt) {
  if (!(s > 0.0) || !std::isfinite(s)) fail("desingularisation scale must be positive");
  if (!(opt.expander_ratio > 0.0 && opt.expander_ratio <= 0.25)) fail("expander ratio must be in (0, 1/4]");
  if (opt.blend_nodes < 2) fail("at least two blend nodes are needed");

  std::vector<JunctionAngles> targets;
  for (auto& j : detect_nonregular(net, opt.tol)) {
    if (j.regular) continue;
    if (j.fatal) fail_domain("junction " + std::to_string(j.id) + " has coincident tangents");
    targets.push_back(std::move(j));
  }
  for (size_t a = 0; a < targets.size(); ++a)
    for (size_t b = a + 1; b < targets.size(); ++b)
      if ((targets[a].position - targets[b].position).norm() < 2.0 * s)
        fail("balls around junctions " + std::to_string(targets[a].id) + " and " + std::to_string(targets[b].id) +
             " overlap; reduce s");
  for (const auto& j : targets)
    for (int v = 0; v < static_cast<int>(net.vertices.size()); ++v)
      if (v != j.vertex && (net.vertices[static_cast<size_t>(v)].position - j.position).norm() <= s)
        fail("ball around junction " + std::to_string(j.id) + " contains vertex " +
             std::to_string(net.vertices[static_cast<size_t>(v)].id) + "; reduce s");

  Desingularisation out;
  out.scale = s;
  out.net = net;
  for (const auto& j : targets) {
    const Vertex& vx = net.vertices[static_cast<size_t>(j.vertex)];
    const Point& p = j.position;
    std::array<std::vector<Point>, 3> outward;
    std::array<size_t, 3> exit{};
    std::array<Vec, 3> dirs;
    const JunctionInfo info = junction_info(net, j.vertex, opt.tol);
    for (int k = 0; k < 3; ++k) {
      const Incidence& inc = vx.incident[static_cast<size_t>(k)];
      const Edge& e = net.edges[static_cast<size_t>(inc.edge)];
      if (e.v0 == e.v1) fail_domain("junction " + std::to_string(j.id) + " carries a loop edge");
      outward[static_cast<size_t>(k)] = outward_nodes(net, inc);
      const auto& nodes = outward[static_cast<size_t>(k)];
      size_t x = 1;
      while (x < nodes.size() && (nodes[x] - p).norm() < s) ++x;
      if (x >= nodes.size()) fail("edge " + std::to_string(e.id) + " ends inside B_s; reduce s");
      exit[static_cast<size_t>(k)] = x;
      dirs[static_cast<size_t>(k)] = info.tangents[static_cast<size_t>(k)];
    }

    GluedJunction glued;
    glued.vertex = j.vertex;
    glued.id = j.id;
    std::optional<ExpanderTriod> exp;
    try {
      exp = expander_triod(dirs, opt.expander_ratio * s);
    } catch (const Error& err) {
      if (err.code() != Error::Code::Domain) throw;
    }

    std::array<std::vector<Point>, 3> replaced;
    if (exp) {
      glued.method = GlueMethod::ExpanderGlue;
      glued.expander_scale = opt.expander_ratio * s;
      glued.direction_error = exp->max_direction_error;
      for (int a = 0; a < 3; ++a) {
        const int k = exp->order[static_cast<size_t>(a)];
        const Vec& d = dirs[static_cast<size_t>(k)];
        const auto& orig = outward[static_cast<size_t>(k)];
        const size_t x = exit[static_cast<size_t>(k)];
        std::vector<Point> arc;
        for (const auto& q : exp->net.edges[static_cast<size_t>(a)].nodes) arc.push_back(p + q);
        const double rho_end = (orig[x] - p).dot(d);
        if (!(rho_end > 0.5 * s))
          fail_domain("edge " + std::to_string(net.edges[static_cast<size_t>(vx.incident[static_cast<size_t>(k)].edge)].id) +
                      " is not a graph over its tangent inside B_s; reduce s");
        std::vector<Point> nodes;
        size_t j0 = 0;
        while (j0 < arc.size() && (arc[j0] - p).dot(d) < 0.5 * s) nodes.push_back(arc[j0++]);
        const size_t search_from = j0 > 0 ? j0 - 1 : 0;
        for (int m = 0; m < opt.blend_nodes; ++m) {
          const double u = static_cast<double>(m) / opt.blend_nodes;
          const double rho = 0.5 * s + u * (rho_end - 0.5 * s);
          const Point E = at_projection(arc, p, d, rho, search_from);
          const Point G = at_projection(std::vector<Point>(orig.begin(), orig.begin() + static_cast<long>(x) + 1), p, d, rho);
          nodes.push_back(E + quintic(u) * (G - E));
        }
        nodes.insert(nodes.end(), orig.begin() + static_cast<long>(x), orig.end());
        replaced[static_cast<size_t>(k)] = std::move(nodes);
      }
    } else {
      glued.method = GlueMethod::FermatProjection;
      std::array<Point, 3> q;
      for (int k = 0; k < 3; ++k) q[static_cast<size_t>(k)] = outward[static_cast<size_t>(k)][exit[static_cast<size_t>(k)]];
      const FermatResult f = fermat_point(q);
      if (f.degenerate) fail_domain("exit points of junction " + std::to_string(j.id) + " admit no regular Fermat point");
      for (int k = 0; k < 3; ++k) {
        const auto& orig = outward[static_cast<size_t>(k)];
        const size_t x = exit[static_cast<size_t>(k)];
        std::vector<Point> nodes;
        for (int m = 0; m < opt.blend_nodes; ++m)
          nodes.push_back(f.point + (static_cast<double>(m) / opt.blend_nodes) * (orig[x] - f.point));
        nodes.insert(nodes.end(), orig.begin() + static_cast<long>(x), orig.end());
        replaced[static_cast<size_t>(k)] = std::move(nodes);
      }
    }

    const Point glued_junction = replaced[0].front();
    for (int k = 0; k < 3; ++k) store_outward(out.net, vx.incident[static_cast<size_t>(k)], std::move(replaced[static_cast<size_t>(k)]));
    out.net.set_vertex_position(j.vertex, glued_junction);
    // The glued arcs leave the junction at 120 degrees only up to their
    // sampling; a final projection makes the discrete tangents balance.
    const Vertex& nv = out.net.vertices[static_cast<size_t>(j.vertex)];
    std::array<Point, 3> nb;
    for (int k = 0; k < 3; ++k) nb[static_cast<size_t>(k)] = out.net.neighbour_node(nv.incident[static_cast<size_t>(k)]);
    const FermatResult f = fermat_point(nb);
    if (!f.degenerate) out.net.set_vertex_position(j.vertex, f.point);
    out.junctions.push_back(glued);
  }
  out.c0_distance = targets.empty() ? 0.0 : hausdorff_distance(net, out.net);
  return out;
}

double sup_curvature_sqrt_t(std::span<const DiagnosticsRow> rows, double t0) {
  double best = 0.0;
  for (const auto& r : rows)
    if (r.t > t0) best = std::max(best, r.sup_curvature * std::sqrt(r.t - t0));
  return best;
}

bool ConvergenceReport::densities_ok() const {
  for (const auto& r : runs)
    if (r.density_inner_max >= 2.0 - density_epsilon || r.density_outer_max >= 1.5 - density_epsilon ||
        r.density_flow_max >= 2.0 - 0.5 * density_epsilon)
      return false;
  return true;
}

double ConvergenceReport::max_angle_deviation_after_window() const {
  double m = 0.0;
  for (const auto& r : runs) m = std::max(m, r.max_angle_deviation_after_window);
  return m;
}

namespace {

ScaleRun run_scale(const Network& net, const std::vector<Point>& centres, double s, double T, double t_window,
                   const ConvergenceOptions& opt) {
  ScaleRun sr;
  sr.s = s;
  sr.initial = desingularize(net, s, opt.desingularize);
  sr.run = run(make_state(sr.initial.net), T, opt.step, opt.monitors, opt.snapshot_times);
  const double t0 = sr.run.diagnostics.empty() ? 0.0 : sr.run.diagnostics.front().t;
  sr.sup_curvature_sqrt_t = sup_curvature_sqrt_t(sr.run.diagnostics, t0);
  for (const auto& row : sr.run.diagnostics)
    if (row.t - t0 >= t_window) sr.max_angle_deviation_after_window = std::max(sr.max_angle_deviation_after_window, row.angle_deviation);
  if (!sr.run.diagnostics.empty()) sr.final_angle_deviation = sr.run.diagnostics.back().angle_deviation;

  // Initial data: centres near each treated junction, scales sqrt(t), t <= tau.
  const double r_ball = opt.density_radius;
  const std::vector<double> scales = geometric_scales(std::min(s / 16.0, 0.5 * std::sqrt(opt.density_tau)),
                                                      std::sqrt(opt.density_tau), opt.density_scales);
  const Network& init = sr.initial.net;
  for (const auto& c : centres)
    for (const auto& e : init.edges)
      for (const auto& x : e.nodes) {
        const double d = (x - c).norm();
        if (d >= 2.0 * r_ball) continue;
        double peak = 0.0;
        for (double r : scales) peak = std::max(peak, gaussian_integral(init, x, r));
        if (d < r_ball)
          sr.density_inner_max = std::max(sr.density_inner_max, peak);
        else
          sr.density_outer_max = std::max(sr.density_outer_max, peak);
      }

  // Along the flow: exact ratios between snapshot pairs, centred at nodes
  // of the later snapshot inside B_r.
  const auto& snaps = sr.run.trajectory.snapshots;
  for (size_t b = 1; b < snaps.size(); ++b)
    for (size_t a = 0; a < b; ++a) {
      const double r = std::sqrt(snaps[b].t - snaps[a].t);
      if (!(r > 0.0)) continue;
      for (const auto& c : centres)
        for (const auto& e : snaps[b].net.edges)
          for (const auto& x : e.nodes)
            if ((x - c).norm() < r_ball)
              sr.density_flow_max = std::max(sr.density_flow_max, gaussian_integral(snaps[a].net, x, r));
    }
  return sr;
}

const Snapshot* at_time(const Trajectory& traj, double t) {
  for (const auto& s : traj.snapshots)
    if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return &s;
  return nullptr;
}

}  // namespace

ConvergenceReport convergence_experiment(const Network& net, const std::vector<double>& scales, double T,
                                         const ConvergenceOptions& opt) {
  if (scales.empty()) fail("convergence experiment needs at least one scale");
  for (double s : scales)
    if (!(s > 0.0)) fail("desingularisation scales must be positive");
  if (!(T > 0.0)) fail("final time must be positive");
  if (!(opt.density_epsilon > 0.0 && opt.density_epsilon < 0.5)) fail("density epsilon must be in (0, 0.5)");
  opt.step.check();

  ConvergenceReport rep;
  rep.T = T;
  rep.t_window = opt.t_window < 0.0 ? scales.front() * scales.front() : opt.t_window;
  rep.density_epsilon = opt.density_epsilon;

  std::vector<Point> centres;
  for (const auto& j : detect_nonregular(net, opt.desingularize.tol))
    if (!j.regular) centres.push_back(j.position);
  if (centres.empty())
    for (int v : net.junction_indices()) centres.push_back(net.vertices[static_cast<size_t>(v)].position);

  std::vector<std::future<ScaleRun>> futures;
  for (double s : scales)
    futures.push_back(std::async(opt.parallel ? std::launch::async : std::launch::deferred,
                                 [&, s] { return run_scale(net, centres, s, T, rep.t_window, opt); }));
  for (auto& f : futures) rep.runs.push_back(f.get());

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rep.runs) {
    lo = std::min(lo, r.sup_curvature_sqrt_t);
    hi = std::max(hi, r.sup_curvature_sqrt_t);
    if (r.run.stop && r.run.stop->kind != StopKind::None) rep.stopped_early = true;
  }
  rep.curvature_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;

  for (size_t i = 0; i + 1 < rep.runs.size(); ++i)
    for (double t : opt.snapshot_times) {
      const Snapshot* a = at_time(rep.runs[i].run.trajectory, t);
      const Snapshot* b = at_time(rep.runs[i + 1].run.trajectory, t);
      if (!a || !b) continue;
      rep.distances.push_back({rep.runs[i].s, rep.runs[i + 1].s, t, hausdorff_distance(a->net, b->net)});
    }
  return rep;
}

}  // namespace netflow
