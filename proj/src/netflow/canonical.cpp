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

#include "netflow/canonical.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netflow {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// sign = +1 adds x^perp / (2t), -1 subtracts it.
NodeResidual self_similar_residual(const Network& net, double sign, double t) {
  NodeResidual out;
  out.per_node.resize(net.edges.size());
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    const Edge& e = net.edges[ei];
    const int n = e.node_count();
    auto& res = out.per_node[ei];
    res.assign(static_cast<size_t>(n), zeros(net.dim));
    for (int i = 0; i < n; ++i) {
      if (!e.is_interior(i)) continue;
      const Point& xm = e.nodes[static_cast<size_t>(e.closed ? (i + n - 1) % n : i - 1)];
      const Point& x = e.nodes[static_cast<size_t>(i)];
      const Point& xp = e.nodes[static_cast<size_t>(e.closed ? (i + 1) % n : i + 1)];
      const Vec chord = xp - xm;
      if (chord.norm() == 0.0) fail("self-similar residual: degenerate chord");
      const Vec T = chord / chord.norm();
      const Vec perp = x - x.dot(T) * T;
      const Vec r = curvature_vector(xm, x, xp) + sign * perp / (2.0 * t);
      res[static_cast<size_t>(i)] = r;
      out.max = std::max(out.max, r.norm());
    }
  }
  return out;
}

struct PlanarState {
  double x, y, theta;
};

// theta' = sign * (x . nu) / 2 with nu = (-sin, cos): -1 shrinker, +1 expander.
PlanarState rhs(const PlanarState& s, double sign) {
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  return {c, sn, sign * 0.5 * (-s.x * sn + s.y * c)};
}

PlanarState rk4(const PlanarState& s, double h, double sign) {
  auto add = [](const PlanarState& a, const PlanarState& k, double f) {
    return PlanarState{a.x + f * k.x, a.y + f * k.y, a.theta + f * k.theta};
  };
  const PlanarState k1 = rhs(s, sign);
  const PlanarState k2 = rhs(add(s, k1, 0.5 * h), sign);
  const PlanarState k3 = rhs(add(s, k2, 0.5 * h), sign);
  const PlanarState k4 = rhs(add(s, k3, h), sign);
  return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          s.theta + h / 6.0 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta)};
}

struct Arc {
  std::vector<PlanarState> samples;  // at arclength j * ds, last one possibly shorter
  std::vector<double> s;
};

// Expander arc from p with initial heading theta0 until |x| >= radius.
Arc expander_arc(double px, double py, double theta0, double radius, double ds) {
  Arc arc;
  PlanarState st{px, py, theta0};
  double s = 0.0;
  arc.samples.push_back(st);
  arc.s.push_back(0.0);
  const double max_len = 10.0 * radius + 10.0;
  while (std::hypot(st.x, st.y) < radius && s < max_len) {
    st = rk4(st, ds, 1.0);
    s += ds;
    arc.samples.push_back(st);
    arc.s.push_back(s);
  }
  return arc;
}

}  // namespace

NodeResidual shrinker_residual(const Network& curve) { return self_similar_residual(curve, 1.0, 1.0); }

NodeResidual expander_residual(const Network& curve, double t) {
  if (!(t > 0.0)) fail("expander residual needs t > 0");
  return self_similar_residual(curve, -1.0, t);
}

ShrinkerShot shoot_shrinker(const Point& start, double theta0, double max_length, double ds, double close_tol) {
  if (start.size() != 2) fail("shrinker shooting is planar");
  if (!(ds > 0.0) || !(max_length > ds)) fail("shrinker shooting needs 0 < ds < max_length");
  ShrinkerShot shot;
  PlanarState st{start[0], start[1], theta0};
  shot.nodes.push_back(start);
  double s = 0.0;
  while (s < max_length) {
    const PlanarState nx = rk4(st, ds, -1.0);
    s += ds;
    const Point a = vec2(st.x, st.y);
    const Point b = vec2(nx.x, nx.y);
    if (s > 16.0 * ds) {
      double frac = 0.0;
      const double gap = std::sqrt(point_segment_dist2(start, a, b, &frac));
      const double heading = wrap_angle(st.theta + frac * (nx.theta - st.theta) - theta0);
      if (gap < std::max(close_tol, 1e-14) && std::abs(heading) < 1e-4) {
        shot.closed = true;
        shot.closure_error = gap;
        shot.length = s - ds + frac * ds;
        if (frac > 0.5) shot.nodes.push_back(b);
        // The closing node duplicates the start.
        if (shot.nodes.size() > 1 && (shot.nodes.back() - start).norm() < 0.5 * ds) shot.nodes.pop_back();
        return shot;
      }
    }
    st = nx;
    shot.nodes.push_back(vec2(st.x, st.y));
  }
  shot.length = s;
  return shot;
}

ExpanderTriod expander_triod(const std::array<Vec, 3>& directions, double scale, const ExpanderOptions& opt) {
  if (!(scale > 0.0)) fail("expander scale must be positive");
  const int dim = static_cast<int>(directions[0].size());
  std::array<Vec, 3> d;
  for (int i = 0; i < 3; ++i) {
    if (directions[static_cast<size_t>(i)].size() != dim || !(directions[static_cast<size_t>(i)].norm() > 0.0))
      fail("expander directions must be nonzero and of equal dimension");
    d[static_cast<size_t>(i)] = directions[static_cast<size_t>(i)].normalized();
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (angle_between(d[static_cast<size_t>(i)], d[static_cast<size_t>(j)]) < 1e-3)
        fail("expander directions must be pairwise distinct");

  ExpanderTriod out;
  Vec e1 = d[0];
  Vec e2 = d[1] - d[1].dot(e1) * e1;
  if (e2.norm() < 1e-6) e2 = d[2] - d[2].dot(e1) * e1;
  if (e2.norm() < 1e-6) fail("expander directions are collinear");
  e2.normalize();
  for (const auto& di : d)
    if ((di - di.dot(e1) * e1 - di.dot(e2) * e2).norm() > 1e-9) fail_domain("expander directions are not coplanar");
  out.plane = {e1, e2, zeros(dim)};

  std::array<double, 3> alpha{};
  for (int i = 0; i < 3; ++i) alpha[static_cast<size_t>(i)] = std::atan2(d[static_cast<size_t>(i)].dot(e2), d[static_cast<size_t>(i)].dot(e1));
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return alpha[static_cast<size_t>(a)] < alpha[static_cast<size_t>(b)]; });
  out.order = order;
  std::array<double, 3> target{};
  for (int k = 0; k < 3; ++k) target[static_cast<size_t>(k)] = alpha[static_cast<size_t>(order[static_cast<size_t>(k)])];

  const double third = 2.0 * kPi / 3.0;
  double phi0 = 0.0;
  for (int k = 0; k < 3; ++k) phi0 += wrap_angle(target[static_cast<size_t>(k)] - third * k - target[0]);
  phi0 = target[0] + phi0 / 3.0;

  auto residual = [&](const Eigen::Vector3d& u) {
    Eigen::Vector3d F;
    for (int k = 0; k < 3; ++k) {
      const Arc arc = expander_arc(u[0], u[1], u[2] + third * k, opt.radius, opt.ds);
      const PlanarState& end = arc.samples.back();
      F[k] = wrap_angle(end.theta - target[static_cast<size_t>(k)]);
    }
    return F;
  };

  Eigen::Vector3d u(0.0, 0.0, phi0);
  Eigen::Vector3d F = residual(u);
  int it = 0;
  for (; it < opt.max_iterations && F.cwiseAbs().maxCoeff() > opt.tolerance; ++it) {
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-6;
      Eigen::Vector3d up = u, um = u;
      up[j] += h;
      um[j] -= h;
      J.col(j) = (residual(up) - residual(um)) / (2.0 * h);
    }
    const Eigen::Vector3d delta = J.fullPivLu().solve(-F);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::Vector3d trial = u + step * delta;
      const Eigen::Vector3d Ft = residual(trial);
      if (Ft.norm() < F.norm()) {
        u = trial;
        F = Ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  out.iterations = it;
  for (int k = 0; k < 3; ++k) {
    out.direction_error[static_cast<size_t>(order[static_cast<size_t>(k)])] = std::abs(F[k]);
    out.max_direction_error = std::max(out.max_direction_error, std::abs(F[k]));
  }
  if (!(out.max_direction_error < 1e-6))
    throw Error(Error::Code::Domain, "expander shooting did not converge (direction error " +
                                         std::to_string(out.max_direction_error) + ")");

  auto embed = [&](double a, double b) {
    Vec p = scale * (a * e1 + b * e2);
    return p;
  };
  out.rotation = u[2];
  out.junction = embed(u[0], u[1]);

  Network net(dim);
  const int j = net.add_vertex(out.junction, VertexKind::Junction, 0);
  const int n = std::max(3, opt.nodes_per_arc);
  for (int k = 0; k < 3; ++k) {
    const Arc arc = expander_arc(u[0], u[1], u[2] + third * k, opt.radius, opt.ds);
    const double L = arc.s.back();
    std::vector<Point> nodes;
    size_t seg = 0;
    for (int i = 0; i < n; ++i) {
      const double s = L * i / (n - 1);
      while (seg + 2 < arc.s.size() && arc.s[seg + 1] < s) ++seg;
      const double w = std::clamp((s - arc.s[seg]) / (arc.s[seg + 1] - arc.s[seg]), 0.0, 1.0);
      const PlanarState& a = arc.samples[seg];
      const PlanarState& b = arc.samples[seg + 1];
      nodes.push_back(embed(a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)));
    }
    const int v = net.add_vertex(nodes.back(), VertexKind::Fixed, k + 1);
    net.add_edge(j, v, std::move(nodes), k);
  }
  out.net = std::move(net);
  return out;
}

double circle_radius(double R0, double t) {
  if (!(R0 > 0.0)) fail("circle radius must be positive");
  const double r2 = R0 * R0 - 2.0 * t;
  if (!(r2 > 0.0)) fail_domain("circle is extinct at t = " + std::to_string(t));
  return std::sqrt(r2);
}

Network exact_circle(double R0, double t, int nodes, const Point* centre) {
  if (nodes < 3) fail("circle needs at least 3 nodes");
  const double R = circle_radius(R0, t);
  const int dim = centre ? static_cast<int>(centre->size()) : 2;
  if (dim < 2 || dim > kMaxDim) fail("circle centre has an unsupported dimension");
  Network net(dim);
  std::vector<Point> pts;
  for (int i = 0; i < nodes; ++i) {
    const double a = 2.0 * kPi * i / nodes;
    Vec p = centre ? Vec(*centre) : zeros(dim);
    p[0] += R * std::cos(a);
    p[1] += R * std::sin(a);
    pts.push_back(p);
  }
  net.add_loop(std::move(pts), 0);
  return net;
}

double BarrierBall::radius(double t) const {
  const double r2 = R0 * R0 - 2.0 * t;
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

BarrierResult barrier_check(const Trajectory& traj, const BarrierBall& ball, double c) {
  if (traj.empty()) fail("barrier check over an empty trajectory");
  if (!(ball.R0 > 0.0)) fail("barrier radius must be positive");
  if (distance_to_network(traj.snapshots.front().net, ball.centre) < ball.R0)
    fail_domain("initial network meets the barrier ball");
  BarrierResult res;
  const double t0 = traj.t_begin();
  for (const auto& snap : traj.snapshots) {
    ++res.snapshots_checked;
    const double R = ball.radius(snap.t - t0);
    if (R == 0.0) continue;
    double h = 0.0;
    for (const auto& e : snap.net.edges)
      for (int s = 0; s < e.segment_count(); ++s) h = std::max(h, (e.seg_b(s) - e.seg_a(s)).norm());
    const double tol = c * h * h / R;
    const double dist = distance_to_network(snap.net, ball.centre);
    const double margin = dist - R + tol;
    res.min_margin = std::min(res.min_margin, margin);
    if (margin < 0.0 && !res.first_violation) {
      res.pass = false;
      res.first_violation = BarrierViolation{snap.t, dist, R, tol};
    }
  }
  return res;
}

}  // namespace netflow
