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

#include "netflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace netflow {

namespace {

// erf(b) - erf(a) for a <= b without cancellation in the tails.
double erf_diff(double a, double b) {
  if (a >= 0.0) return std::erfc(a) - std::erfc(b);
  if (b <= 0.0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

// Kernel integral over one segment; exact for a straight segment.
double segment_integral(const Point& a, const Point& b, const Point& x, double r) {
  const Vec ab = b - a;
  const double len = ab.norm();
  if (len == 0.0) return 0.0;
  const Vec u = ab / len;
  const Vec ax = a - x;
  const double s0 = ax.dot(u);
  const double perp2 = (ax - s0 * u).squaredNorm();
  const double inv = 1.0 / (2.0 * r);
  return 0.5 * std::exp(-perp2 * inv * inv) * erf_diff(s0 * inv, (s0 + len) * inv);
}

void check_scale(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) fail("density scale must be positive and finite");
}

struct Box {
  Vec lo, hi;
};

Box bounding_box(const Network& net) {
  Box b{Vec::Constant(net.dim, std::numeric_limits<double>::infinity()),
        Vec::Constant(net.dim, -std::numeric_limits<double>::infinity())};
  for (const auto& e : net.edges)
    for (const auto& p : e.nodes) {
      b.lo = b.lo.cwiseMin(p);
      b.hi = b.hi.cwiseMax(p);
    }
  for (const auto& v : net.vertices) {
    b.lo = b.lo.cwiseMin(v.position);
    b.hi = b.hi.cwiseMax(v.position);
  }
  return b;
}

std::vector<Point> basic_centres(const Network& net) {
  std::vector<Point> c;
  for (const auto& v : net.vertices) c.push_back(v.position);
  for (const auto& e : net.edges) {
    for (int i = 0; i < e.node_count(); ++i)
      if (e.is_interior(i)) c.push_back(e.nodes[static_cast<size_t>(i)]);
    if (e.closed) {
      Vec m = zeros(net.dim);
      for (const auto& p : e.nodes) m += p;
      c.push_back(m / static_cast<double>(e.node_count()));
    }
  }
  if (!net.edges.empty()) {
    const Box b = bounding_box(net);
    c.push_back(0.5 * (b.lo + b.hi));
  }
  return c;
}

}  // namespace

double heat_kernel(const Point& y, const Point& x, double tau) {
  if (!(tau > 0.0)) fail("heat kernel needs tau > 0");
  return std::exp(-(y - x).squaredNorm() / (4.0 * tau)) / std::sqrt(4.0 * kPi * tau);
}

double gaussian_integral(const Network& slice, const Point& x, double r) {
  check_scale(r);
  if (x.size() != slice.dim) fail("density centre has the wrong dimension");
  double sum = 0.0;
  for (const auto& e : slice.edges)
    for (int s = 0; s < e.segment_count(); ++s) sum += segment_integral(e.seg_a(s), e.seg_b(s), x, r);
  return sum;
}

DensityRatio gaussian_density_ratio(const Trajectory& traj, const SpacetimePoint& X, double r) {
  check_scale(r);
  if (traj.empty()) fail("density ratio over an empty trajectory");
  const double when = X.t - r * r;
  const double slack = 1e-12 * std::max(1.0, std::abs(X.t));
  if (when < traj.t_begin() - slack)
    fail_domain("r^2 = " + std::to_string(r * r) + " exceeds the available history before t = " + std::to_string(X.t));
  const Snapshot& snap = traj.nearest(when);
  DensityRatio out;
  out.value = gaussian_integral(snap.net, X.x, r);
  out.snapshot_time = snap.t;
  out.time_error = std::abs(snap.t - when);
  return out;
}

const char* to_string(DensityLabel label) {
  switch (label) {
    case DensityLabel::Regular: return "regular";
    case DensityLabel::Triple: return "triple";
    case DensityLabel::AboveZeta: return "above-zeta";
    case DensityLabel::Above2: return "above-2";
    case DensityLabel::Unclassified: return "unclassified";
  }
  return "unknown";
}

void Thresholds::check() const {
  if (!(zeta > 1.5 && zeta < std::sqrt(2.0 * kPi / std::exp(1.0))))
    fail("zeta must lie strictly between 3/2 and the circle density");
  if (!(delta > 0.0 && delta < 0.25)) fail("delta must lie in (0, 0.25)");
}

DensityLabel classify(double theta, const Thresholds& th) {
  if (theta >= 2.0 - th.delta) return DensityLabel::Above2;
  if (theta > th.zeta) return DensityLabel::AboveZeta;
  if (std::abs(theta - 1.5) < th.delta) return DensityLabel::Triple;
  if (theta < 1.0 + th.delta) return DensityLabel::Regular;
  return DensityLabel::Unclassified;
}

DensityReport density_report(const Trajectory& traj, const SpacetimePoint& X, std::span<const double> scales,
                             const Thresholds& th) {
  if (scales.empty()) fail("density report needs at least one scale");
  for (size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] > scales[i - 1])) fail("density scales must be strictly increasing");
  DensityReport rep;
  rep.centre = X;
  rep.thresholds = th;
  for (double r : scales) {
    const DensityRatio d = gaussian_density_ratio(traj, X, r);
    rep.scales.push_back(r);
    rep.ratios.push_back(d.value);
    rep.time_errors.push_back(d.time_error);
    rep.labels.push_back(classify(d.value, th));
  }
  rep.classification = rep.labels.front();
  for (size_t i = 1; i < rep.ratios.size(); ++i)
    rep.max_monotonicity_violation = std::max(rep.max_monotonicity_violation, rep.ratios[i - 1] - rep.ratios[i]);
  return rep;
}

std::vector<double> geometric_scales(double r_min, double r_max, int count) {
  if (!(r_min > 0.0 && r_max >= r_min) || count < 1) fail("geometric scales need 0 < r_min <= r_max, count >= 1");
  std::vector<double> r;
  if (count == 1) return {r_min};
  const double q = std::log(r_max / r_min) / (count - 1);
  for (int i = 0; i < count; ++i) r.push_back(i + 1 == count ? r_max : r_min * std::exp(q * i));
  return r;
}

std::vector<double> density_history_times(double t, double r_min, double r_max, int count) {
  std::vector<double> out;
  for (double r : geometric_scales(r_min, r_max, count)) out.push_back(t - r * r);
  std::sort(out.begin(), out.end());
  return out;
}

StaticDensityPeak static_density_peak(const Network& net, double r_min, double r_max, int n_scales) {
  StaticDensityPeak best;
  best.centre = zeros(net.dim);
  const auto scales = geometric_scales(r_min, std::max(r_min, r_max), n_scales);
  for (const auto& c : basic_centres(net))
    for (double r : scales) {
      const double v = gaussian_integral(net, c, r);
      if (v > best.value) best = {v, c, r};
    }
  return best;
}

EntropyEstimate entropy_estimate(const Network& net, int n_scales, int lattice) {
  EntropyEstimate est;
  est.centre = zeros(net.dim);
  if (net.edges.empty()) return est;
  if (n_scales < 2) fail("entropy estimate needs at least two scales");
  const double diam = net.diameter();
  double h = min_node_spacing(net);
  if (!(h > 0.0)) h = 1e-3 * diam;
  est.r_min = h;
  est.r_max = std::max(h, 4.0 * diam);
  const auto scales = geometric_scales(est.r_min, est.r_max, n_scales);
  est.scales = n_scales;

  std::vector<Point> centres = basic_centres(net);
  if (net.dim <= 3 && lattice > 1) {
    const int m = lattice | 1;  // odd, so the box centre is a lattice point
    const Box b = bounding_box(net);
    const int total = net.dim == 2 ? m * m : m * m * m;
    for (int idx = 0; idx < total; ++idx) {
      Vec p = zeros(net.dim);
      int rest = idx;
      for (int k = 0; k < net.dim; ++k) {
        p[k] = b.lo[k] + (b.hi[k] - b.lo[k]) * (rest % m) / (m - 1);
        rest /= m;
      }
      centres.push_back(p);
    }
  }
  est.centres = static_cast<int>(centres.size());

  for (const auto& c : centres)
    for (double r : scales) {
      const double v = gaussian_integral(net, c, r);
      if (v > est.value) {
        est.value = v;
        est.centre = c;
        est.scale = r;
      }
    }

  // Compass search in (centre, log r).
  double step = 0.25 * std::max(h, 0.05 * diam);
  double lstep = 0.25;
  Point c = est.centre;
  double logr = std::log(est.scale);
  while (step > 1e-9 * diam || lstep > 1e-9) {
    bool improved = false;
    for (int k = 0; k <= net.dim; ++k)
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        Point cc = c;
        double lr = logr;
        if (k < net.dim)
          cc[k] += sgn * step;
        else
          lr += sgn * lstep;
        lr = std::clamp(lr, std::log(est.r_min), std::log(est.r_max));
        const double v = gaussian_integral(net, cc, std::exp(lr));
        if (v > est.value) {
          est.value = v;
          c = cc;
          logr = lr;
          improved = true;
        }
      }
    if (!improved) {
      step *= 0.5;
      lstep *= 0.5;
    }
  }
  est.centre = c;
  est.scale = std::exp(logr);
  return est;
}

ParityResult disk_parity(const Network& net, const Point& centre, double radius, const Tolerances& tol) {
  if (centre.size() != net.dim) fail("parity centre has the wrong dimension");
  if (!(radius > 0.0)) fail("parity radius must be positive");
  const double tau = std::max(tol.embed_rel * net.diameter(), 1e-12 * (radius + centre.norm()));
  const double min_sin = std::sin(tol.angle);

  auto reject = [&](const std::string& why) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<unsigned long long>(net.node_count()));
    std::normal_distribution<double> g;
    Vec v = zeros(net.dim);
    for (int k = 0; k < net.dim; ++k) v[k] = g(rng);
    v *= 1e-2 * radius / v.norm();
    throw NonTransversal("sphere not transversal: " + why, v);
  };

  ParityResult res;
  for (const auto& v : net.vertices) {
    const double d = (v.position - centre).norm();
    if (std::abs(d - radius) <= tau) reject("vertex " + std::to_string(v.id) + " on the sphere");
    if (d < radius) {
      ++res.enclosed_vertices;
      if (v.valence() % 2 == 1) ++res.enclosed_odd_valence;
    }
  }
  for (const auto& e : net.edges) {
    for (const auto& p : e.nodes)
      if (std::abs((p - centre).norm() - radius) <= tau) reject("node of edge " + std::to_string(e.id) + " on the sphere");
    for (int s = 0; s < e.segment_count(); ++s) {
      const Point& a = e.seg_a(s);
      const Vec ab = e.seg_b(s) - a;
      const Vec ac = a - centre;
      const double A = ab.squaredNorm();
      if (A == 0.0) continue;
      const double B = 2.0 * ac.dot(ab);
      const double C = ac.squaredNorm() - radius * radius;
      const double disc = B * B - 4.0 * A * C;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      // Numerically stable pair of roots.
      const double qv = -0.5 * (B + std::copysign(sq, B));
      double roots[2] = {qv / A, qv != 0.0 ? C / qv : qv / A};
      if (disc == 0.0) roots[1] = -1.0;
      for (double s0 : roots) {
        if (s0 < 0.0 || s0 >= 1.0) continue;
        const Vec y = a + s0 * ab;
        const double cosn = std::abs(ab.dot(y - centre)) / (std::sqrt(A) * radius);
        if (cosn < min_sin) reject("tangential crossing on edge " + std::to_string(e.id));
        ++res.count;
      }
    }
  }
  res.even = res.count % 2 == 0;
  res.triple_candidate = res.count == 3;
  return res;
}

RegularityScale regularity_scale(const Trajectory& traj, const SpacetimePoint& X, double r_max) {
  if (traj.empty()) fail("regularity scale over an empty trajectory");
  RegularityScale out;
  const Network& now = traj.nearest(X.t).net;
  double cap = r_max > 0.0 ? r_max : 4.0 * now.diameter();
  const double history = std::sqrt(std::max(0.0, X.t - traj.t_begin()));
  if (history < cap) {
    cap = history;
    out.history_capped = true;
  }
  if (!(cap > 0.0)) return out;

  auto admissible = [&](double r) {
    std::vector<const Snapshot*> snaps;
    for (const auto& s : traj.snapshots)
      if (s.t >= X.t - r * r && s.t <= X.t) snaps.push_back(&s);
    if (snaps.empty()) snaps.push_back(&traj.nearest(X.t));
    for (const Snapshot* s : snaps) {
      const Network& net = s->net;
      int junctions = 0;
      for (const auto& v : net.vertices)
        if (v.valence() == 3 && (v.position - X.x).norm() < r) ++junctions;
      if (junctions > 1) return false;
      for (const auto& e : net.edges)
        for (int i = 0; i < e.node_count(); ++i)
          if (e.is_interior(i) && (e.nodes[static_cast<size_t>(i)] - X.x).norm() < r &&
              discrete_curvature(e, i).norm() > 1.0 / r)
            return false;
    }
    return true;
  };

  for (double r = cap; r > 1e-12 * cap; r *= 0.5)
    if (admissible(r)) {
      out.r = r;
      return out;
    }
  return out;
}

CurvatureBoundReport monitor_curvature_bound(std::span<const DiagnosticsRow> rows, double t_window) {
  CurvatureBoundReport rep;
  if (rows.empty()) return rep;
  const double t0 = rows.front().t;
  bool at_window = false;
  double prev = 0.0;
  for (const auto& row : rows) {
    const double v = row.sup_curvature * std::sqrt(std::max(0.0, row.t - t0));
    rep.t.push_back(row.t);
    rep.value.push_back(v);
    rep.max = std::max(rep.max, v);
    if (row.t - t0 >= t_window) {
      if (!at_window) {
        rep.value_at_window = v;
        at_window = true;
      } else if (v > prev * (1.0 + 1e-9) + 1e-300) {
        rep.nonincreasing_after_window = false;
      }
      rep.max_after_window = std::max(rep.max_after_window, v);
      prev = v;
    }
  }
  return rep;
}

CurvatureBoundReport monitor_curvature_bound(const Trajectory& traj, double t_window) {
  std::vector<DiagnosticsRow> rows;
  for (const auto& s : traj.snapshots) {
    DiagnosticsRow r;
    r.t = s.t;
    r.sup_curvature = max_curvature(s.net);
    rows.push_back(r);
  }
  return monitor_curvature_bound(rows, t_window);
}

}  // namespace netflow
