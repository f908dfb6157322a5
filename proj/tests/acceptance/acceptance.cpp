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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned
// below. Usage: netflow_acceptance [criterion numbers...]

#include "support.hpp"

#include "netflow/analysis.hpp"
#include "netflow/builders.hpp"
#include "netflow/canonical.hpp"
#include "netflow/elliptic.hpp"
#include "netflow/flow.hpp"
#include "netflow/multiplicity.hpp"
#include "netflow/regularize.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>

using namespace netflow;

namespace {

// Pinned tolerances and budgets.
constexpr double kLineTol = 1e-6;
constexpr double kTripleTol = 1e-6;
constexpr double kExtinctionTol = 1e-4;
constexpr double kOrderLo = 1.8, kOrderHi = 2.2;
constexpr double kExtinctionTimeRel = 0.01;
constexpr double kStaticSpeed = 1e-12;
constexpr long kStaticSteps = 10000;
constexpr double kLengthRel = 1e-12;
constexpr double kMonotoneTol = 5e-4;
constexpr double kCollisionSelfConv = 0.02;
constexpr double kCurvatureSpread = 0.20;
constexpr double kAngleDeg = 1.0;
constexpr double kDensityEps = 0.1;
constexpr double kHausdorffRel = 5e-2;
constexpr double kGradientRel = 1e-6;
constexpr double kResidualOrder = 1.0;
constexpr double kBarrierC = 1.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [x]");
}

double mean_radius(const Network& net) {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : net.edges)
    for (const auto& p : e.nodes) {
      sum += p.norm();
      ++n;
    }
  return sum / n;
}

std::vector<double> history(double t, const std::vector<double>& scales) {
  std::vector<double> times;
  for (double r : scales) times.push_back(t - r * r);
  std::sort(times.begin(), times.end());
  return times;
}

// 1. Density calibration.
Outcome density_calibration() {
  Outcome o;
  const std::vector<double> scales{0.01, 0.03, 0.1, 0.3, 1.0};
  const double tc = 1.5;
  StepParams sp;
  sp.target_h = 0.05;

  const Network line = make_segment(vec2(-20, 0), vec2(20, 0), 801);
  const RunResult lr = run(make_state(line), tc, sp, {}, history(tc, scales));
  double line_err = 0.0;
  for (double r : scales) line_err = std::max(line_err, std::abs(gaussian_density_ratio(lr.trajectory, {vec2(0.3, 0), tc}, r).value - 1.0));
  note(o, line_err <= kLineTol, "line max|theta-1| " + fmt("%.2e", line_err));

  Eigen::MatrixXd rot(2, 2);
  rot << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  const Network y = make_y(2, rot, 20.0, 401);
  const RunResult yr = run(make_state(y), tc, sp, {}, history(tc, scales));
  double y_err = 0.0;
  for (double r : scales) y_err = std::max(y_err, std::abs(gaussian_density_ratio(yr.trajectory, {zeros(2), tc}, r).value - 1.5));
  note(o, y_err <= kTripleTol, "Y max|theta-1.5| " + fmt("%.2e", y_err));

  // Shrinking unit circle seen from its extinction point (origin, t = 1/2).
  // The slice at time 1/2 - r^2 is the circle of radius sqrt(2) r.
  const std::vector<double> cscales{0.5, 0.55, 0.6, 0.65, 0.7};
  StepParams cp;
  cp.target_h = 2 * kPi / 256;
  const RunResult cr = run(make_state(make_circle(1.0, 256)), 0.5 - 0.5 * 0.5, cp, {}, history(0.5, cscales));
  double c_err = 0.0;
  for (double r : cscales) {
    const double target = oracle::circle_integral(zeros(2), std::sqrt(2.0) * r, zeros(2), r);
    c_err = std::max(c_err, std::abs(gaussian_density_ratio(cr.trajectory, {zeros(2), 0.5}, r).value - target));
  }
  note(o, c_err <= kExtinctionTol, "circle max|theta-quadrature| " + fmt("%.2e", c_err) + " (target " +
                                       fmt("%.6f", oracle::circle_integral(zeros(2), std::sqrt(2.0), zeros(2), 1.0)) + ")");
  return o;
}

// 2. Circle convergence order and extinction time.
Outcome circle_convergence() {
  Outcome o;
  const std::vector<double> snaps{0.1, 0.2, 0.3, 0.4};
  std::vector<double> err;
  double stop_time = 0.0;
  StopKind stop_kind = StopKind::None;
  for (int n : {64, 128, 256}) {
    StepParams sp;
    sp.target_h = 2 * kPi / n;
    const RunResult rr = run(make_state(make_circle(1.0, n)), 0.6, sp, {}, snaps);
    double e = 0.0;
    for (const auto& s : rr.trajectory.snapshots)
      if (s.t > 0.0 && s.t <= 0.4 + 1e-12) e = std::max(e, std::abs(mean_radius(s.net) - std::sqrt(1.0 - 2.0 * s.t)));
    err.push_back(e);
    if (n == 256 && rr.stop) {
      stop_time = rr.stop->time;
      stop_kind = rr.stop->kind;
    }
  }
  const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
  note(o, p1 >= kOrderLo && p1 <= kOrderHi && p2 >= kOrderLo && p2 <= kOrderHi,
       "orders " + fmt("%.3f", p1) + ", " + fmt("%.3f", p2) + " (errors " + fmt("%.2e", err[0]) + ", " +
           fmt("%.2e", err[1]) + ", " + fmt("%.2e", err[2]) + ")");
  const double rel = std::abs(stop_time - 0.5) / 0.5;
  note(o, stop_kind == StopKind::EdgeCollapse && rel <= kExtinctionTimeRel,
       std::string("extinction ") + to_string(stop_kind) + " at t=" + fmt("%.5f", stop_time) + " rel " + fmt("%.2e", rel));
  return o;
}

// 3. Static configurations do not move.
Outcome static_configurations() {
  Outcome o;
  Eigen::MatrixXd rot(2, 2);
  rot << std::cos(1.1), -std::sin(1.1), std::sin(1.1), std::cos(1.1);
  Eigen::MatrixXd rot3 = Eigen::MatrixXd::Identity(3, 3);
  rot3.block(0, 0, 2, 2) = rot;
  const std::vector<std::pair<std::string, Network>> cases{
      {"Y", make_y(2, 1.0, 21)},
      {"rotated Y", make_y(2, rot, 1.0, 21)},
      {"Y in R^3", make_y(3, rot3, 1.0, 21)},
      {"segment", make_segment(vec2(-0.5, 0.2), vec2(0.5, 0.7), 23)},
      {"segment in R^3", make_segment(vec3(0, 0, 0), vec3(0.3, 0.4, 0.5), 15)},
  };
  for (const auto& [name, net] : cases) {
    FlowState st = make_state(net);
    StepParams sp;
    double vmax = 0.0;
    for (long k = 0; k < kStaticSteps; ++k) {
      const double dt = adaptive_dt(st, sp);
      if (step(st, sp, dt)) {
        vmax = std::numeric_limits<double>::infinity();
        break;
      }
      for (const auto& ve : st.velocity)
        for (const auto& v : ve) vmax = std::max(vmax, v.norm());
    }
    note(o, vmax < kStaticSpeed, name + " max speed " + fmt("%.1e", vmax));
  }
  return o;
}

// 4. Length decrease and monotonicity of Gaussian density ratios.
Outcome monotonicity() {
  Outcome o;
  double worst_len = 0.0;
  {
    StepParams sp;
    sp.target_h = 0.02;
    worst_len = std::max(worst_len, run(make_state(make_lens(0.5, 1.5, 0.02)), 1.0, sp).max_length_increase);
    sp.target_h = 2 * kPi / 256;
    worst_len = std::max(worst_len, run(make_state(make_circle(1.0, 256)), 0.6, sp).max_length_increase);
    sp.target_h = 0.02;
    worst_len = std::max(worst_len, run(make_state(make_curved_triod(101)), 0.05, sp).max_length_increase);
  }
  note(o, worst_len <= kLengthRel, "max relative length increase per step " + fmt("%.1e", worst_len));

  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> scales = geometric_scales(0.02, 0.2, 6);
  std::vector<SpacetimePoint> centres;
  std::vector<double> times;
  for (int i = 0; i < 20; ++i) {
    const SpacetimePoint X{vec2(-0.8 + 1.6 * u(rng), -0.5 + u(rng)), 0.04 + 0.02 * u(rng)};
    centres.push_back(X);
    for (double t : history(X.t, scales)) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  StepParams sp;
  sp.target_h = 0.02;
  const RunResult rr = run(make_state(make_lens(0.5, 3.0, 0.02)), 0.06, sp, {}, times);
  double worst = 0.0;
  for (const auto& X : centres) worst = std::max(worst, density_report(rr.trajectory, X, scales).max_monotonicity_violation);
  note(o, !rr.stop && worst <= kMonotoneTol, "max decrease of theta in r over 20 centres " + fmt("%.1e", worst));
  return o;
}

// 5. Stop events and self-convergence of the collision time.
Outcome singularities() {
  Outcome o;
  std::vector<double> T;
  bool all_collide = true;
  for (double h : {0.02, 0.01, 0.005}) {
    StepParams sp;
    sp.target_h = h;
    const RunResult rr = run(make_state(make_lens(0.5, 1.5, h)), 1.0, sp);
    all_collide = all_collide && rr.stop && rr.stop->kind == StopKind::JunctionCollision;
    T.push_back(rr.stop ? rr.stop->time : 0.0);
  }
  const double d1 = std::abs(T[1] - T[0]) / T[1], d2 = std::abs(T[2] - T[1]) / T[2];
  note(o, all_collide, "lens stops by junction-collision at t=" + fmt("%.5f", T[0]) + ", " + fmt("%.5f", T[1]) + ", " +
                           fmt("%.5f", T[2]));
  note(o, d1 <= kCollisionSelfConv && d2 <= kCollisionSelfConv,
       "collision time changes " + fmt("%.2e", d1) + ", " + fmt("%.2e", d2));
  StepParams cp;
  cp.target_h = 2 * kPi / 256;
  const RunResult cr = run(make_state(make_circle(1.0, 256)), 1.0, cp);
  double sup_a = 0.0;
  for (const auto& d : cr.diagnostics) sup_a = std::max(sup_a, d.sup_curvature);
  note(o, cr.stop && cr.stop->kind == StopKind::EdgeCollapse && sup_a > 10.0,
       std::string("circle stops by ") + (cr.stop ? to_string(cr.stop->kind) : "none") + " with sup|A| " +
           fmt("%.1f", sup_a) + " before collapse");
  return o;
}

// 6. Desingularised non-regular triod.
Outcome nonregular_triod() {
  Outcome o;
  const std::vector<double> scales{4e-2, 2e-2, 1e-2};
  ConvergenceOptions opt;
  opt.step.target_h = 2.5e-3;
  opt.snapshot_times = {0.0025, 0.005, 0.0075};
  opt.density_epsilon = kDensityEps;
  const ConvergenceReport rep = convergence_experiment(make_triod_90_135_135(0.5, 101), scales, 0.01, opt);
  std::string vals;
  for (const auto& r : rep.runs) vals += (vals.empty() ? "" : ", ") + fmt("%.4f", r.sup_curvature_sqrt_t);
  note(o, !rep.stopped_early && rep.curvature_spread <= kCurvatureSpread,
       "sup|A|sqrt(t) " + vals + " spread " + fmt("%.3f", rep.curvature_spread));
  const double ang = rep.max_angle_deviation_after_window() * 180.0 / kPi;
  note(o, ang <= kAngleDeg, "max angle deviation for t >= s1^2 " + fmt("%.1e", ang) + " deg");
  double inner = 0.0, outer = 0.0, flow = 0.0;
  for (const auto& r : rep.runs) {
    inner = std::max(inner, r.density_inner_max);
    outer = std::max(outer, r.density_outer_max);
    flow = std::max(flow, r.density_flow_max);
  }
  note(o, rep.densities_ok(), "densities: inner " + fmt("%.4f", inner) + " < " + fmt("%.2f", 2 - kDensityEps) +
                                  ", off-centre " + fmt("%.4f", outer) + " < " + fmt("%.2f", 1.5 - kDensityEps) +
                                  ", along flow " + fmt("%.4f", flow));
  for (const auto& r : rep.runs)
    note(o, r.initial.c0_distance <= r.s && count_nonregular(detect_nonregular(r.initial.net)) == 0,
         "s=" + fmt("%.0e", r.s) + " C0 " + fmt("%.1e", r.initial.c0_distance));
  return o;
}

// 7. Elliptic regularisation.
Outcome elliptic() {
  Outcome o;
  const Network triod = make_curved_triod(801);
  auto direct_at = [&](double t) {
    StepParams sp;
    sp.target_h = 0.0125;
    FlowState st = make_state(triod);
    for (auto& e : st.net.edges) e = resample(e, 0.0125);
    return run(st, t, sp).trajectory.snapshots.back().net;
  };
  const Network direct = direct_at(0.01);
  const double diam = direct.diameter();
  double prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    SurfaceOptions so;
    so.epsilon = 0.05 / (1 << level);
    so.target_h = 0.05 / (1 << level);
    so.z_max = 0.0;
    const RegularizedFlow rf = regularized_flow(triod, {0.01}, so);
    const double d = hausdorff_distance(rf.slices[0], direct);
    if (level == 0)
      note(o, d < kHausdorffRel * diam, "eps=0.05 Hausdorff " + fmt("%.2e", d) + " vs " + fmt("%.2e", kHausdorffRel * diam));
    else
      note(o, d < prev, "eps=0.025 Hausdorff " + fmt("%.2e", d) + " improves");
    prev = d;
  }

  // Gradient against central differences of the local weighted area.
  {
    SurfaceOptions so;
    so.z_max = 0.5;
    GluedSurface s = build_initial_surface(triod, so);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 0.01);
    for (size_t v = 0; v < s.X.size(); ++v)
      if (!s.fixed[v]) {
        s.X[v][0] += g(rng);
        s.X[v][1] += g(rng);
      }
    const auto grad = energy_gradient(s);
    std::vector<int> candidates;
    for (int v = 0; v < s.vertex_count(); ++v)
      if (!s.fixed[static_cast<size_t>(v)] && s.X[static_cast<size_t>(v)][2] <= 0.2) candidates.push_back(v);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    double worst = 0.0;
    const double eta = 1e-6;
    for (int i = 0; i < 20; ++i) {
      const int v = candidates[static_cast<size_t>(i)];
      Eigen::Vector2d fd;
      for (int k = 0; k < 2; ++k) {
        GluedSurface p = s;
        p.X[static_cast<size_t>(v)][k] += eta;
        const double ep = oracle::local_energy(p, v);
        p.X[static_cast<size_t>(v)][k] -= 2 * eta;
        const double em = oracle::local_energy(p, v);
        fd[k] = (ep - em) / (2 * eta);
      }
      const Eigen::Vector2d an = grad[static_cast<size_t>(v)].head<2>();
      worst = std::max(worst, (fd - an).norm() / an.norm());
    }
    note(o, worst <= kGradientRel, "gradient vs finite differences at 20 vertices " + fmt("%.1e", worst));
  }

  // Residual under grid refinement at fixed eps.
  {
    std::vector<double> rms;
    for (int r = 0; r < 3; ++r) {
      SurfaceOptions so;
      so.epsilon = 0.05;
      so.z_max = 0.5;
      so.target_h = 0.05 / (1 << r);
      so.rows_per_epsilon = 4 << r;
      GluedSurface s = build_initial_surface(triod, so);
      minimize(s);
      rms.push_back(translator_residual(s).rms);
    }
    const double p1 = std::log2(rms[0] / rms[1]), p2 = std::log2(rms[1] / rms[2]);
    note(o, p1 >= kResidualOrder && p2 >= kResidualOrder,
         "translator residual orders " + fmt("%.2f", p1) + ", " + fmt("%.2f", p2));
  }
  return o;
}

// 8. Multiplicities.
Outcome multiplicity() {
  Outcome o;
  const Network net = make_two_circles_segment(1.0, 1.0, 64);
  const MultiplicityAssignment a = assign_multiplicity(net);
  note(o, a.vanishing == std::vector<int>{2} && !a.element[0].is_zero() && !a.element[1].is_zero(),
       "segment vanishes, circles " + a.element[0].bits() + " / " + a.element[1].bits());
  note(o, a.cycle, "cycle check");
  const Network kept = drop_vanishing(net, a);
  int loops = 0;
  for (const auto& e : kept.edges) loops += e.closed ? 1 : 0;
  note(o, kept.edges.size() == 2 && loops == 2, "drop_vanishing leaves " + std::to_string(loops) + " closed loops");

  std::mt19937_64 rng(42);
  int passed = 0, euler = 0;
  for (int i = 0; i < 100; ++i) {
    const Network r = oracle::random_planar_network(rng, 3 + i % 3);
    const MultiplicityAssignment ra = assign_multiplicity(r);
    passed += ra.cycle ? 1 : 0;
    euler += ra.regions.euler_ok() ? 1 : 0;
  }
  note(o, passed == 100 && euler == 100,
       "random planar networks: cycle check " + std::to_string(passed) + "/100, Euler " + std::to_string(euler) + "/100");
  return o;
}

// 9. Parity of sphere crossings.
Outcome parity() {
  Outcome o;
  StepParams sp;
  sp.target_h = 0.02;
  const RunResult rr = run(make_state(make_lens(0.5, 1.5, 0.02)), 0.06, sp, {}, std::vector<double>{0.02, 0.04, 0.06});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int odd = 0, tested = 0, junction_ok = 0, junctions = 0;
  for (const auto& snap : rr.trajectory.snapshots) {
    const Network& net = snap.net;
    int kept = 0;
    for (int attempt = 0; attempt < 5000 && kept < 50; ++attempt) {
      const Point c = vec2(-1.8 + 3.6 * u(rng), -0.8 + 1.6 * u(rng));
      const double radius = 0.05 + 0.6 * u(rng);
      bool encloses = false;
      for (const auto& v : net.vertices) encloses = encloses || (v.position - c).norm() <= radius;
      if (encloses) continue;
      try {
        const ParityResult pr = disk_parity(net, c, radius);
        ++kept;
        odd += pr.even ? 0 : 1;
      } catch (const NonTransversal&) {
      }
    }
    tested += kept;
    for (int v : net.junction_indices()) {
      ++junctions;
      const ParityResult pr = disk_parity(net, net.vertices[static_cast<size_t>(v)].position, 0.03);
      junction_ok += pr.count == 3 ? 1 : 0;
    }
  }
  note(o, tested == 50 * static_cast<int>(rr.trajectory.snapshots.size()) && odd == 0,
       std::to_string(tested) + " transversal circles, " + std::to_string(odd) + " odd");
  note(o, junctions > 0 && junction_ok == junctions,
       "circles isolating a junction count 3: " + std::to_string(junction_ok) + "/" + std::to_string(junctions));
  return o;
}

// 10. Shrinking-ball barrier.
Outcome barrier() {
  Outcome o;
  const double h = 2 * kPi / 256;
  StepParams sp;
  sp.target_h = h;
  const RunResult cr = run(make_state(make_circle(1.0, 256)), 0.45, sp, {}, std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.4, 0.45});
  double worst = 0.0;
  for (const auto& s : cr.trajectory.snapshots) worst = std::max(worst, std::abs(mean_radius(s.net) - std::sqrt(1.0 - 2.0 * s.t)));
  note(o, worst <= kBarrierC * h * h, "circle |R - sqrt(R0^2-2t)| " + fmt("%.2e", worst) + " <= C h^2 = " + fmt("%.2e", kBarrierC * h * h));

  StepParams lp;
  lp.target_h = 0.02;
  const RunResult lr = run(make_state(make_lens(0.5, 1.5, 0.02)), 0.08, lp, {}, std::vector<double>{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07});
  const BarrierResult above = barrier_check(lr.trajectory, {vec2(0.0, 0.8), 0.3}, kBarrierC);
  const BarrierResult inside = barrier_check(cr.trajectory, {vec2(0.4, 0.0), 0.4}, kBarrierC);
  note(o, above.pass && inside.pass,
       "balls avoided (min margins " + fmt("%.2e", above.min_margin) + ", " + fmt("%.2e", inside.min_margin) + ")");
  return o;
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "density calibration", 10, density_calibration},
      {2, "circle convergence", 60, circle_convergence},
      {3, "static configurations", 30, static_configurations},
      {4, "length and density monotonicity", 120, monotonicity},
      {5, "singularity stop events", 120, singularities},
      {6, "non-regular triod desingularisation", 300, nonregular_triod},
      {7, "elliptic regularisation", 600, elliptic},
      {8, "multiplicity assignment", 60, multiplicity},
      {9, "sphere parity", 120, parity},
      {10, "barrier law", 60, barrier},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = o.pass && in_budget;
    failed += pass ? 0 : 1;
    std::printf("%s %2d %s: %s; runtime %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.number, c.name,
                o.detail.c_str(), secs, c.budget_s, in_budget ? "" : " [x]");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
