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

#include "netflow/commands.hpp"

#include "netflow/analysis.hpp"
#include "netflow/canonical.hpp"
#include "netflow/elliptic.hpp"
#include "netflow/flow.hpp"
#include "netflow/multiplicity.hpp"
#include "netflow/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace netflow {

namespace fs = std::filesystem;

namespace {

using Echo = std::map<std::string, std::string>;

std::string join_reals(const std::vector<double>& v, char sep = ',') {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s.push_back(sep);
    s += format_real(v[i]);
  }
  return s;
}

std::string point_text(const Point& p) {
  if (p.size() == 0) return "-";
  return join_reals(std::vector<double>(p.data(), p.data() + p.size()));
}

// Resolves parameters and records every resolved value for the echo.
class Params {
 public:
  explicit Params(const Scenario& sc) : sc_(sc) {}

  double real(const std::string& key, std::optional<double> flag, double fallback) {
    const double v = flag ? *flag : sc_.real(key, fallback);
    if (std::isnan(v)) fail("parameter " + key + " is not a number");
    echo[key] = format_real(v);
    return v;
  }
  int integer(const std::string& key, int fallback) {
    const int v = sc_.integer(key, fallback);
    echo[key] = std::to_string(v);
    return v;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    std::string v = sc_.text(key, fallback);
    echo[key] = v;
    return v;
  }
  std::vector<double> list(const std::string& key, const std::optional<std::vector<double>>& flag,
                           const std::vector<double>& fallback) {
    std::vector<double> v = flag ? *flag : (sc_.has(key) ? sc_.reals(key) : fallback);
    echo[key] = v.empty() ? "-" : join_reals(v);
    return v;
  }
  bool has(const std::string& key) const { return sc_.has(key); }

  Echo echo;

 private:
  const Scenario& sc_;
};

class Table {
 public:
  Table(const fs::path& dir, const std::string& name, const std::string& command, const std::string& source,
        const Echo& echo, const std::vector<std::string>& columns, CommandResult& res)
      : path_(dir / name), out_(path_, std::ios::binary) {
    if (!out_) throw Error(Error::Code::Io, "cannot write '" + path_.string() + "'");
    res.files.push_back(name);
    out_ << "# " << kFormatVersion << '\n';
    out_ << "# command " << command << '\n';
    out_ << "# source " << source << '\n';
    for (const auto& [k, v] : echo) out_ << "# param " << k << ' ' << v << '\n';
    row(columns);
  }
  ~Table() = default;

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "\t" : "") << cells[i];
    out_ << '\n';
    if (!out_) throw Error(Error::Code::Io, "write failed for '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_summary(const fs::path& dir, const std::string& command, const std::string& source, const Echo& echo,
                   CommandResult& res) {
  Table t(dir, "summary.tsv", command, source, echo, {"key", "value"}, res);
  for (const auto& [k, v] : res.summary) t.row({k, v});
}

Echo network_echo(const Echo& echo, const std::string& command) {
  Echo e = echo;
  e["format"] = kFormatVersion;
  e["command"] = command;
  return e;
}

std::string fmt_int(long v) { return std::to_string(v); }

StepParams step_params(Params& P, const CommandOptions& opt, double default_h = 0.05) {
  StepParams sp;
  sp.cfl = P.real("cfl", opt.cfl, 0.2);
  sp.target_h = P.real("target_h", opt.target_h, default_h);
  sp.omega = P.real("omega", std::nullopt, 0.5);
  sp.remesh_interval = P.integer("remesh_interval", 1);
  sp.check();
  return sp;
}

Monitors monitors(Params& P, const CommandOptions& opt) {
  Monitors m;
  m.zeta = P.real("zeta", opt.zeta, 1.51);
  m.density_monitor = P.integer("density_monitor", 0) != 0;
  m.density_interval = P.integer("density_interval", 50);
  m.max_curvature = P.real("max_curvature", std::nullopt, std::numeric_limits<double>::infinity());
  m.collision_factor = P.real("collision_factor", std::nullopt, 1.0);
  m.max_steps = P.integer("max_steps", 50'000'000);
  return m;
}

std::vector<std::string> stop_row(const std::optional<StopEvent>& stop, double t_final) {
  if (!stop) return {"none", format_real(t_final), "-", "completed"};
  return {to_string(stop->kind), format_real(stop->time), point_text(stop->location),
          stop->detail.empty() ? "-" : stop->detail};
}

// "x,y;x,y" -> points of dimension dim.
std::vector<Point> parse_points(const std::string& text, int dim) {
  std::vector<Point> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto v = parse_real_list(item, "param centres");
    if (static_cast<int>(v.size()) != dim)
      throw Error(Error::Code::Parse, "param centres: each point needs " + std::to_string(dim) + " coordinates");
    Point p = zeros(dim);
    for (int k = 0; k < dim; ++k) p[k] = v[static_cast<size_t>(k)];
    pts.push_back(p);
  }
  return pts;
}

std::pair<Point, Point> bounding_box(const Network& net) {
  Point lo = Point::Constant(net.dim, std::numeric_limits<double>::infinity());
  Point hi = -lo;
  for (const auto& e : net.edges)
    for (const auto& p : e.nodes) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  for (const auto& v : net.vertices) {
    lo = lo.cwiseMin(v.position);
    hi = hi.cwiseMax(v.position);
  }
  return {lo, hi};
}

fs::path resolve_relative(const std::string& source, const std::string& path) {
  fs::path p(path);
  if (p.is_relative() && !source.empty() && source.front() != '<') p = fs::path(source).parent_path() / p;
  return p;
}

Network resampled(const Network& net, double h) {
  Network out = net;
  for (auto& e : out.edges) e = resample(e, h);
  out.rebuild_incidence();
  return out;
}

// Mean distance of the nodes from `centre`.
double circle_radius_of(const Network& net, const Point& centre) {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : net.edges)
    for (const auto& p : e.nodes) {
      sum += (p - centre).norm();
      ++n;
    }
  return n ? sum / n : 0.0;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "analyze", "regularize", "translate", "multiplicity", "convergence"};
  return names;
}

int exit_code(StopKind kind) {
  switch (kind) {
    case StopKind::None: return 0;
    case StopKind::CurvatureBlowup: return 10;
    case StopKind::JunctionCollision: return 11;
    case StopKind::EmbeddednessLoss: return 12;
    case StopKind::EdgeCollapse: return 13;
    case StopKind::DensityExceedsZeta: return 14;
  }
  return 1;
}

CommandResult cmd_simulate(const Scenario& sc, const std::string& source, const std::string& out_dir,
                           const CommandOptions& opt) {
  const fs::path dir(out_dir);
  CommandResult res;
  Params P(sc);
  const double t_end = P.real("t_end", std::nullopt, 1.0);
  const StepParams sp = step_params(P, opt);
  const Monitors mon = monitors(P, opt);
  const std::vector<double> snaps = P.list("snapshots", opt.snapshots, {});
  const int stride_param = P.integer("diagnostics_stride", 0);

  const RunResult rr = run(make_state(sc.net, sc.time.value_or(0.0)), t_end, sp, mon, snaps);

  {
    Table t(dir, "diagnostics.tsv", "simulate", source, P.echo,
            {"step", "t", "length", "sup_curvature", "min_junction_distance", "min_spacing", "angle_deviation"}, res);
    const size_t n = rr.diagnostics.size();
    const size_t stride = stride_param > 0 ? static_cast<size_t>(stride_param) : std::max<size_t>(1, n / 5000);
    for (size_t i = 0; i < n; ++i) {
      if (i % stride != 0 && i + 1 != n) continue;
      const auto& d = rr.diagnostics[i];
      t.row({fmt_int(static_cast<long>(i)), format_real(d.t), format_real(d.length), format_real(d.sup_curvature),
             format_real(d.min_junction_distance), format_real(d.min_spacing), format_real(d.angle_deviation)});
    }
  }
  fs::create_directories(dir / "snapshots");
  {
    Table t(dir, "snapshots.tsv", "simulate", source, P.echo, {"index", "t", "file"}, res);
    const auto& s = rr.trajectory.snapshots;
    for (size_t i = 0; i < s.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/snapshot_%04zu.nfs", i);
      save_network((dir / name).string(), s[i].net, s[i].t, network_echo(P.echo, "simulate"));
      res.files.push_back(name);
      t.row({fmt_int(static_cast<long>(i)), format_real(s[i].t), name});
    }
  }
  {
    Table t(dir, "stop.tsv", "simulate", source, P.echo, {"kind", "time", "location", "detail"}, res);
    t.row(stop_row(rr.stop, rr.final_state.t));
  }
  if (rr.stop && rr.stop->kind != StopKind::None) res.stop = rr.stop;
  res.summary["steps"] = fmt_int(rr.final_state.steps);
  res.summary["final_time"] = format_real(rr.final_state.t);
  res.summary["stop"] = rr.stop ? to_string(rr.stop->kind) : "none";
  res.summary["max_length_increase"] = format_real(rr.max_length_increase);
  res.summary["final_length"] = format_real(rr.final_state.net.total_length());
  write_summary(dir, "simulate", source, P.echo, res);
  return res;
}

Trajectory load_trajectory(const std::string& dir) {
  const fs::path index = fs::path(dir) / "snapshots.tsv";
  std::ifstream in(index);
  if (!in) throw Error(Error::Code::Io, "cannot open '" + index.string() + "'");
  Trajectory traj;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string idx, t, file;
    if (!std::getline(ss, idx, '\t') || !std::getline(ss, t, '\t') || !std::getline(ss, file, '\t'))
      throw Error(Error::Code::Parse, index.string() + ": malformed row '" + line + "'");
    Scenario snap = load_scenario((fs::path(dir) / file).string());
    if (!snap.time) throw Error(Error::Code::Parse, file + ": snapshot without a time record");
    traj.snapshots.push_back({*snap.time, std::move(snap.net)});
  }
  if (traj.empty()) throw Error(Error::Code::Parse, index.string() + ": no snapshots");
  for (size_t i = 1; i < traj.snapshots.size(); ++i)
    if (!(traj.snapshots[i].t > traj.snapshots[i - 1].t))
      throw Error(Error::Code::Parse, index.string() + ": snapshot times must increase");
  return traj;
}

CommandResult cmd_analyze(const Scenario& sc, const std::string& source, const std::string& out_dir,
                          const CommandOptions& opt) {
  const fs::path dir(out_dir);
  CommandResult res;
  Params P(sc);
  Thresholds th;
  th.zeta = P.real("zeta", opt.zeta, 1.51);
  th.delta = P.real("delta", std::nullopt, 0.02);
  th.check();
  const std::string mode = P.text("source", P.has("trajectory") ? "trajectory" : "flow");
  if (mode != "flow" && mode != "static" && mode != "trajectory") fail("param source must be flow, static or trajectory");

  std::vector<double> scales = P.list("scales", std::nullopt, {});
  if (scales.empty())
    scales = geometric_scales(P.real("r_min", std::nullopt, 0.02), P.real("r_max", std::nullopt, 0.2),
                              P.integer("scale_count", 5));
  for (size_t i = 0; i < scales.size(); ++i)
    if (!(scales[i] > 0.0) || (i && !(scales[i] > scales[i - 1]))) fail("scales must be positive and increasing");

  std::vector<Point> centres;
  if (P.has("centres")) {
    centres = parse_points(P.text("centres", ""), sc.net.dim);
  } else {
    for (int v : sc.net.junction_indices()) centres.push_back(sc.net.vertices[static_cast<size_t>(v)].position);
    if (centres.empty()) {
      const auto [lo, hi] = bounding_box(sc.net);
      centres.push_back(0.5 * (lo + hi));
    }
  }
  const double r_top = scales.back();
  const double centre_time = P.real("centre_time", std::nullopt, mode == "static" ? 0.0 : r_top * r_top);
  const std::uint64_t seed = opt.seed.value_or(static_cast<std::uint64_t>(sc.integer("seed", 1)));
  P.echo["seed"] = std::to_string(seed);

  Trajectory traj;
  if (mode == "trajectory") {
    traj = load_trajectory(resolve_relative(source, P.text("trajectory", "")).string());
  } else if (mode == "flow") {
    std::vector<double> times;
    for (double r : scales)
      if (centre_time - r * r >= sc.time.value_or(0.0)) times.push_back(centre_time - r * r);
    std::sort(times.begin(), times.end());
    const StepParams sp = step_params(P, opt);
    Monitors mon;
    mon.max_steps = P.integer("max_steps", 50'000'000);
    traj = run(make_state(sc.net, sc.time.value_or(0.0)), centre_time, sp, mon, times).trajectory;
  }

  int missing = 0;
  double worst_violation = 0.0;
  {
    std::vector<std::string> cols;
    for (int k = 0; k < sc.net.dim; ++k) cols.push_back("x" + std::to_string(k + 1));
    for (const char* c : {"t", "r", "theta", "snapshot_time", "time_error", "label", "status"}) cols.push_back(c);
    Table t(dir, "density.tsv", "analyze", source, P.echo, cols, res);
    std::vector<std::string> summary_rows;
    for (size_t ci = 0; ci < centres.size(); ++ci) {
      const Point& x = centres[ci];
      std::vector<double> ok_values;
      std::string cls = "unclassified";
      bool have_cls = false;
      for (double r : scales) {
        double theta = 0.0, snap_t = centre_time - r * r, terr = 0.0;
        std::string status = "ok";
        if (mode == "static") {
          theta = gaussian_integral(sc.net, x, r);
        } else if (traj.empty() || centre_time - r * r < traj.t_begin() - 1e-12) {
          status = "no-history";
        } else {
          const DensityRatio d = gaussian_density_ratio(traj, {x, centre_time}, r);
          theta = d.value;
          snap_t = d.snapshot_time;
          terr = d.time_error;
          if (terr > 1e-9 * std::max(1.0, std::abs(centre_time))) status = "missing-history";
        }
        std::vector<std::string> row;
        for (int k = 0; k < x.size(); ++k) row.push_back(format_real(x[k]));
        row.push_back(format_real(centre_time));
        row.push_back(format_real(r));
        row.push_back(status == "no-history" ? "-" : format_real(theta));
        row.push_back(format_real(snap_t));
        row.push_back(format_real(terr));
        row.push_back(status == "ok" ? to_string(classify(theta, th)) : "-");
        row.push_back(status);
        t.row(row);
        if (status != "ok") {
          ++missing;
          continue;
        }
        if (!have_cls) {
          cls = to_string(classify(theta, th));
          have_cls = true;
        }
        ok_values.push_back(theta);
      }
      double violation = 0.0;
      for (size_t i = 0; i + 1 < ok_values.size(); ++i) violation = std::max(violation, ok_values[i] - ok_values[i + 1]);
      worst_violation = std::max(worst_violation, violation);
      res.summary["centre_" + std::to_string(ci) + "_classification"] = cls;
      res.summary["centre_" + std::to_string(ci) + "_monotonicity_violation"] = format_real(violation);
    }
  }
  res.summary["missing_entries"] = fmt_int(missing);
  res.summary["max_monotonicity_violation"] = format_real(worst_violation);

  std::vector<std::pair<double, const Network*>> nets;
  if (mode == "static")
    nets.push_back({centre_time, &sc.net});
  else
    for (const auto& s : traj.snapshots) nets.push_back({s.t, &s.net});

  const int circles = P.integer("parity_circles", 0);
  if (circles > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int odd = 0, rejected = 0;
    std::vector<std::string> cols{"t"};
    for (int k = 0; k < sc.net.dim; ++k) cols.push_back("c" + std::to_string(k + 1));
    for (const char* c : {"radius", "count", "even", "enclosed_vertices", "status"}) cols.push_back(c);
    Table t(dir, "parity.tsv", "analyze", source, P.echo, cols, res);
    for (const auto& [time, net] : nets) {
      auto [lo, hi] = bounding_box(*net);
      const double diam = std::max(net->diameter(), 1e-12);
      for (int i = 0; i < circles; ++i) {
        Point c = zeros(net->dim);
        for (int k = 0; k < net->dim; ++k) c[k] = lo[k] - 0.1 * diam + unit(rng) * (hi[k] - lo[k] + 0.2 * diam);
        const double radius = (0.05 + 0.45 * unit(rng)) * diam;
        std::string status = "ok";
        ParityResult pr;
        bool done = false;
        for (int attempt = 0; attempt < 8 && !done; ++attempt) {
          try {
            pr = disk_parity(*net, c, radius);
            done = true;
          } catch (const NonTransversal& nt) {
            c += nt.suggested_shift;
          }
        }
        if (!done) {
          status = "non-transversal";
          ++rejected;
        } else if (!pr.even) {
          ++odd;
        }
        std::vector<std::string> row{format_real(time)};
        for (int k = 0; k < c.size(); ++k) row.push_back(format_real(c[k]));
        row.push_back(format_real(radius));
        row.push_back(done ? fmt_int(pr.count) : "-");
        row.push_back(done ? (pr.even ? "1" : "0") : "-");
        row.push_back(done ? fmt_int(pr.enclosed_vertices) : "-");
        row.push_back(status);
        t.row(row);
      }
    }
    res.summary["parity_odd_counts"] = fmt_int(odd);
    res.summary["parity_rejected"] = fmt_int(rejected);
  }

  if (P.integer("entropy", 0) != 0 && !nets.empty()) {
    Table t(dir, "entropy.tsv", "analyze", source, P.echo, {"t", "entropy", "centre", "scale", "centres", "scales"}, res);
    for (const auto& [time, net] : nets) {
      const EntropyEstimate e = entropy_estimate(*net);
      t.row({format_real(time), format_real(e.value), point_text(e.centre), format_real(e.scale), fmt_int(e.centres),
             fmt_int(e.scales)});
    }
  }
  write_summary(dir, "analyze", source, P.echo, res);
  return res;
}

CommandResult cmd_regularize(const Scenario& sc, const std::string& source, const std::string& out_dir,
                             const CommandOptions& opt) {
  const fs::path dir(out_dir);
  CommandResult res;
  Params P(sc);
  const std::vector<double> scales = P.list("scales", std::nullopt, {0.04, 0.02, 0.01});
  if (scales.empty()) fail("param scales must list at least one scale");
  const double s_min = *std::min_element(scales.begin(), scales.end());
  const double T = P.real("t_end", std::nullopt, 0.01);

  const auto detected = detect_nonregular(sc.net);
  {
    Table t(dir, "junctions.tsv", "regularize", source, P.echo,
            {"vertex", "angle01_deg", "angle12_deg", "angle20_deg", "tangent_sum", "regular", "fatal"}, res);
    for (const auto& j : detected)
      t.row({fmt_int(j.id), format_real(j.angles[0] * 180.0 / kPi), format_real(j.angles[1] * 180.0 / kPi),
             format_real(j.angles[2] * 180.0 / kPi), format_real(j.tangent_sum), j.regular ? "1" : "0",
             j.fatal ? "1" : "0"});
  }
  res.summary["nonregular_junctions"] = fmt_int(count_nonregular(detected));

  {
    Table t(dir, "desingularisation.tsv", "regularize", source, P.echo,
            {"s", "vertex", "method", "expander_scale", "direction_error", "c0_distance", "nonregular_after", "file"}, res);
    for (size_t i = 0; i < scales.size(); ++i) {
      const Desingularisation d = desingularize(sc.net, scales[i]);
      const std::string name = "desingularised_" + std::to_string(i) + ".nfs";
      Echo e = network_echo(P.echo, "regularize");
      e["s"] = format_real(scales[i]);
      save_network((dir / name).string(), d.net, sc.time, e);
      res.files.push_back(name);
      const int after = count_nonregular(detect_nonregular(d.net));
      if (d.junctions.empty())
        t.row({format_real(scales[i]), "-", "none", "0", "0", format_real(d.c0_distance), fmt_int(after), name});
      for (const auto& g : d.junctions)
        t.row({format_real(scales[i]), fmt_int(g.id), to_string(g.method), format_real(g.expander_scale),
               format_real(g.direction_error), format_real(d.c0_distance), fmt_int(after), name});
    }
  }

  if (P.integer("experiment", 1) != 0) {
    ConvergenceOptions co;
    co.step = step_params(P, opt, s_min / 4.0);
    co.monitors = monitors(P, opt);
    co.monitors.density_monitor = false;
    co.snapshot_times = P.list("snapshots", opt.snapshots, {0.25 * T, 0.5 * T, 0.75 * T});
    co.t_window = P.real("t_window", std::nullopt, scales.front() * scales.front());
    co.density_epsilon = P.real("density_epsilon", std::nullopt, 0.1);
    co.density_radius = P.real("density_radius", std::nullopt, 0.25);
    co.density_tau = P.real("density_tau", std::nullopt, 0.01);
    co.parallel = P.integer("parallel", 1) != 0;
    const ConvergenceReport rep = convergence_experiment(sc.net, scales, T, co);
    {
      Table t(dir, "convergence.tsv", "regularize", source, P.echo,
              {"s", "sup_curvature_sqrt_t", "stop", "stop_time", "final_angle_deviation_deg",
               "max_angle_deviation_after_window_deg", "density_inner_max", "density_outer_max", "density_flow_max",
               "c0_distance"},
              res);
      for (const auto& r : rep.runs)
        t.row({format_real(r.s), format_real(r.sup_curvature_sqrt_t), r.run.stop ? to_string(r.run.stop->kind) : "none",
               format_real(r.run.stop ? r.run.stop->time : r.run.final_state.t),
               format_real(r.final_angle_deviation * 180.0 / kPi),
               format_real(r.max_angle_deviation_after_window * 180.0 / kPi), format_real(r.density_inner_max),
               format_real(r.density_outer_max), format_real(r.density_flow_max), format_real(r.initial.c0_distance)});
    }
    {
      Table t(dir, "distances.tsv", "regularize", source, P.echo, {"s_a", "s_b", "t", "hausdorff"}, res);
      for (const auto& d : rep.distances)
        t.row({format_real(d.s_a), format_real(d.s_b), format_real(d.t), format_real(d.distance)});
    }
    res.summary["curvature_spread"] = format_real(rep.curvature_spread);
    res.summary["densities_ok"] = rep.densities_ok() ? "1" : "0";
    res.summary["stopped_early"] = rep.stopped_early ? "1" : "0";
    res.summary["max_angle_deviation_after_window_deg"] = format_real(rep.max_angle_deviation_after_window() * 180.0 / kPi);
  }
  write_summary(dir, "regularize", source, P.echo, res);
  return res;
}

CommandResult cmd_translate(const Scenario& sc, const std::string& source, const std::string& out_dir,
                            const CommandOptions& opt) {
  const fs::path dir(out_dir);
  CommandResult res;
  Params P(sc);
  SurfaceOptions so;
  so.epsilon = P.real("epsilon", opt.epsilon, 0.05);
  so.z_max = P.real("z_max", opt.z_max, 0.0);
  so.target_h = P.real("target_h", opt.target_h, 0.05);
  so.rows_per_epsilon = P.integer("rows_per_epsilon", 4);
  MinimizeOptions mo;
  mo.max_iterations = P.integer("max_iterations", mo.max_iterations);
  const std::vector<double> times = P.list("snapshots", opt.snapshots, {0.01});

  const RegularizedFlow rf = regularized_flow(sc.net, times, so, mo);
  fs::create_directories(dir / "slices");
  {
    Table t(dir, "slices.tsv", "translate", source, P.echo, {"t", "z", "length", "hausdorff_to_input", "nodes", "file"}, res);
    for (size_t i = 0; i < rf.times.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "slices/slice_%04zu.nfs", i);
      save_network((dir / name).string(), rf.slices[i], rf.times[i], network_echo(P.echo, "translate"));
      res.files.push_back(name);
      t.row({format_real(rf.times[i]), format_real(rf.times[i] / so.epsilon), format_real(rf.slices[i].total_length()),
             format_real(hausdorff_distance(rf.slices[i], sc.net)), fmt_int(rf.slices[i].node_count()), name});
    }
  }
  const TranslatorResidual tr = translator_residual(rf.surface);
  {
    Table t(dir, "energy.tsv", "translate", source, P.echo, {"iteration", "energy"}, res);
    for (size_t i = 0; i < rf.report.energy.size(); ++i) t.row({fmt_int(static_cast<long>(i)), format_real(rf.report.energy[i])});
  }
  {
    const fs::path path = dir / "surface.txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Error::Code::Io, "cannot write '" + path.string() + "'");
    out << "# " << kFormatVersion << "\n# command translate\n# source " << source << '\n';
    for (const auto& [k, v] : P.echo) out << "# param " << k << ' ' << v << '\n';
    write_checkpoint(out, rf.surface);
    res.files.push_back("surface.txt");
  }
  res.summary["iterations"] = fmt_int(rf.report.iterations);
  res.summary["converged"] = rf.report.converged ? "1" : "0";
  res.summary["reason"] = rf.report.reason;
  res.summary["energy"] = format_real(rf.report.energy.empty() ? 0.0 : rf.report.energy.back());
  res.summary["gradient"] = format_real(rf.report.gradient_norm);
  res.summary["z_max"] = format_real(rf.surface.z_max);
  res.summary["residual_max"] = format_real(tr.max);
  res.summary["residual_rms"] = format_real(tr.rms);
  write_summary(dir, "translate", source, P.echo, res);
  return res;
}

CommandResult cmd_multiplicity(const Scenario& sc, const std::string& source, const std::string& out_dir,
                               const CommandOptions&) {
  const fs::path dir(out_dir);
  CommandResult res;
  Params P(sc);
  const bool drop = P.integer("drop", 1) != 0;
  const MultiplicityAssignment a = assign_multiplicity(sc.net);
  {
    Table t(dir, "multiplicity.tsv", "multiplicity", source, P.echo, {"edge", "left", "right", "bits", "norm"}, res);
    for (size_t e = 0; e < sc.net.edges.size(); ++e)
      t.row({fmt_int(sc.net.edges[e].id), fmt_int(a.regions.left[e]), fmt_int(a.regions.right[e]), a.element[e].bits(),
             fmt_int(a.element[e].norm())});
  }
  {
    Table t(dir, "regions.tsv", "multiplicity", source, P.echo, {"region", "area", "unbounded"}, res);
    for (int r = 0; r < a.regions.regions; ++r)
      t.row({fmt_int(r), format_real(a.regions.area[static_cast<size_t>(r)]), r == a.regions.unbounded ? "1" : "0"});
  }
  std::string vanishing;
  for (int e : a.vanishing) vanishing += (vanishing.empty() ? "" : ",") + std::to_string(sc.net.edges[static_cast<size_t>(e)].id);
  res.summary["regions"] = fmt_int(a.regions.regions);
  res.summary["cycle_check"] = a.cycle ? "pass" : "fail";
  res.summary["witness_vertex"] =
      a.witness_vertex < 0 ? "-" : fmt_int(sc.net.vertices[static_cast<size_t>(a.witness_vertex)].id);
  res.summary["vanishing"] = vanishing.empty() ? "-" : vanishing;
  res.summary["euler_ok"] = a.regions.euler_ok() ? "1" : "0";
  if (drop) {
    try {
      const Network kept = drop_vanishing(sc.net, a);
      save_network((dir / "dropped.nfs").string(), kept, sc.time, network_echo(P.echo, "multiplicity"));
      res.files.push_back("dropped.nfs");
      res.summary["dropped_edges"] = fmt_int(static_cast<long>(kept.edges.size()));
    } catch (const Error& e) {
      if (e.code() != Error::Code::Domain) throw;
      res.summary["drop_error"] = e.what();
    }
  }
  write_summary(dir, "multiplicity", source, P.echo, res);
  return res;
}

CommandResult cmd_convergence(const Scenario& sc, const std::string& source, const std::string& out_dir,
                              const CommandOptions& opt) {
  const fs::path dir(out_dir);
  CommandResult res;
  Params P(sc);
  const int levels = P.integer("levels", 3);
  if (levels < 2) fail("param levels must be at least 2");
  const double t_end = P.real("t_end", std::nullopt, 1.0);
  StepParams sp = step_params(P, opt);
  const double h0 = sp.target_h;
  Monitors mon = monitors(P, opt);
  const double R0 = P.real("exact_circle_r0", std::nullopt, 0.0);
  Point centre = zeros(sc.net.dim);
  if (P.has("exact_circle_centre")) centre = parse_points(P.text("exact_circle_centre", ""), sc.net.dim).front();
  const double t0 = sc.time.value_or(0.0);
  // The radius law is compared up to 80% of the extinction time; past that
  // the error is dominated by the few remaining nodes.
  const double t_compare = t0 + 0.8 * (R0 * R0 / 2.0);
  std::vector<double> snap_default;
  if (R0 > 0.0)
    for (int i = 1; i <= 4; ++i) snap_default.push_back(t0 + 0.2 * i * R0 * R0 / 2.0);
  const std::vector<double> snaps = P.list("snapshots", opt.snapshots, snap_default);

  std::vector<RunResult> runs;
  std::vector<double> radius_error(static_cast<size_t>(levels), 0.0);
  {
    Table t(dir, "levels.tsv", "convergence", source, P.echo,
            {"level", "target_h", "nodes", "stop", "stop_time", "final_time", "final_length", "radius_error"}, res);
    for (int k = 0; k < levels; ++k) {
      sp.target_h = h0 / std::pow(2.0, k);
      // With an exact circle declared, each level starts from nodes on that
      // circle; resampling the input polygon would freeze its chord error.
      const int n_circle = static_cast<int>(std::ceil(2.0 * kPi * R0 / sp.target_h));
      const Network start = R0 > 0.0 ? exact_circle(R0, 0.0, std::max(n_circle, 8), &centre)
                                     : resampled(sc.net, sp.target_h);
      runs.push_back(run(make_state(start, t0), t_end, sp, mon, snaps));
      const RunResult& rr = runs.back();
      if (R0 > 0.0)
        for (const auto& s : rr.trajectory.snapshots) {
          const double R = circle_radius_of(s.net, centre);
          const double exact = std::sqrt(std::max(0.0, R0 * R0 - 2.0 * s.t));
          if (exact > 0.0 && s.t <= t_compare && s.net.node_count() > 0)
            radius_error[static_cast<size_t>(k)] = std::max(radius_error[static_cast<size_t>(k)], std::abs(R - exact));
        }
      t.row({fmt_int(k), format_real(sp.target_h), fmt_int(start.node_count()),
             rr.stop ? to_string(rr.stop->kind) : "none", rr.stop ? format_real(rr.stop->time) : "-",
             format_real(rr.final_state.t), format_real(rr.final_state.net.total_length()),
             R0 > 0.0 ? format_real(radius_error[static_cast<size_t>(k)]) : "-"});
    }
  }
  {
    Table t(dir, "distances.tsv", "convergence", source, P.echo, {"level_a", "level_b", "t", "hausdorff"}, res);
    for (int k = 0; k + 1 < levels; ++k)
      for (double time : snaps) {
        const Snapshot* a = nullptr;
        const Snapshot* b = nullptr;
        for (const auto& s : runs[static_cast<size_t>(k)].trajectory.snapshots)
          if (s.t == time) a = &s;
        for (const auto& s : runs[static_cast<size_t>(k + 1)].trajectory.snapshots)
          if (s.t == time) b = &s;
        if (a && b) t.row({fmt_int(k), fmt_int(k + 1), format_real(time), format_real(hausdorff_distance(a->net, b->net))});
      }
  }
  auto stop_time = [&](int k) {
    const RunResult& r = runs[static_cast<size_t>(k)];
    return r.stop ? r.stop->time : r.final_state.t;
  };
  const double d1 = std::abs(stop_time(levels - 2) - stop_time(levels - 3 < 0 ? 0 : levels - 3));
  const double d2 = std::abs(stop_time(levels - 1) - stop_time(levels - 2));
  res.summary["stop_time_finest"] = format_real(stop_time(levels - 1));
  res.summary["stop_time_relative_change"] = format_real(d2 / std::max(std::abs(stop_time(levels - 1)), 1e-300));
  if (levels >= 3 && d2 > 0.0) res.summary["stop_time_convergence_order"] = format_real(std::log2(d1 / d2));
  if (R0 > 0.0 && radius_error[static_cast<size_t>(levels - 1)] > 0.0)
    res.summary["radius_error_order"] =
        format_real(std::log2(radius_error[static_cast<size_t>(levels - 2)] / radius_error[static_cast<size_t>(levels - 1)]));
  write_summary(dir, "convergence", source, P.echo, res);
  return res;
}

CommandResult run_command(const std::string& name, const std::string& scenario_path, const std::string& out_dir,
                          const CommandOptions& opt) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) fail("unknown command '" + name + "'");
  if (out_dir.empty()) fail("output directory must be given");
  const Scenario sc = load_scenario(scenario_path);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Error::Code::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
  if (name == "simulate") return cmd_simulate(sc, scenario_path, out_dir, opt);
  if (name == "analyze") return cmd_analyze(sc, scenario_path, out_dir, opt);
  if (name == "regularize") return cmd_regularize(sc, scenario_path, out_dir, opt);
  if (name == "translate") return cmd_translate(sc, scenario_path, out_dir, opt);
  if (name == "multiplicity") return cmd_multiplicity(sc, scenario_path, out_dir, opt);
  return cmd_convergence(sc, scenario_path, out_dir, opt);
}

}  // namespace netflow
