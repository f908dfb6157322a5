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

#include "netflow/netflow.h"

#include "netflow/analysis.hpp"
#include "netflow/commands.hpp"
#include "netflow/flow.hpp"
#include "netflow/scenario.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <string>

struct nf_network {
  netflow::Network net;
  std::optional<double> time;
};

struct nf_trajectory {
  netflow::Trajectory traj;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_summary;

nf_status status_of(netflow::Error::Code c) {
  switch (c) {
    case netflow::Error::Code::InvalidArgument: return NF_INVALID_ARGUMENT;
    case netflow::Error::Code::Domain: return NF_DOMAIN;
    case netflow::Error::Code::Parse: return NF_PARSE;
    case netflow::Error::Code::Io: return NF_IO;
    case netflow::Error::Code::Internal: return NF_INTERNAL;
  }
  return NF_INTERNAL;
}

template <class F>
nf_status guarded(F&& f) {
  try {
    f();
    return NF_OK;
  } catch (const netflow::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NF_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NF_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return NF_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) netflow::fail(std::string(what) + " must not be null");
}

nf_stop_kind to_c(netflow::StopKind k) {
  switch (k) {
    case netflow::StopKind::None: return NF_STOP_NONE;
    case netflow::StopKind::CurvatureBlowup: return NF_STOP_CURVATURE_BLOWUP;
    case netflow::StopKind::JunctionCollision: return NF_STOP_JUNCTION_COLLISION;
    case netflow::StopKind::EmbeddednessLoss: return NF_STOP_EMBEDDEDNESS_LOSS;
    case netflow::StopKind::EdgeCollapse: return NF_STOP_EDGE_COLLAPSE;
    case netflow::StopKind::DensityExceedsZeta: return NF_STOP_DENSITY_EXCEEDS_ZETA;
  }
  return NF_STOP_NONE;
}

netflow::StopKind from_c(nf_stop_kind k) {
  switch (k) {
    case NF_STOP_NONE: return netflow::StopKind::None;
    case NF_STOP_CURVATURE_BLOWUP: return netflow::StopKind::CurvatureBlowup;
    case NF_STOP_JUNCTION_COLLISION: return netflow::StopKind::JunctionCollision;
    case NF_STOP_EMBEDDEDNESS_LOSS: return netflow::StopKind::EmbeddednessLoss;
    case NF_STOP_EDGE_COLLAPSE: return netflow::StopKind::EdgeCollapse;
    case NF_STOP_DENSITY_EXCEEDS_ZETA: return netflow::StopKind::DensityExceedsZeta;
  }
  return netflow::StopKind::None;
}

netflow::CommandOptions to_options(const nf_options* opt) {
  netflow::CommandOptions o;
  if (!opt) return o;
  if (opt->has_zeta) o.zeta = opt->zeta;
  if (opt->has_cfl) o.cfl = opt->cfl;
  if (opt->has_target_h) o.target_h = opt->target_h;
  if (opt->has_epsilon) o.epsilon = opt->epsilon;
  if (opt->has_z_max) o.z_max = opt->z_max;
  if (opt->has_seed) o.seed = opt->seed;
  if (opt->snapshot_count > 0) {
    need(opt->snapshots, "snapshots");
    o.snapshots = std::vector<double>(opt->snapshots, opt->snapshots + opt->snapshot_count);
  }
  return o;
}

netflow::Point point_of(const double* x, int dim) {
  need(x, "x");
  if (dim < 2 || dim > netflow::kMaxDim) netflow::fail("dimension out of range");
  netflow::Point p(dim);
  for (int k = 0; k < dim; ++k) p[k] = x[k];
  return p;
}

}  // namespace

extern "C" {

const char* nf_version(void) { return "1.0.0"; }

const char* nf_format_version(void) { return netflow::kFormatVersion; }

const char* nf_last_error(void) { return last_error.c_str(); }

const char* nf_status_name(nf_status status) {
  switch (status) {
    case NF_OK: return "ok";
    case NF_INVALID_ARGUMENT: return "invalid-argument";
    case NF_DOMAIN: return "domain";
    case NF_PARSE: return "parse";
    case NF_IO: return "io";
    case NF_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nf_stop_name(nf_stop_kind kind) { return netflow::to_string(from_c(kind)); }

int nf_exit_code_for_stop(nf_stop_kind kind) { return netflow::exit_code(from_c(kind)); }

void nf_options_init(nf_options* opt) {
  if (opt) std::memset(opt, 0, sizeof *opt);
}

nf_status nf_run_command(const char* command, const char* scenario_path, const char* out_dir, const nf_options* opt,
                         nf_command_result* result) {
  return guarded([&] {
    need(command, "command");
    need(scenario_path, "scenario path");
    need(out_dir, "output directory");
    const netflow::CommandResult r = netflow::run_command(command, scenario_path, out_dir, to_options(opt));
    std::string s;
    for (const auto& [k, v] : r.summary) s += k + "\t" + v + "\n";
    last_summary = std::move(s);
    if (result) {
      result->stop = r.stop ? to_c(r.stop->kind) : NF_STOP_NONE;
      result->stop_time = r.stop ? r.stop->time : 0.0;
      result->files_written = static_cast<int>(r.files.size());
    }
  });
}

size_t nf_last_summary(char* buf, size_t size) {
  if (buf && size > 0) {
    const size_t n = std::min(size - 1, last_summary.size());
    std::memcpy(buf, last_summary.data(), n);
    buf[n] = '\0';
  }
  return last_summary.size();
}

nf_status nf_network_load(const char* path, nf_network** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    netflow::Scenario sc = netflow::load_scenario(path);
    *out = new nf_network{std::move(sc.net), sc.time};
  });
}

nf_status nf_network_save(const nf_network* net, const char* path) {
  return guarded([&] {
    need(net, "network");
    need(path, "path");
    netflow::save_network(path, net->net, net->time);
  });
}

void nf_network_free(nf_network* net) { delete net; }

nf_status nf_network_counts(const nf_network* net, int* dim, int* vertices, int* edges, int* nodes) {
  return guarded([&] {
    need(net, "network");
    if (dim) *dim = net->net.dim;
    if (vertices) *vertices = static_cast<int>(net->net.vertices.size());
    if (edges) *edges = static_cast<int>(net->net.edges.size());
    if (nodes) *nodes = net->net.node_count();
  });
}

nf_status nf_network_length(const nf_network* net, double* length) {
  return guarded([&] {
    need(net, "network");
    need(length, "length");
    *length = net->net.total_length();
  });
}

nf_status nf_network_gaussian(const nf_network* net, const double* x, int dim, double r, double* value) {
  return guarded([&] {
    need(net, "network");
    need(value, "value");
    if (dim != net->net.dim) netflow::fail("centre dimension does not match the network");
    if (!(r > 0.0)) netflow::fail("scale must be positive");
    *value = netflow::gaussian_integral(net->net, point_of(x, dim), r);
  });
}

nf_status nf_simulate(const nf_network* net, double t_end, const nf_options* opt, nf_trajectory** out,
                      nf_stop_kind* stop) {
  return guarded([&] {
    need(net, "network");
    need(out, "out");
    *out = nullptr;
    const netflow::CommandOptions o = to_options(opt);
    netflow::StepParams sp;
    if (o.cfl) sp.cfl = *o.cfl;
    if (o.target_h) sp.target_h = *o.target_h;
    sp.check();
    netflow::Monitors mon;
    if (o.zeta) mon.zeta = *o.zeta;
    const std::vector<double> snaps = o.snapshots.value_or(std::vector<double>{});
    netflow::RunResult rr = netflow::run(netflow::make_state(net->net, net->time.value_or(0.0)), t_end, sp, mon, snaps);
    if (stop) *stop = rr.stop ? to_c(rr.stop->kind) : NF_STOP_NONE;
    *out = new nf_trajectory{std::move(rr.trajectory)};
  });
}

void nf_trajectory_free(nf_trajectory* traj) { delete traj; }

nf_status nf_trajectory_size(const nf_trajectory* traj, size_t* count) {
  return guarded([&] {
    need(traj, "trajectory");
    need(count, "count");
    *count = traj->traj.snapshots.size();
  });
}

nf_status nf_trajectory_time(const nf_trajectory* traj, size_t index, double* t) {
  return guarded([&] {
    need(traj, "trajectory");
    need(t, "t");
    if (index >= traj->traj.snapshots.size()) netflow::fail("snapshot index out of range");
    *t = traj->traj.snapshots[index].t;
  });
}

nf_status nf_trajectory_snapshot(const nf_trajectory* traj, size_t index, nf_network** out) {
  return guarded([&] {
    need(traj, "trajectory");
    need(out, "out");
    *out = nullptr;
    if (index >= traj->traj.snapshots.size()) netflow::fail("snapshot index out of range");
    const auto& s = traj->traj.snapshots[index];
    *out = new nf_network{s.net, s.t};
  });
}

nf_status nf_density_ratio(const nf_trajectory* traj, const double* x, int dim, double t, double r, double* value) {
  return guarded([&] {
    need(traj, "trajectory");
    need(value, "value");
    if (traj->traj.empty()) netflow::fail("empty trajectory");
    if (dim != traj->traj.snapshots.front().net.dim) netflow::fail("centre dimension does not match the trajectory");
    if (!(r > 0.0)) netflow::fail("scale must be positive");
    *value = netflow::gaussian_density_ratio(traj->traj, {point_of(x, dim), t}, r).value;
  });
}

}  // extern "C"
