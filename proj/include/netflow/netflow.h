/* Copyright 2026 The netflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the netflow library. Objects are opaque handles owned by
 * the caller and released with the matching *_free function. Every call
 * returns an nf_status; on failure nf_last_error() describes the problem
 * (the message is per thread and valid until the next failing call). */

#ifndef NETFLOW_NETFLOW_H
#define NETFLOW_NETFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NF_API __declspec(dllexport)
#else
#define NF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nf_status {
  NF_OK = 0,
  NF_INVALID_ARGUMENT = 1,
  NF_DOMAIN = 2,
  NF_PARSE = 3,
  NF_IO = 4,
  NF_INTERNAL = 5
} nf_status;

typedef enum nf_stop_kind {
  NF_STOP_NONE = 0,
  NF_STOP_CURVATURE_BLOWUP = 1,
  NF_STOP_JUNCTION_COLLISION = 2,
  NF_STOP_EMBEDDEDNESS_LOSS = 3,
  NF_STOP_EDGE_COLLAPSE = 4,
  NF_STOP_DENSITY_EXCEEDS_ZETA = 5
} nf_stop_kind;

typedef struct nf_network nf_network;
typedef struct nf_trajectory nf_trajectory;

/* Overrides for scenario parameters. A field is used only when its has_*
 * flag is nonzero. `snapshots` is borrowed for the duration of the call. */
typedef struct nf_options {
  int has_zeta;
  double zeta;
  int has_cfl;
  double cfl;
  int has_target_h;
  double target_h;
  int has_epsilon;
  double epsilon;
  int has_z_max;
  double z_max;
  int has_seed;
  uint64_t seed;
  const double* snapshots;
  size_t snapshot_count; /* 0 keeps the scenario's snapshot list */
} nf_options;

typedef struct nf_command_result {
  nf_stop_kind stop;
  double stop_time;
  int files_written;
} nf_command_result;

NF_API const char* nf_version(void);
NF_API const char* nf_format_version(void);
NF_API const char* nf_last_error(void);
NF_API const char* nf_status_name(nf_status status);
NF_API const char* nf_stop_name(nf_stop_kind kind);
/* 0 for NF_STOP_NONE, a distinct value in [10, 14] otherwise. */
NF_API int nf_exit_code_for_stop(nf_stop_kind kind);

NF_API void nf_options_init(nf_options* opt);

/* Subcommand drivers: "simulate", "analyze", "regularize", "translate",
 * "multiplicity" or "convergence". Writes tables into out_dir (created if
 * missing). `result` may be NULL. */
NF_API nf_status nf_run_command(const char* command, const char* scenario_path, const char* out_dir,
                                const nf_options* opt, nf_command_result* result);
/* Writes the summary table of the last successful nf_run_command on this
 * thread into buf as "key\tvalue" lines; returns the full length needed. */
NF_API size_t nf_last_summary(char* buf, size_t size);

NF_API nf_status nf_network_load(const char* path, nf_network** out);
NF_API nf_status nf_network_save(const nf_network* net, const char* path);
NF_API void nf_network_free(nf_network* net);
NF_API nf_status nf_network_counts(const nf_network* net, int* dim, int* vertices, int* edges, int* nodes);
NF_API nf_status nf_network_length(const nf_network* net, double* length);
/* Integral of the backwards heat kernel with tau = r^2 centred at x
 * (dim coordinates) over the network. */
NF_API nf_status nf_network_gaussian(const nf_network* net, const double* x, int dim, double r, double* value);

/* Flows a copy of `net` to t_end. `stop` may be NULL. */
NF_API nf_status nf_simulate(const nf_network* net, double t_end, const nf_options* opt, nf_trajectory** out,
                             nf_stop_kind* stop);
NF_API void nf_trajectory_free(nf_trajectory* traj);
NF_API nf_status nf_trajectory_size(const nf_trajectory* traj, size_t* count);
NF_API nf_status nf_trajectory_time(const nf_trajectory* traj, size_t index, double* t);
/* New handle holding a copy of the snapshot network. */
NF_API nf_status nf_trajectory_snapshot(const nf_trajectory* traj, size_t index, nf_network** out);
NF_API nf_status nf_density_ratio(const nf_trajectory* traj, const double* x, int dim, double t, double r,
                                  double* value);

#ifdef __cplusplus
}
#endif

#endif /* NETFLOW_NETFLOW_H */
