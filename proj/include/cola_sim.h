/*
 * Copyright 2026 The cola-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the cola-sim library: experiment configuration, execution,
 * result inspection and instance generation. All objects are opaque handles
 * released with the matching *_free function. Functions return a
 * cola_status; on failure cola_last_error() describes the problem (the
 * message is per thread and valid until the next failing call on it).
 *
 * String outputs follow snprintf conventions: at most cap-1 bytes plus a
 * terminating NUL are written and *needed (when not NULL) receives the full
 * size including the NUL.
 */

#ifndef COLA_SIM_H_
#define COLA_SIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define COLA_SIM_API __declspec(dllexport)
#else
#define COLA_SIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cola_status {
  COLA_OK = 0,
  COLA_ERR_CONFIG = 1,
  COLA_ERR_DIVERGED = 2,
  COLA_ERR_IO = 3,
  COLA_ERR_INVALID_ARGUMENT = 4,
  COLA_ERR_NOT_CONVERGED = 5,
  COLA_ERR_NUMERICAL = 6,
  COLA_ERR_INTERNAL = 7
} cola_status;

typedef enum cola_run_status {
  COLA_RUN_OK = 0,
  COLA_RUN_DIVERGED = 1,
  COLA_RUN_FAILED = 2
} cola_run_status;

typedef struct cola_config cola_config;
typedef struct cola_experiment cola_experiment;

typedef struct cola_run_info {
  char label[64];
  char algorithm[16];
  int replicate;
  cola_run_status status;
  size_t rows;                   /* trace rows, including row 0 */
  long iterations;
  long iterations_to_target;     /* -1 when the target was not reached */
  long broadcasts_to_target;     /* -1 when the target was not reached */
  double wall_ms_to_target;      /* negative when the target was not reached */
  double final_accuracy;
} cola_run_info;

typedef struct cola_trace_row {
  long k;
  double accuracy;
  long broadcasts;
  long cum_broadcasts;
  double energy;   /* NaN when not recorded */
  double r_grad;   /* NaN when not recorded */
  double r_cons;   /* NaN when not recorded */
  double wall_ms;
} cola_trace_row;

typedef struct cola_instance_spec {
  const char* topology;   /* line | star | complete | random */
  int n;
  double edge_fraction;   /* random only; ignored otherwise */
  uint64_t topology_seed;
  const char* problem;    /* ls | logistic */
  int p;
  uint64_t problem_seed;
} cola_instance_spec;

COLA_SIM_API const char* cola_version(void);
COLA_SIM_API const char* cola_last_error(void);
COLA_SIM_API const char* cola_status_name(cola_status status);

/* Configuration */
COLA_SIM_API cola_status cola_config_load_file(const char* path,
                                               cola_config** out);
COLA_SIM_API cola_status cola_config_load_text(const char* text,
                                               cola_config** out);
/* Overrides one dotted key and re-validates; the handle is unchanged on
 * failure. */
COLA_SIM_API cola_status cola_config_set(cola_config* cfg, const char* key,
                                         const char* value);
COLA_SIM_API cola_status cola_config_get(const cola_config* cfg,
                                         const char* key, char* buf,
                                         size_t cap, size_t* needed);
COLA_SIM_API size_t cola_config_algorithm_count(const cola_config* cfg);
COLA_SIM_API uint64_t cola_config_hash(const cola_config* cfg);
/* Problem constants, spectral constants and parameter checks. */
COLA_SIM_API cola_status cola_config_validate(const cola_config* cfg,
                                              char* buf, size_t cap,
                                              size_t* needed);
COLA_SIM_API void cola_config_free(cola_config* cfg);

/* Experiments. Engine aborts are recorded per run and do not fail the
 * call; see cola_experiment_any_failed. */
COLA_SIM_API cola_status cola_experiment_run(const cola_config* cfg,
                                             cola_experiment** out);
COLA_SIM_API size_t cola_experiment_run_count(const cola_experiment* exp);
COLA_SIM_API cola_status cola_experiment_run_info(const cola_experiment* exp,
                                                  size_t index,
                                                  cola_run_info* info);
COLA_SIM_API cola_status cola_experiment_trace_row(const cola_experiment* exp,
                                                   size_t index, size_t row,
                                                   cola_trace_row* out);
/* 0/1 broadcast flag of `node` in round `round` (>= 1). */
COLA_SIM_API cola_status cola_experiment_pattern(const cola_experiment* exp,
                                                 size_t index, size_t round,
                                                 size_t node, int* out);
COLA_SIM_API int cola_experiment_any_failed(const cola_experiment* exp);
COLA_SIM_API cola_status cola_experiment_table(const cola_experiment* exp,
                                               char* buf, size_t cap,
                                               size_t* needed);
COLA_SIM_API cola_status cola_experiment_write(const cola_experiment* exp,
                                               const char* dir);
COLA_SIM_API void cola_experiment_free(cola_experiment* exp);

/* Writes network.csv plus problem files for a generated instance. */
COLA_SIM_API cola_status cola_generate_instance(const cola_instance_spec* spec,
                                                const char* dir);

/* Scalar helpers. kind: "linear" | "sublinear" | "zero". */
COLA_SIM_API cola_status cola_threshold_at(const char* kind, double alpha,
                                           double beta, double r, long k,
                                           double* out);
COLA_SIM_API cola_status cola_delta_bound(double kappa_f, double kappa_G,
                                          double beta, double* out);

#ifdef __cplusplus
}
#endif

#endif /* COLA_SIM_H_ */
