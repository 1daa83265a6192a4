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

#include "cola_sim.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>

#include "cola/analysis.hpp"
#include "cola/censoring.hpp"
#include "cola/config.hpp"
#include "cola/error.hpp"
#include "cola/experiment.hpp"
#include "cola/graph.hpp"
#include "cola/problems.hpp"

struct cola_config {
  cola::ExperimentConfig cfg;
};

struct cola_experiment {
  cola::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

cola_status status_of(cola::ErrorCode code) {
  switch (code) {
    case cola::ErrorCode::kInvalidArgument: return COLA_ERR_INVALID_ARGUMENT;
    case cola::ErrorCode::kConfig: return COLA_ERR_CONFIG;
    case cola::ErrorCode::kDiverged: return COLA_ERR_DIVERGED;
    case cola::ErrorCode::kIo: return COLA_ERR_IO;
    case cola::ErrorCode::kNotConverged: return COLA_ERR_NOT_CONVERGED;
    case cola::ErrorCode::kNumerical: return COLA_ERR_NUMERICAL;
  }
  return COLA_ERR_INTERNAL;
}

cola_status fail_with(cola_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
cola_status guarded(F&& body) {
  try {
    body();
    return COLA_OK;
  } catch (const cola::Error& e) {
    return fail_with(status_of(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail_with(COLA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail_with(COLA_ERR_INTERNAL, "unknown error");
  }
}

cola_status copy_out(const std::string& text, char* buf, size_t cap,
                     size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  return COLA_OK;
}

void copy_fixed(char* dst, size_t cap, const std::string& src) {
  const size_t n = std::min(cap - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

#define COLA_REQUIRE_ARG(cond, what)                                    \
  do {                                                                  \
    if (!(cond)) return fail_with(COLA_ERR_INVALID_ARGUMENT, (what));   \
  } while (0)

}  // namespace

extern "C" {

const char* cola_version(void) { return "1.0.0"; }

const char* cola_last_error(void) { return g_last_error.c_str(); }

const char* cola_status_name(cola_status status) {
  switch (status) {
    case COLA_OK: return "ok";
    case COLA_ERR_CONFIG: return "config error";
    case COLA_ERR_DIVERGED: return "diverged";
    case COLA_ERR_IO: return "io error";
    case COLA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case COLA_ERR_NOT_CONVERGED: return "not converged";
    case COLA_ERR_NUMERICAL: return "numerical error";
    case COLA_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

cola_status cola_config_load_file(const char* path, cola_config** out) {
  COLA_REQUIRE_ARG(path && out, "cola_config_load_file: null argument");
  *out = nullptr;
  return guarded([&] { *out = new cola_config{cola::load_config(path)}; });
}

cola_status cola_config_load_text(const char* text, cola_config** out) {
  COLA_REQUIRE_ARG(text && out, "cola_config_load_text: null argument");
  *out = nullptr;
  return guarded([&] { *out = new cola_config{cola::parse_config(text)}; });
}

cola_status cola_config_set(cola_config* cfg, const char* key,
                            const char* value) {
  COLA_REQUIRE_ARG(cfg && key && value, "cola_config_set: null argument");
  return guarded([&] {
    cfg->cfg = cola::with_overrides(cfg->cfg, {{key, value}});
  });
}

cola_status cola_config_get(const cola_config* cfg, const char* key,
                            char* buf, size_t cap, size_t* needed) {
  COLA_REQUIRE_ARG(cfg && key, "cola_config_get: null argument");
  const auto value = cfg->cfg.get(key);
  if (!value)
    return fail_with(COLA_ERR_INVALID_ARGUMENT,
                     std::string("key not set: ") + key);
  return copy_out(*value, buf, cap, needed);
}

size_t cola_config_algorithm_count(const cola_config* cfg) {
  return cfg ? cfg->cfg.algorithms.size() : 0;
}

uint64_t cola_config_hash(const cola_config* cfg) {
  return cfg ? cfg->cfg.hash() : 0;
}

cola_status cola_config_validate(const cola_config* cfg, char* buf,
                                 size_t cap, size_t* needed) {
  COLA_REQUIRE_ARG(cfg, "cola_config_validate: null config");
  std::string report;
  const cola_status st =
      guarded([&] { report = cola::validation_report(cfg->cfg); });
  if (st != COLA_OK) return st;
  return copy_out(report, buf, cap, needed);
}

void cola_config_free(cola_config* cfg) { delete cfg; }

cola_status cola_experiment_run(const cola_config* cfg,
                                cola_experiment** out) {
  COLA_REQUIRE_ARG(cfg && out, "cola_experiment_run: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new cola_experiment{cola::run_experiment(cfg->cfg)};
  });
}

size_t cola_experiment_run_count(const cola_experiment* exp) {
  return exp ? exp->result.runs.size() : 0;
}

cola_status cola_experiment_run_info(const cola_experiment* exp, size_t index,
                                     cola_run_info* info) {
  COLA_REQUIRE_ARG(exp && info, "cola_experiment_run_info: null argument");
  COLA_REQUIRE_ARG(index < exp->result.runs.size(), "run index out of range");
  const auto& run = exp->result.runs[index];
  *info = cola_run_info{};
  copy_fixed(info->label, sizeof info->label, run.algorithm.label);
  copy_fixed(info->algorithm, sizeof info->algorithm,
             cola::to_string(run.algorithm.kind));
  info->replicate = run.replicate;
  info->status = run.trace.status == cola::RunStatus::kOk ? COLA_RUN_OK
                 : run.trace.status == cola::RunStatus::kDiverged
                     ? COLA_RUN_DIVERGED
                     : COLA_RUN_FAILED;
  info->rows = run.trace.rows.size();
  info->iterations = run.trace.iterations();
  info->final_accuracy =
      run.trace.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                             : run.trace.rows.back().accuracy;
  if (const auto* hit = run.trace.first_reaching(exp->result.target_accuracy)) {
    info->iterations_to_target = hit->k;
    info->broadcasts_to_target = hit->cum_broadcasts;
    info->wall_ms_to_target = hit->wall_ms;
  } else {
    info->iterations_to_target = -1;
    info->broadcasts_to_target = -1;
    info->wall_ms_to_target = -1.0;
  }
  return COLA_OK;
}

cola_status cola_experiment_trace_row(const cola_experiment* exp,
                                      size_t index, size_t row,
                                      cola_trace_row* out) {
  COLA_REQUIRE_ARG(exp && out, "cola_experiment_trace_row: null argument");
  COLA_REQUIRE_ARG(index < exp->result.runs.size(), "run index out of range");
  const auto& rows = exp->result.runs[index].trace.rows;
  COLA_REQUIRE_ARG(row < rows.size(), "trace row out of range");
  const auto& r = rows[row];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  *out = cola_trace_row{r.k,
                        r.accuracy,
                        r.broadcasts,
                        r.cum_broadcasts,
                        r.energy.value_or(nan),
                        r.r_grad.value_or(nan),
                        r.r_cons.value_or(nan),
                        r.wall_ms};
  return COLA_OK;
}

cola_status cola_experiment_pattern(const cola_experiment* exp, size_t index,
                                    size_t round, size_t node, int* out) {
  COLA_REQUIRE_ARG(exp && out, "cola_experiment_pattern: null argument");
  COLA_REQUIRE_ARG(index < exp->result.runs.size(), "run index out of range");
  const auto& pattern = exp->result.runs[index].trace.pattern;
  COLA_REQUIRE_ARG(round >= 1 && round <= pattern.size(),
                   "round out of range (pattern recorded?)");
  COLA_REQUIRE_ARG(node < pattern[round - 1].size(), "node out of range");
  *out = pattern[round - 1][node];
  return COLA_OK;
}

int cola_experiment_any_failed(const cola_experiment* exp) {
  return exp && exp->result.any_failed() ? 1 : 0;
}

cola_status cola_experiment_table(const cola_experiment* exp, char* buf,
                                  size_t cap, size_t* needed) {
  COLA_REQUIRE_ARG(exp, "cola_experiment_table: null experiment");
  return copy_out(cola::format_table(exp->result.table), buf, cap, needed);
}

cola_status cola_experiment_write(const cola_experiment* exp,
                                  const char* dir) {
  COLA_REQUIRE_ARG(exp && dir, "cola_experiment_write: null argument");
  return guarded([&] { cola::write_experiment(exp->result, dir); });
}

void cola_experiment_free(cola_experiment* exp) { delete exp; }

cola_status cola_generate_instance(const cola_instance_spec* spec,
                                   const char* dir) {
  COLA_REQUIRE_ARG(spec && dir && spec->topology && spec->problem,
                   "cola_generate_instance: null argument");
  return guarded([&] {
    const auto kind = cola::parse_topology_kind(spec->topology);
    std::optional<double> fraction;
    if (kind == cola::TopologyKind::kRandom) fraction = spec->edge_fraction;
    const auto net =
        cola::build_topology(kind, spec->n, fraction, spec->topology_seed);
    std::shared_ptr<cola::LocalCostOracle> problem;
    const std::string pk = spec->problem;
    if (pk == "ls")
      problem = cola::ls_generate(spec->n, spec->p, spec->problem_seed);
    else if (pk == "logistic")
      problem = cola::lr_generate(spec->n, spec->p, spec->problem_seed);
    else
      cola::fail(cola::ErrorCode::kInvalidArgument,
                 "unknown problem kind '" + pk + "' (expected ls|logistic)");
    cola::write_problem(*problem, dir);
    cola::write_network(
        net, (std::filesystem::path(dir) / "network.csv").string());
  });
}

cola_status cola_threshold_at(const char* kind, double alpha, double beta,
                              double r, long k, double* out) {
  COLA_REQUIRE_ARG(kind && out, "cola_threshold_at: null argument");
  return guarded([&] {
    const auto sk = cola::parse_schedule_kind(kind);
    const auto sched =
        sk == cola::ScheduleKind::kLinear ? cola::ThresholdSchedule::linear(alpha, beta)
        : sk == cola::ScheduleKind::kSublinear
            ? cola::ThresholdSchedule::sublinear(alpha, r)
            : cola::ThresholdSchedule::zero();
    *out = sched.at(k);
  });
}

cola_status cola_delta_bound(double kappa_f, double kappa_G, double beta,
                             double* out) {
  COLA_REQUIRE_ARG(out, "cola_delta_bound: null argument");
  return guarded([&] { *out = cola::delta_bound(kappa_f, kappa_G, beta); });
}

}  // extern "C"
