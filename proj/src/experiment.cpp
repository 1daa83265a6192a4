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

#include "cola/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "cola/error.hpp"
#include "cola/format.hpp"
#include "cola/trace_io.hpp"

namespace cola {

namespace {

std::string num(double v) { return shortest(v); }

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Vec reference_solution(const Network& net, const LocalCostOracle& problem,
                       double tolerance, long reference_iters) {
  if (dynamic_cast<const LeastSquaresProblem*>(&problem))
    return solve_centralized(problem, tolerance);

  std::optional<Vec> warm;
  if (reference_iters > 0) {
    AlgorithmSpec dlm;
    dlm.kind = AlgorithmKind::kDlm;
    dlm.params.c = 1.0;
    dlm.params.rho = problem.constants().M;
    AlgoState s = AlgoState::zeros(problem.dimension(), net.node_count());
    for (long k = 0; k < reference_iters; ++k)
      s = cola_round(s, net, problem, dlm.params, 0.0).state;
    if (s.x.allFinite()) warm = Vec(s.x.rowwise().mean());
  }
  return solve_centralized(problem, tolerance, warm);
}

Instance make_instance(const ExperimentConfig& cfg, int replicate) {
  std::uint64_t topology_seed = 0, problem_seed = 0;
  std::shared_ptr<const LocalCostOracle> problem;
  std::optional<Network> net;
  if (cfg.instance_dir) {
    namespace fs = std::filesystem;
    net = read_network((fs::path(*cfg.instance_dir) / "network.csv").string());
    problem = read_problem(*cfg.instance_dir);
    if (problem->node_count() != net->node_count())
      fail(ErrorCode::kIo, "instance network/problem node counts differ");
  } else {
    topology_seed = cfg.topology.seed + static_cast<std::uint64_t>(replicate);
    problem_seed = cfg.problem.seed + static_cast<std::uint64_t>(replicate);
    net = build_topology(cfg.topology.kind, cfg.topology.n,
                         cfg.topology.edge_fraction, topology_seed);
    if (cfg.problem.kind == "ls")
      problem = ls_generate(cfg.topology.n, cfg.problem.p, problem_seed);
    else
      problem = lr_generate(cfg.topology.n, cfg.problem.p, problem_seed);
  }
  IncidenceSet inc = incidence_set(*net, problem->dimension());
  SpectralInfo spec = spectral_info(inc);
  Vec xstar = reference_solution(*net, *problem, cfg.xstar_tolerance,
                                 cfg.xstar_reference_iters);
  return Instance{topology_seed, problem_seed, std::move(*net), problem,
                  std::move(inc), spec, problem->constants(), std::move(xstar)};
}

RunRecord run_one(const ExperimentConfig& cfg, const Instance& inst,
                  const AlgorithmSpec& algo, int replicate) {
  RunRecord rec;
  rec.replicate = replicate;
  rec.algorithm = algo;

  StopCriteria stop;
  stop.max_iter = cfg.max_iter;
  stop.target_accuracy = cfg.early_stop ? cfg.target_accuracy : 0.0;

  RunOptions opts;
  opts.record_pattern = cfg.censor_pattern;
  opts.unit = cfg.broadcast_unit;
  std::optional<EnergyEvaluator> energy;
  if (cfg.record_energy && is_linearized(algo.kind))
    energy.emplace(inst.incidence, *inst.problem, inst.xstar, algo.params.c,
                   algo.params.rho);
  const bool kkt = cfg.record_kkt && has_dual(algo.kind);
  if (energy || kkt) {
    opts.observer = [&](const AlgoState& s, TraceRow& row) {
      if (energy) row.energy = (*energy)(s.x, s.mu).V;
      if (kkt) {
        const auto res = kkt_residuals(s.x, s.mu, *inst.problem, inst.incidence);
        row.r_grad = res.r_grad;
        row.r_cons = res.r_cons;
      }
    };
  }

  RunOutput out;
  try {
    out = run(algo, inst.network, *inst.problem, stop, inst.xstar, opts);
  } catch (const Error& e) {
    out.trace.label = algo.label;
    out.trace.status = RunStatus::kFailed;
    out.trace.message = e.what();
  }
  rec.trace = std::move(out.trace);
  rec.final_state = std::move(out.final_state);

  const auto schedule_text =
      (algo.kind == AlgorithmKind::kDlm || algo.kind == AlgorithmKind::kAdmm)
          ? ThresholdSchedule::zero().describe()
          : algo.schedule.describe();
  const ParamReport report = validate_params(
      algo.params.c, algo.params.rho, inst.constants, inst.spectral,
      algo.schedule);
  auto& md = rec.trace.metadata;
  md = {
      {"config_hash", hex(cfg.hash())},
      {"label", algo.label},
      {"algorithm", to_string(algo.kind)},
      {"replicate", std::to_string(replicate)},
      {"topology_seed", std::to_string(inst.topology_seed)},
      {"problem_seed", std::to_string(inst.problem_seed)},
      {"nodes", std::to_string(inst.network.node_count())},
      {"arcs", std::to_string(inst.network.arc_count())},
      {"p", std::to_string(inst.problem->dimension())},
      {"c", num(algo.params.c)},
      {"rho", is_linearized(algo.kind) ? num(algo.params.rho) : "n/a"},
      {"schedule", schedule_text},
      {"M", num(inst.constants.M)},
      {"m", num(inst.constants.m)},
      {"lambda_min_Lu", num(inst.spectral.lambda_min_Lu)},
      {"sigma_max_Go", num(inst.spectral.sigma_max_Go)},
      {"sigma_max_Gu", num(inst.spectral.sigma_max_Gu)},
      {"sigma_min_nz_Go", num(inst.spectral.sigma_min_nz_Go)},
      {"kappa_G", num(inst.spectral.kappa_G)},
      {"thm1_ok", report.thm1_ok ? "true" : "false"},
      {"thm2_ok", report.thm2_ok ? "true" : "false"},
      {"delta_bound", report.delta_bound ? num(*report.delta_bound) : "n/a"},
      {"status", to_string(rec.trace.status)},
      {"message", rec.trace.message},
      {"iterations", std::to_string(rec.trace.iterations())},
  };
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.config_hash = cfg.hash();
  result.target_accuracy = cfg.target_accuracy;
  for (int r = 0; r < cfg.replicates; ++r)
    result.instances.push_back(make_instance(cfg, r));

  const std::size_t per = cfg.algorithms.size();
  const std::size_t jobs = per * static_cast<std::size_t>(cfg.replicates);
  result.runs.resize(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const int rep = static_cast<int>(j / per);
      result.runs[j] =
          run_one(cfg, result.instances[rep], cfg.algorithms[j % per], rep);
    }
  };
  const int threads = std::min<int>(cfg.threads, static_cast<int>(jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  result.table =
      comparison_table(result.runs, cfg.algorithms, cfg.target_accuracy);
  return result;
}

bool ExperimentResult::any_failed() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) {
    return r.trace.status != RunStatus::kOk;
  });
}

namespace {

template <typename T>
std::optional<T> median_of(std::vector<std::optional<T>> values) {
  // Missing values (target never reached) sort last, as +infinity.
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
  });
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  const auto& lo = values[n / 2 - 1];
  const auto& hi = values[n / 2];
  if (!lo || !hi) return std::nullopt;
  return static_cast<T>((*lo + *hi) / 2);
}

}  // namespace

std::vector<ComparisonRow> comparison_table(
    const std::vector<RunRecord>& runs,
    const std::vector<AlgorithmSpec>& algorithms, double target) {
  std::vector<ComparisonRow> table;
  for (const auto& algo : algorithms) {
    std::vector<std::optional<long>> iters, casts;
    std::vector<std::optional<double>> walls;
    std::vector<double> finals;
    int count = 0;
    for (const auto& run : runs) {
      if (run.algorithm.label != algo.label) continue;
      ComparisonRow row;
      row.algorithm = algo.label;
      row.replicate = std::to_string(run.replicate);
      row.status = to_string(run.trace.status);
      if (!run.trace.rows.empty())
        row.final_accuracy = run.trace.rows.back().accuracy;
      if (const TraceRow* hit = run.trace.first_reaching(target)) {
        row.iterations_to_target = hit->k;
        row.broadcasts_to_target = hit->cum_broadcasts;
        row.wall_ms_to_target = hit->wall_ms;
      }
      iters.push_back(row.iterations_to_target);
      casts.push_back(row.broadcasts_to_target);
      walls.push_back(row.wall_ms_to_target);
      finals.push_back(row.final_accuracy);
      table.push_back(row);
      ++count;
    }
    if (count > 1) {
      ComparisonRow med;
      med.algorithm = algo.label;
      med.replicate = "median";
      med.iterations_to_target = median_of(iters);
      med.broadcasts_to_target = median_of(casts);
      med.wall_ms_to_target = median_of(walls);
      std::sort(finals.begin(), finals.end());
      med.final_accuracy = finals.size() % 2
                               ? finals[finals.size() / 2]
                               : 0.5 * (finals[finals.size() / 2 - 1] +
                                        finals[finals.size() / 2]);
      med.status = "";
      table.push_back(med);
    }
  }
  return table;
}

std::string format_table(const std::vector<ComparisonRow>& table) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-8s %12s %14s %14s %14s %s\n",
                "algorithm", "rep", "iters", "broadcasts", "wall_ms",
                "final_acc", "status");
  out << line;
  for (const auto& r : table) {
    auto opt_l = [](const std::optional<long>& v) {
      return v ? std::to_string(*v) : std::string("-");
    };
    char wall[32] = "-";
    if (r.wall_ms_to_target)
      std::snprintf(wall, sizeof wall, "%.3f", *r.wall_ms_to_target);
    std::snprintf(line, sizeof line, "%-12s %-8s %12s %14s %14s %14.4e %s\n",
                  r.algorithm.c_str(), r.replicate.c_str(),
                  opt_l(r.iterations_to_target).c_str(),
                  opt_l(r.broadcasts_to_target).c_str(), wall,
                  r.final_accuracy, r.status.c_str());
    out << line;
  }
  return out.str();
}

void write_experiment(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  for (const auto& run : result.runs) {
    const auto stem = (fs::path(dir) / (run.algorithm.label + "_r" +
                                        std::to_string(run.replicate)))
                          .string();
    emit_trace(run.trace, stem);
  }
  const auto path = (fs::path(dir) / "comparison.csv").string();
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << "algorithm,replicate,iterations_to_target,broadcasts_to_target,"
         "wall_ms_to_target,final_accuracy,status\n";
  for (const auto& r : result.table) {
    out << r.algorithm << ',' << r.replicate << ','
        << (r.iterations_to_target ? std::to_string(*r.iterations_to_target) : "")
        << ','
        << (r.broadcasts_to_target ? std::to_string(*r.broadcasts_to_target) : "")
        << ',' << (r.wall_ms_to_target ? num(*r.wall_ms_to_target) : "") << ','
        << num(r.final_accuracy) << ',' << r.status << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "failed writing " + path);
}

std::string validation_report(const ExperimentConfig& cfg) {
  const Instance inst = make_instance(cfg, 0);
  std::ostringstream out;
  out.precision(10);
  out << "nodes = " << inst.network.node_count()
      << "\narcs = " << inst.network.arc_count()
      << "\np = " << inst.problem->dimension() << "\nM = " << inst.constants.M
      << "\nm = " << inst.constants.m
      << "\nkappa_f = " << inst.constants.kappa_f()
      << "\nlambda_min_Lu = " << inst.spectral.lambda_min_Lu
      << "\nsigma_max_Go = " << inst.spectral.sigma_max_Go
      << "\nsigma_max_Gu = " << inst.spectral.sigma_max_Gu
      << "\nsigma_min_nz_Go = " << inst.spectral.sigma_min_nz_Go
      << "\nkappa_G = " << inst.spectral.kappa_G << "\n";
  for (const auto& algo : cfg.algorithms) {
    out << "\n[" << algo.label << "] " << to_string(algo.kind) << "\n";
    if (!is_linearized(algo.kind)) {
      out << "parameter conditions apply to cola/dlm only\n";
      continue;
    }
    out << "c = " << algo.params.c << "\nrho = " << algo.params.rho
        << "\nschedule = " << algo.schedule.describe() << "\n"
        << validate_params(algo.params.c, algo.params.rho, inst.constants,
                           inst.spectral, algo.schedule)
               .summary();
  }
  return out.str();
}

}  // namespace cola
