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

#ifndef COLA_EXPERIMENT_HPP_
#define COLA_EXPERIMENT_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cola/algorithms.hpp"
#include "cola/analysis.hpp"
#include "cola/config.hpp"
#include "cola/graph.hpp"
#include "cola/problems.hpp"

namespace cola {

// Everything the algorithms of one replicate share.
struct Instance {
  std::uint64_t topology_seed = 0;
  std::uint64_t problem_seed = 0;
  Network network;
  std::shared_ptr<const LocalCostOracle> problem;
  IncidenceSet incidence;
  SpectralInfo spectral;
  ProblemConstants constants;
  Vec xstar;
};

Instance make_instance(const ExperimentConfig& cfg, int replicate);

// Least squares: direct solve. Otherwise the final iterate of a long
// uncensored linearized run (rho = M, c = 1) refined by centralized gradient
// descent to ||sum grad|| <= tolerance.
Vec reference_solution(const Network& net, const LocalCostOracle& problem,
                       double tolerance, long reference_iters);

struct RunRecord {
  int replicate = 0;
  AlgorithmSpec algorithm;
  RunTrace trace;
  AlgoState final_state;
};

struct ComparisonRow {
  std::string algorithm;
  std::string replicate;  // index, or "median"
  std::optional<long> iterations_to_target;
  std::optional<long> broadcasts_to_target;
  std::optional<double> wall_ms_to_target;
  double final_accuracy = 0.0;
  std::string status;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<ComparisonRow> table;
  std::vector<Instance> instances;
  std::uint64_t config_hash = 0;
  double target_accuracy = 0.0;

  bool any_failed() const;
};

RunRecord run_one(const ExperimentConfig& cfg, const Instance& inst,
                  const AlgorithmSpec& algo, int replicate);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<ComparisonRow> comparison_table(
    const std::vector<RunRecord>& runs,
    const std::vector<AlgorithmSpec>& algorithms, double target);

std::string format_table(const std::vector<ComparisonRow>& table);

// Writes per-run traces plus comparison.csv into `dir` (created if needed).
void write_experiment(const ExperimentResult& result, const std::string& dir);

// Human-readable constants and parameter checks for every algorithm on the
// first replicate's instance.
std::string validation_report(const ExperimentConfig& cfg);

}  // namespace cola

#endif  // COLA_EXPERIMENT_HPP_
