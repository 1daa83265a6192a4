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

#ifndef COLA_ALGORITHMS_HPP_
#define COLA_ALGORITHMS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cola/censoring.hpp"
#include "cola/graph.hpp"
#include "cola/problems.hpp"
#include "cola/trace.hpp"

namespace cola {

// DLM and ADMM are the zero-threshold cases of COLA and COCA; they run on the
// same engines.
enum class AlgorithmKind { kCola, kDlm, kCoca, kAdmm, kEtsd };

AlgorithmKind parse_algorithm_kind(const std::string& name);
std::string to_string(AlgorithmKind kind);
bool is_linearized(AlgorithmKind kind);  // cola, dlm
bool is_exact(AlgorithmKind kind);       // coca, admm
bool has_dual(AlgorithmKind kind);

struct AlgoParams {
  double c = 1.0;
  double rho = 1.0;
  double etsd_step_scale = 0.5;
  double subproblem_tol = 1e-8;
};

// ETSD step size exponent: s^k = a * (k + 1)^(-2/3).
inline constexpr double kEtsdStepExponent = 2.0 / 3.0;
// Inner gradient-descent cap for ADMM/COCA subproblems.
inline constexpr long kSubproblemMaxSteps = 100'000;
// Accuracy above which a run is declared divergent.
inline constexpr double kDivergenceAccuracy = 1e12;

// Node variables as p x n matrices, column i belonging to node i. The state
// variables xhat are stored once: lossless broadcast keeps every neighbor's
// copy of xhat_i identical to node i's own.
struct AlgoState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd mu;
  Eigen::MatrixXd xhat;
  long k = 0;

  static AlgoState zeros(int p, int n);
  int nodes() const { return static_cast<int>(x.cols()); }
};

struct RoundResult {
  AlgoState state;
  std::vector<std::uint8_t> broadcast;
  int broadcast_count = 0;
};

// Synchronous rounds: every primal update reads round-k quantities only.
// `order` optionally permutes the node execution order; results do not
// depend on it.
RoundResult cola_round(const AlgoState& state, const Network& net,
                       const LocalCostOracle& problem,
                       const AlgoParams& params, double tau_next,
                       const std::vector<int>* order = nullptr);

RoundResult coca_round(const AlgoState& state, const Network& net,
                       const LocalCostOracle& problem,
                       const AlgoParams& params, double tau_next,
                       const std::vector<int>* order = nullptr);

// Mixing weights w_ij = 1 / (1 + max(d_i, d_j)) on neighbors, w_ii fills the
// row to one.
Eigen::MatrixXd metropolis_weights(const Network& net);

RoundResult etsd_round(const AlgoState& state, const Network& net,
                       const Eigen::MatrixXd& weights,
                       const LocalCostOracle& problem,
                       const AlgoParams& params, double tau_next,
                       const std::vector<int>* order = nullptr);

// argmin_x f_i(x) + <linear, x> + quad ||x||^2. Closed form when the oracle
// offers one; otherwise gradient descent with step 1/(L_i + 2 quad) from
// `start` until the objective gradient norm is <= tol.
Vec solve_admm_subproblem(const LocalCostOracle& problem, int i,
                          const Vec& linear, double quad, double tol,
                          const Vec* start = nullptr, long* steps = nullptr);

struct StopCriteria {
  long max_iter = 1000;
  // Early stop once accuracy <= target_accuracy (0 disables).
  double target_accuracy = 0.0;
};

enum class BroadcastUnit { kNode, kArc };

struct RunOptions {
  bool record_pattern = false;
  BroadcastUnit unit = BroadcastUnit::kNode;
  // Called after every round (and for the initial state) with the row about
  // to be appended; time spent here is excluded from wall_ms.
  std::function<void(const AlgoState&, TraceRow&)> observer;
};

struct AlgorithmSpec {
  std::string label;
  AlgorithmKind kind = AlgorithmKind::kCola;
  AlgoParams params;
  ThresholdSchedule schedule = ThresholdSchedule::zero();
};

// Accuracy ||x - 1 (x) xstar||^2 / ||x^0 - 1 (x) xstar||^2 with x^0 = 0.
double accuracy(const Eigen::MatrixXd& x, const Vec& xstar);

struct RunOutput {
  RunTrace trace;
  AlgoState final_state;
};

RunOutput run(const AlgorithmSpec& algo, const Network& net,
              const LocalCostOracle& problem, const StopCriteria& stop,
              const Vec& xstar, const RunOptions& options = {});

}  // namespace cola

#endif  // COLA_ALGORITHMS_HPP_
