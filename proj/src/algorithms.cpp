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

#include "cola/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "cola/error.hpp"

namespace cola {

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kDiverged: return "diverged";
    case RunStatus::kFailed: return "failed";
  }
  return "?";
}

AlgorithmKind parse_algorithm_kind(const std::string& name) {
  if (name == "cola") return AlgorithmKind::kCola;
  if (name == "dlm") return AlgorithmKind::kDlm;
  if (name == "coca") return AlgorithmKind::kCoca;
  if (name == "admm") return AlgorithmKind::kAdmm;
  if (name == "etsd") return AlgorithmKind::kEtsd;
  fail(ErrorCode::kInvalidArgument,
       "unknown algorithm '" + name + "' (expected cola|dlm|coca|admm|etsd)");
}

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kCola: return "cola";
    case AlgorithmKind::kDlm: return "dlm";
    case AlgorithmKind::kCoca: return "coca";
    case AlgorithmKind::kAdmm: return "admm";
    case AlgorithmKind::kEtsd: return "etsd";
  }
  return "?";
}

bool is_linearized(AlgorithmKind kind) {
  return kind == AlgorithmKind::kCola || kind == AlgorithmKind::kDlm;
}

bool is_exact(AlgorithmKind kind) {
  return kind == AlgorithmKind::kCoca || kind == AlgorithmKind::kAdmm;
}

bool has_dual(AlgorithmKind kind) { return kind != AlgorithmKind::kEtsd; }

AlgoState AlgoState::zeros(int p, int n) {
  AlgoState s;
  s.x = Eigen::MatrixXd::Zero(p, n);
  s.mu = Eigen::MatrixXd::Zero(p, n);
  s.xhat = Eigen::MatrixXd::Zero(p, n);
  return s;
}

namespace {

void check_round_inputs(const AlgoState& state, const Network& net,
                        const LocalCostOracle& problem, double tau_next,
                        const std::vector<int>* order) {
  require(state.x.cols() == net.node_count() &&
              problem.node_count() == net.node_count(),
          "state, network and problem disagree on the node count");
  require(state.x.rows() == problem.dimension(),
          "state dimension differs from the problem dimension");
  require(tau_next >= 0.0, "threshold must be >= 0");
  if (order) {
    std::vector<int> sorted = *order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < net.node_count(); ++i)
      require(static_cast<int>(sorted.size()) == net.node_count() &&
                  sorted[i] == i,
              "node order must be a permutation");
  }
}

std::vector<int> execution_order(int n, const std::vector<int>* order) {
  if (order) return *order;
  std::vector<int> seq(n);
  std::iota(seq.begin(), seq.end(), 0);
  return seq;
}

// sum_{j in N_i} (v_i - v_j), accumulated in neighbor order.
Vec neighbor_difference(const Eigen::MatrixXd& v, const Network& net, int i) {
  Vec acc = Vec::Zero(v.rows());
  for (int j : net.neighbors(i)) acc += v.col(i) - v.col(j);
  return acc;
}

// Censoring step shared by every engine; fills xhat and broadcast flags of
// `out` from the freshly computed primal variables.
void apply_censoring(const AlgoState& prev, double tau_next,
                     const std::vector<int>& order, RoundResult& out) {
  for (int i : order) {
    const CensorOutcome decision =
        censor_decide(prev.xhat.col(i), out.state.x.col(i), tau_next);
    out.state.xhat.col(i) = decision.xhat_new;
    out.broadcast[i] = decision.transmit ? 1 : 0;
  }
  out.broadcast_count = static_cast<int>(
      std::count(out.broadcast.begin(), out.broadcast.end(), 1));
}

// mu_i^{k+1} = mu_i^k + c sum_j (xhat_i^{k+1} - xhat_j^{k+1}).
void dual_update(const AlgoState& prev, const Network& net, double c,
                 const std::vector<int>& order, RoundResult& out) {
  for (int i : order)
    out.state.mu.col(i) =
        prev.mu.col(i) + c * neighbor_difference(out.state.xhat, net, i);
}

RoundResult start_round(const AlgoState& state) {
  RoundResult out;
  out.state = state;
  out.state.k = state.k + 1;
  out.broadcast.assign(state.x.cols(), 0);
  return out;
}

}  // namespace

RoundResult cola_round(const AlgoState& state, const Network& net,
                       const LocalCostOracle& problem,
                       const AlgoParams& params, double tau_next,
                       const std::vector<int>* order) {
  check_round_inputs(state, net, problem, tau_next, order);
  require(params.c > 0.0 && params.rho > 0.0, "cola needs c > 0, rho > 0");
  const auto seq = execution_order(net.node_count(), order);
  RoundResult out = start_round(state);

  Vec grad;
  for (int i : seq) {
    problem.gradient(i, state.x.col(i), grad);
    const double scale = 1.0 / (2.0 * params.c * net.degree(i) + params.rho);
    const Vec direction = grad +
                          params.c * neighbor_difference(state.xhat, net, i) +
                          state.mu.col(i);
    out.state.x.col(i) = state.x.col(i) - scale * direction;
  }
  apply_censoring(state, tau_next, seq, out);
  dual_update(state, net, params.c, seq, out);
  return out;
}

Vec solve_admm_subproblem(const LocalCostOracle& problem, int i,
                          const Vec& linear, double quad, double tol,
                          const Vec* start, long* steps) {
  require(quad > 0.0, "subproblem quadratic coefficient must be > 0");
  require(linear.size() == problem.dimension(),
          "subproblem linear term has wrong dimension");
  if (steps) *steps = 0;
  if (auto closed = problem.regularized_minimizer(i, linear, quad))
    return *closed;

  require(tol > 0.0, "subproblem tolerance must be > 0");
  const double step = 1.0 / (problem.node_lipschitz(i) + 2.0 * quad);
  Vec x = start ? *start : Vec::Zero(problem.dimension());
  Vec g;
  for (long t = 0; t < kSubproblemMaxSteps; ++t) {
    problem.gradient(i, x, g);
    g += linear;
    g += (2.0 * quad) * x;
    if (g.norm() <= tol) {
      if (steps) *steps = t;
      return x;
    }
    x -= step * g;
  }
  fail(ErrorCode::kNotConverged,
       "subproblem at node " + std::to_string(i) + " exceeded " +
           std::to_string(kSubproblemMaxSteps) + " inner steps");
}

RoundResult coca_round(const AlgoState& state, const Network& net,
                       const LocalCostOracle& problem,
                       const AlgoParams& params, double tau_next,
                       const std::vector<int>* order) {
  check_round_inputs(state, net, problem, tau_next, order);
  require(params.c > 0.0, "coca needs c > 0");
  const auto seq = execution_order(net.node_count(), order);
  RoundResult out = start_round(state);

  for (int i : seq) {
    Vec pull = Vec::Zero(problem.dimension());
    for (int j : net.neighbors(i)) pull += state.xhat.col(i) + state.xhat.col(j);
    const Vec linear = state.mu.col(i) - params.c * pull;
    const Vec warm = state.x.col(i);
    out.state.x.col(i) =
        solve_admm_subproblem(problem, i, linear, params.c * net.degree(i),
                              params.subproblem_tol, &warm);
  }
  apply_censoring(state, tau_next, seq, out);
  dual_update(state, net, params.c, seq, out);
  return out;
}

Eigen::MatrixXd metropolis_weights(const Network& net) {
  const int n = net.node_count();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : net.neighbors(i)) {
      w(i, j) = 1.0 / (1.0 + std::max(net.degree(i), net.degree(j)));
      off += w(i, j);
    }
    w(i, i) = 1.0 - off;
  }
  return w;
}

RoundResult etsd_round(const AlgoState& state, const Network& net,
                       const Eigen::MatrixXd& weights,
                       const LocalCostOracle& problem,
                       const AlgoParams& params, double tau_next,
                       const std::vector<int>* order) {
  check_round_inputs(state, net, problem, tau_next, order);
  require(params.etsd_step_scale > 0.0, "etsd step scale must be > 0");
  require(weights.rows() == net.node_count() &&
              weights.cols() == net.node_count(),
          "mixing matrix has wrong shape");
  const auto seq = execution_order(net.node_count(), order);
  RoundResult out = start_round(state);

  const double step =
      params.etsd_step_scale *
      std::pow(static_cast<double>(state.k + 1), -kEtsdStepExponent);
  Vec grad;
  for (int i : seq) {
    problem.gradient(i, state.x.col(i), grad);
    Vec mixed = weights(i, i) * state.xhat.col(i);
    for (int j : net.neighbors(i)) mixed += weights(i, j) * state.xhat.col(j);
    out.state.x.col(i) = mixed - step * grad;
  }
  apply_censoring(state, tau_next, seq, out);
  return out;
}

double accuracy(const Eigen::MatrixXd& x, const Vec& xstar) {
  require(x.rows() == xstar.size(), "accuracy: dimension mismatch");
  const double denom = static_cast<double>(x.cols()) * xstar.squaredNorm();
  require(denom > 0.0, "accuracy is undefined when x* = 0");
  return (x.colwise() - xstar).squaredNorm() / denom;
}

namespace {

void record_checks(const AlgoState& s, double tau, RunTrace& trace) {
  trace.tau.push_back(tau);
  trace.censor_gap.push_back(
      s.x.cols() ? (s.xhat - s.x).colwise().norm().maxCoeff() : 0.0);
  trace.dual_sum.push_back(s.mu.rowwise().sum().norm());
  trace.dual_norm.push_back(s.mu.norm());
}

}  // namespace

RunOutput run(const AlgorithmSpec& algo, const Network& net,
              const LocalCostOracle& problem, const StopCriteria& stop,
              const Vec& xstar, const RunOptions& options) {
  require(stop.max_iter >= 1, "max_iter must be >= 1");
  require(xstar.size() == problem.dimension(), "x* has wrong dimension");
  using Clock = std::chrono::steady_clock;

  const bool uncensored = algo.kind == AlgorithmKind::kDlm ||
                          algo.kind == AlgorithmKind::kAdmm;
  const ThresholdSchedule schedule =
      uncensored ? ThresholdSchedule::zero() : algo.schedule;
  Eigen::MatrixXd weights;
  if (algo.kind == AlgorithmKind::kEtsd) weights = metropolis_weights(net);

  RunOutput out;
  RunTrace& trace = out.trace;
  trace.label = algo.label.empty() ? to_string(algo.kind) : algo.label;
  AlgoState state = AlgoState::zeros(problem.dimension(), net.node_count());

  TraceRow row;
  row.k = 0;
  row.accuracy = accuracy(state.x, xstar);
  if (options.observer) options.observer(state, row);
  trace.rows.push_back(row);
  record_checks(state, schedule.at(0), trace);

  double solver_ms = 0.0;
  long cumulative = 0;
  for (long k = 0; k < stop.max_iter; ++k) {
    const double tau_next = schedule.at(k + 1);
    RoundResult result;
    const auto t0 = Clock::now();
    try {
      if (is_linearized(algo.kind))
        result = cola_round(state, net, problem, algo.params, tau_next);
      else if (is_exact(algo.kind))
        result = coca_round(state, net, problem, algo.params, tau_next);
      else
        result = etsd_round(state, net, weights, problem, algo.params,
                            tau_next);
    } catch (const Error& e) {
      trace.status = RunStatus::kFailed;
      trace.message = "round " + std::to_string(k + 1) + ": " + e.what();
      break;
    }
    solver_ms +=
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    state = std::move(result.state);

    long sent = 0;
    if (options.unit == BroadcastUnit::kNode) {
      sent = result.broadcast_count;
    } else {
      for (int i = 0; i < net.node_count(); ++i)
        if (result.broadcast[i]) sent += net.degree(i);
    }
    cumulative += sent;

    TraceRow next;
    next.k = state.k;
    next.accuracy = accuracy(state.x, xstar);
    next.broadcasts = sent;
    next.cum_broadcasts = cumulative;
    next.wall_ms = solver_ms;
    const bool finite = state.x.allFinite() && state.mu.allFinite() &&
                        std::isfinite(next.accuracy);
    if (finite && options.observer) options.observer(state, next);
    trace.rows.push_back(next);
    record_checks(state, tau_next, trace);
    if (options.record_pattern) trace.pattern.push_back(result.broadcast);

    if (!finite || next.accuracy > kDivergenceAccuracy) {
      trace.status = RunStatus::kDiverged;
      trace.message = "diverged at round " + std::to_string(state.k) +
                      " (accuracy " + std::to_string(next.accuracy) + ")";
      break;
    }
    if (stop.target_accuracy > 0.0 && next.accuracy <= stop.target_accuracy)
      break;
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace cola
