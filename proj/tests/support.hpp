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
#ifndef COLA_TESTS_SUPPORT_HPP_
#define COLA_TESTS_SUPPORT_HPP_

// Helpers and independent reference implementations shared by the unit and
// acceptance tests. The references work on stacked np-vectors and the dense
// incidence matrices, never on the per-node code paths they check.

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cola/algorithms.hpp"
#include "cola/analysis.hpp"
#include "cola/graph.hpp"
#include "cola/problems.hpp"
#include "cola/rng.hpp"

namespace cola::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("cola_sim_test_" + name + "_" +
              std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// A_i = I + spread * U[0,1]^{p x p}: strongly convex, modest condition number.
inline std::shared_ptr<LeastSquaresProblem> well_conditioned_ls(
    int n, int p, std::uint64_t seed, double spread = 0.3) {
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> design;
  std::vector<Vec> response;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) a(r, c) += spread * rng.uniform();
    Vec b(p);
    for (int r = 0; r < p; ++r) b(r) = rng.uniform();
    design.push_back(a);
    response.push_back(a * b);
  }
  return std::make_shared<LeastSquaresProblem>(design, response);
}

inline Vec stacked_gradient(const LocalCostOracle& problem, const Vec& x) {
  const int p = problem.dimension();
  Vec g(x.size());
  for (int i = 0; i < problem.node_count(); ++i)
    g.segment(i * p, p) = problem.gradient(i, x.segment(i * p, p));
  return g;
}

struct StackedState {
  Vec x;
  Vec mu;
};

// Uncensored linearized update in matrix form:
//   x+ = x - (2cD + rho I)^{-1} (grad f(x) + c L_o x + mu)
//   mu+ = mu + c L_o x+
inline StackedState dlm_reference_step(const StackedState& s,
                                       const IncidenceSet& inc,
                                       const LocalCostOracle& problem,
                                       double c, double rho) {
  const long np = s.x.size();
  const Eigen::MatrixXd scale =
      2.0 * c * inc.degree + rho * Eigen::MatrixXd::Identity(np, np);
  StackedState out;
  out.x = s.x - scale.inverse() * (stacked_gradient(problem, s.x) +
                                   c * inc.laplacian_oriented * s.x + s.mu);
  out.mu = s.mu + c * inc.laplacian_oriented * out.x;
  return out;
}

// Exact update for least squares in matrix form:
//   x+ = argmin f(x) + <mu - c L_u x, x> + c x^T D x
//      = (H + 2cD)^{-1} (A^T y - mu + c L_u x),  H = blkdiag(A_i^T A_i)
// solved as one dense np x np system.
inline StackedState admm_reference_step(const StackedState& s,
                                        const IncidenceSet& inc,
                                        const LeastSquaresProblem& problem,
                                        double c) {
  const int n = problem.node_count(), p = problem.dimension();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n * p, n * p);
  Vec rhs(n * p);
  for (int i = 0; i < n; ++i) {
    const auto& A = problem.design(i);
    H.block(i * p, i * p, p, p) = A.transpose() * A;
    rhs.segment(i * p, p) = A.transpose() * problem.response(i);
  }
  StackedState out;
  out.x = (H + 2.0 * c * inc.degree)
              .colPivHouseholderQr()
              .solve(rhs - s.mu + c * inc.laplacian_unoriented * s.x);
  out.mu = s.mu + c * inc.laplacian_oriented * out.x;
  return out;
}

// Worst relative error between grad f_i and central differences (h = 1e-6)
// over `probes` random nodes and points in [-2, 2]^p.
inline double gradient_check(const LocalCostOracle& problem, int probes,
                             std::uint64_t seed) {
  const int p = problem.dimension();
  const double h = 1e-6;
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    const int i = static_cast<int>(rng.uniform_int(0, problem.node_count() - 1));
    Vec x(p);
    for (int r = 0; r < p; ++r) x(r) = rng.uniform(-2.0, 2.0);
    Vec fd(p);
    for (int r = 0; r < p; ++r) {
      Vec up = x, down = x;
      up(r) += h;
      down(r) -= h;
      fd(r) = (problem.value(i, up) - problem.value(i, down)) / (2.0 * h);
    }
    const Vec g = problem.gradient(i, x);
    worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-12));
  }
  return worst;
}

// Per-run protocol invariants recorded in the trace.
struct ProtocolCheck {
  bool censor_bound = true;  // max_i ||xhat_i - x_i|| <= tau, no tolerance
  bool dual_sum = true;      // ||sum_i mu_i|| <= 1e-9 (1 + ||mu||)
  long rows = 0;
};

inline ProtocolCheck check_protocol(const RunTrace& trace, bool dual) {
  ProtocolCheck out;
  out.rows = static_cast<long>(trace.rows.size());
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    // A diverged run's last row may hold inf - inf; nothing to bound there.
    if (!std::isfinite(trace.rows[k].accuracy)) continue;
    if (!(trace.censor_gap[k] <= trace.tau[k])) out.censor_bound = false;
    if (dual && !(trace.dual_sum[k] <= 1e-9 * (1.0 + trace.dual_norm[k])))
      out.dual_sum = false;
  }
  return out;
}

}  // namespace cola::testing

#endif  // COLA_TESTS_SUPPORT_HPP_
