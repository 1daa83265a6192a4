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

#ifndef COLA_ANALYSIS_HPP_
#define COLA_ANALYSIS_HPP_

#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "cola/censoring.hpp"
#include "cola/graph.hpp"
#include "cola/problems.hpp"
#include "cola/trace.hpp"

namespace cola {

// Column-stacks a p x n node matrix into [x_1; ...; x_n].
Vec stack_nodes(const Eigen::MatrixXd& nodes);

// Minimum-norm solutions of G_o^T phi = mu from a thin SVD of G_o computed
// once per network.
class DualRecovery {
 public:
  explicit DualRecovery(const IncidenceSet& inc);

  // Throws kNumerical when mu is farther than 1e-6 (1 + ||mu||) from
  // range(G_o^T), i.e. the dual iterate left the space it must live in.
  Vec recover(const Vec& mu) const;
  double residual(const Vec& phi, const Vec& mu) const;

 private:
  Eigen::MatrixXd oriented_;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd v_;
  Eigen::VectorXd inv_sigma_;
};

Vec recover_phi(const Vec& mu, const IncidenceSet& inc);

struct EnergyReport {
  double V = 0.0;
  double primal_term = 0.0;     // (rho/2) ||x - x*||^2
  double consensus_term = 0.0;  // c ||z - z*||^2, z = G_u x / 2
  double dual_term = 0.0;       // (1/c) ||phi - phi*||^2
};

// Energy of (x, mu) relative to the optimum; z*, phi* and the dual recovery
// are computed once at construction.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const IncidenceSet& inc, const LocalCostOracle& problem,
                  const Vec& xstar, double c, double rho);

  EnergyReport operator()(const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& mu) const;

  const Vec& phi_star() const { return phi_star_; }

 private:
  Eigen::MatrixXd unoriented_;
  DualRecovery recovery_;
  double c_;
  double rho_;
  Vec xstar_stacked_;
  Vec phi_star_;
};

EnergyReport energy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mu,
                    const Vec& xstar, const IncidenceSet& inc,
                    const LocalCostOracle& problem, double c, double rho);

struct KktResiduals {
  double r_grad = 0.0;  // ||grad f(x) + mu||
  double r_cons = 0.0;  // ||G_o x||
};

KktResiduals kkt_residuals(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mu,
                           const LocalCostOracle& problem,
                           const IncidenceSet& inc);

struct ParamReport {
  bool thm1_ok = false;           // c lambda_min(L_u) + rho > M/2
  bool thm2_ok = false;           // rho > M^2 / (2m)
  bool schedule_summable = true;
  std::optional<double> delta_bound;
  double recommended_c = 0.0;     // 8M / (sigma_max(G_u) sigma~_min(G_o))
  double recommended_rho = 0.0;   // M kappa_f
  double thm1_lhs = 0.0;
  double thm2_rhs = 0.0;

  std::string summary() const;
};

ParamReport validate_params(double c, double rho,
                            const ProblemConstants& constants,
                            const SpectralInfo& spectral,
                            const ThresholdSchedule& schedule);

// Upper bound on the linear-rate constant delta for kappa_f >= 1,
// kappa_G > 0 and beta in (0, 1): the minimum of
//   1/(8 kG^2), 1/(2 kf^2 + 16 kf kG), kf/(12 kG + 6 kf^2 kG), 1/beta^2 - 1.
double delta_bound(double kappa_f, double kappa_G, double beta);

struct RateFit {
  double slope = 0.0;  // nats per iteration
  double r_squared = 0.0;
  int points = 0;
};

// Least-squares fit of ln(accuracy) against k over rows with
// k_begin <= k <= k_end. Needs at least 10 points, all positive.
RateFit fit_rate(const RunTrace& trace, long k_begin, long k_end);
RateFit fit_log_linear(std::span<const double> k, std::span<const double> y);

// theta^k = 5 c n s^2 tau^0 tau^k + (c n s^2 / 2) (tau^k)^2, s = sigma_max(G_o).
double energy_theta(double c, int n, double sigma_max_Go, double tau0,
                    double tauk);

// First k violating V^{k+1} <= (1 + tau^k/(2 tau^0)) V^k + theta^k beyond
// a slack of slack_rel (1 + V^k); nullopt when the whole sequence complies.
// With tau^0 = 0 the growth factor is 1.
std::optional<long> first_energy_violation(std::span<const double> V,
                                           std::span<const double> tau,
                                           double c, int n,
                                           double sigma_max_Go,
                                           double slack_rel = 1e-8);

// Whether V^k <= V^{b} (1 + delta)^{-(k - b)} for every k >= b (b = burn_in).
bool linear_envelope_holds(std::span<const double> V, double delta,
                           long burn_in);

// Whether acc^k <= C k^{-q} for every k > 2 k0, with C the largest
// acc^k k^q over the calibration window [k0, 2 k0].
bool sublinear_envelope_holds(std::span<const double> accuracy, double q,
                              long k0);

}  // namespace cola

#endif  // COLA_ANALYSIS_HPP_
