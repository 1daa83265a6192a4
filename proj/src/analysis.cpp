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

#include "cola/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "cola/error.hpp"

namespace cola {

Vec stack_nodes(const Eigen::MatrixXd& nodes) {
  return Eigen::Map<const Vec>(nodes.data(), nodes.size());
}

DualRecovery::DualRecovery(const IncidenceSet& inc) : oriented_(inc.oriented) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(oriented_,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = kSingularCutoff * (sv.size() ? sv.maxCoeff() : 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  // BDCSVD orders singular values decreasingly.
  u_ = svd.matrixU().leftCols(rank);
  v_ = svd.matrixV().leftCols(rank);
  inv_sigma_ = sv.head(rank).cwiseInverse();
}

double DualRecovery::residual(const Vec& phi, const Vec& mu) const {
  return (oriented_.transpose() * phi - mu).norm();
}

Vec DualRecovery::recover(const Vec& mu) const {
  require(mu.size() == oriented_.cols(), "recover_phi: mu has wrong size");
  // G_o^T = V S U^T, so the minimum-norm solution is U S^+ V^T mu.
  Vec phi = u_ * inv_sigma_.cwiseProduct(v_.transpose() * mu);
  const double res = residual(phi, mu);
  if (res > 1e-6 * (1.0 + mu.norm())) {
    std::ostringstream msg;
    msg << "dual variable is not in range(G_o^T): residual " << res;
    fail(ErrorCode::kNumerical, msg.str());
  }
  return phi;
}

Vec recover_phi(const Vec& mu, const IncidenceSet& inc) {
  return DualRecovery(inc).recover(mu);
}

namespace {

Eigen::MatrixXd node_gradients(const LocalCostOracle& problem,
                               const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  Vec gi;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    problem.gradient(static_cast<int>(i), x.col(i), gi);
    g.col(i) = gi;
  }
  return g;
}

}  // namespace

EnergyEvaluator::EnergyEvaluator(const IncidenceSet& inc,
                                 const LocalCostOracle& problem,
                                 const Vec& xstar, double c, double rho)
    : unoriented_(inc.unoriented), recovery_(inc), c_(c), rho_(rho) {
  require(c > 0.0, "energy needs c > 0");
  require(xstar.size() == inc.p, "x* has wrong dimension");
  const int n = static_cast<int>(inc.oriented.cols()) / inc.p;
  require(problem.node_count() == n, "problem/network node count mismatch");
  const Eigen::MatrixXd xs = xstar.replicate(1, n);
  xstar_stacked_ = stack_nodes(xs);
  // grad f(x*) + G_o^T phi* = 0.
  phi_star_ = recovery_.recover(-stack_nodes(node_gradients(problem, xs)));
}

EnergyReport EnergyEvaluator::operator()(const Eigen::MatrixXd& x,
                                         const Eigen::MatrixXd& mu) const {
  const Vec dx = stack_nodes(x) - xstar_stacked_;
  const Vec phi = recovery_.recover(stack_nodes(mu));
  EnergyReport r;
  r.primal_term = 0.5 * rho_ * dx.squaredNorm();
  r.consensus_term = c_ * (0.5 * (unoriented_ * dx)).squaredNorm();
  r.dual_term = (phi - phi_star_).squaredNorm() / c_;
  r.V = r.primal_term + r.consensus_term + r.dual_term;
  return r;
}

EnergyReport energy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mu,
                    const Vec& xstar, const IncidenceSet& inc,
                    const LocalCostOracle& problem, double c, double rho) {
  return EnergyEvaluator(inc, problem, xstar, c, rho)(x, mu);
}

KktResiduals kkt_residuals(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mu,
                           const LocalCostOracle& problem,
                           const IncidenceSet& inc) {
  require(x.rows() == mu.rows() && x.cols() == mu.cols(),
          "kkt_residuals: x and mu shapes differ");
  require(x.size() == inc.oriented.cols(),
          "kkt_residuals: x does not match the incidence set");
  KktResiduals r;
  r.r_grad = (node_gradients(problem, x) + mu).norm();
  r.r_cons = (inc.oriented * stack_nodes(x)).norm();
  return r;
}

ParamReport validate_params(double c, double rho,
                            const ProblemConstants& constants,
                            const SpectralInfo& spectral,
                            const ThresholdSchedule& schedule) {
  ParamReport r;
  const double M = constants.M;
  r.thm1_lhs = c * spectral.lambda_min_Lu + rho;
  r.thm1_ok = r.thm1_lhs > M / 2.0;
  r.thm2_rhs = constants.strongly_convex()
                   ? M * M / (2.0 * constants.m)
                   : std::numeric_limits<double>::infinity();
  r.thm2_ok = constants.strongly_convex() && rho > r.thm2_rhs;
  // Linear, sublinear (r > 1) and zero schedules are all summable.
  r.schedule_summable = true;
  r.recommended_c =
      8.0 * M / (spectral.sigma_max_Gu * spectral.sigma_min_nz_Go);
  r.recommended_rho = M * constants.kappa_f();
  if (constants.strongly_convex() && schedule.kind() == ScheduleKind::kLinear)
    r.delta_bound = delta_bound(constants.kappa_f(), spectral.kappa_G,
                                schedule.beta());
  return r;
}

std::string ParamReport::summary() const {
  std::ostringstream out;
  out.precision(10);
  out << "thm1_ok = " << (thm1_ok ? "true" : "false")
      << "  (c*lambda_min(L_u) + rho = " << thm1_lhs << ")\n"
      << "thm2_ok = " << (thm2_ok ? "true" : "false")
      << "  (M^2/(2m) = " << thm2_rhs << ")\n"
      << "schedule_summable = " << (schedule_summable ? "true" : "false")
      << "\n"
      << "delta_bound = ";
  if (delta_bound) out << *delta_bound;
  else out << "n/a";
  out << "\nrecommended_c = " << recommended_c
      << "\nrecommended_rho = " << recommended_rho << "\n";
  return out.str();
}

double delta_bound(double kappa_f, double kappa_G, double beta) {
  require(kappa_f >= 1.0 && std::isfinite(kappa_f), "kappa_f must be >= 1");
  require(kappa_G > 0.0 && std::isfinite(kappa_G), "kappa_G must be > 0");
  require(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
  const double kf = kappa_f, kg = kappa_G;
  const double t1 = 1.0 / (8.0 * kg * kg);
  const double t2 = 1.0 / (2.0 * kf * kf + 16.0 * kf * kg);
  const double t3 = kf / (12.0 * kg + 6.0 * kf * kf * kg);
  const double t4 = 1.0 / (beta * beta) - 1.0;
  return std::min({t1, t2, t3, t4});
}

RateFit fit_log_linear(std::span<const double> k, std::span<const double> y) {
  require(k.size() == y.size(), "fit: size mismatch");
  require(k.size() >= 10, "rate fit needs at least 10 points");
  const double count = static_cast<double>(k.size());
  double mk = 0.0, ml = 0.0;
  std::vector<double> logs(y.size());
  for (std::size_t t = 0; t < k.size(); ++t) {
    require(y[t] > 0.0, "rate fit needs positive accuracies");
    logs[t] = std::log(y[t]);
    mk += k[t];
    ml += logs[t];
  }
  mk /= count;
  ml /= count;
  double skk = 0.0, skl = 0.0, sll = 0.0;
  for (std::size_t t = 0; t < k.size(); ++t) {
    skk += (k[t] - mk) * (k[t] - mk);
    skl += (k[t] - mk) * (logs[t] - ml);
    sll += (logs[t] - ml) * (logs[t] - ml);
  }
  require(skk > 0.0, "rate fit needs distinct iteration indices");
  RateFit fit;
  fit.points = static_cast<int>(k.size());
  fit.slope = skl / skk;
  const double explained = fit.slope * skl;
  fit.r_squared = sll > 0.0 ? explained / sll : 1.0;
  return fit;
}

RateFit fit_rate(const RunTrace& trace, long k_begin, long k_end) {
  std::vector<double> ks, acc;
  for (const auto& row : trace.rows) {
    if (row.k < k_begin || row.k > k_end) continue;
    ks.push_back(static_cast<double>(row.k));
    acc.push_back(row.accuracy);
  }
  return fit_log_linear(ks, acc);
}

double energy_theta(double c, int n, double sigma_max_Go, double tau0,
                    double tauk) {
  const double s2 = sigma_max_Go * sigma_max_Go;
  return 5.0 * c * n * s2 * tau0 * tauk + 0.5 * c * n * s2 * tauk * tauk;
}

std::optional<long> first_energy_violation(std::span<const double> V,
                                           std::span<const double> tau,
                                           double c, int n,
                                           double sigma_max_Go,
                                           double slack_rel) {
  require(tau.size() >= V.size(), "need tau^k for every recorded V^k");
  if (V.empty()) return std::nullopt;
  const double tau0 = tau[0];
  for (std::size_t k = 0; k + 1 < V.size(); ++k) {
    const double growth = tau0 > 0.0 ? 1.0 + tau[k] / (2.0 * tau0) : 1.0;
    const double bound = growth * V[k] +
                         energy_theta(c, n, sigma_max_Go, tau0, tau[k]) +
                         slack_rel * (1.0 + V[k]);
    if (V[k + 1] > bound) return static_cast<long>(k);
  }
  return std::nullopt;
}

bool linear_envelope_holds(std::span<const double> V, double delta,
                           long burn_in) {
  require(burn_in >= 0 && static_cast<std::size_t>(burn_in) < V.size(),
          "burn-in outside the recorded range");
  require(delta > 0.0, "delta must be > 0");
  const double base = V[burn_in];
  const double log_rate = std::log1p(delta);
  for (std::size_t k = burn_in; k < V.size(); ++k) {
    const double envelope =
        base * std::exp(-log_rate * static_cast<double>(k - burn_in));
    if (V[k] > envelope * (1.0 + 1e-12)) return false;
  }
  return true;
}

bool sublinear_envelope_holds(std::span<const double> accuracy, double q,
                              long k0) {
  require(k0 >= 1 && static_cast<std::size_t>(2 * k0) < accuracy.size(),
          "calibration window [k0, 2 k0] outside the recorded range");
  // Censoring makes accuracy jitter from round to round, so C comes from the
  // worst point of the window rather than from a single row.
  auto scaled = [&](std::size_t k) {
    return accuracy[k] * std::pow(static_cast<double>(k), q);
  };
  double c = 0.0;
  for (std::size_t k = k0; k <= static_cast<std::size_t>(2 * k0); ++k)
    c = std::max(c, scaled(k));
  for (std::size_t k = 2 * k0 + 1; k < accuracy.size(); ++k)
    if (scaled(k) > c * (1.0 + 1e-12)) return false;
  return true;
}

}  // namespace cola
