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

#ifndef COLA_PROBLEMS_HPP_
#define COLA_PROBLEMS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cola {

using Vec = Eigen::VectorXd;

// Lipschitz constant of every local gradient (M) and common strong convexity
// constant (m, zero when some f_i is not strongly convex).
struct ProblemConstants {
  double M = 0.0;
  double m = 0.0;

  bool strongly_convex() const { return m > 0.0; }
  // M / m; +inf when m == 0.
  double kappa_f() const;
};

// Per-node private costs f_i : R^p -> R. Evaluation is const and reentrant.
class LocalCostOracle {
 public:
  virtual ~LocalCostOracle() = default;

  virtual std::string kind() const = 0;
  virtual int node_count() const = 0;
  virtual int dimension() const = 0;

  virtual double value(int i, const Vec& x) const = 0;
  // Writes grad f_i(x) into `out` (resized to p).
  virtual void gradient(int i, const Vec& x, Vec& out) const = 0;
  Vec gradient(int i, const Vec& x) const;

  virtual double node_lipschitz(int i) const = 0;
  virtual double node_strong_convexity(int i) const = 0;

  // argmin_x f_i(x) + <linear, x> + quad * ||x||^2 when it has a closed form.
  virtual std::optional<Vec> regularized_minimizer(int /*i*/,
                                                   const Vec& /*linear*/,
                                                   double /*quad*/) const {
    return std::nullopt;
  }

  ProblemConstants constants() const;

 protected:
  void check_node(int i, const Vec& x) const;
};

// f_i(x) = 0.5 * ||A_i x - y_i||^2 with A_i p x p.
class LeastSquaresProblem final : public LocalCostOracle {
 public:
  LeastSquaresProblem(std::vector<Eigen::MatrixXd> design,
                      std::vector<Vec> response);

  std::string kind() const override { return "ls"; }
  int node_count() const override { return static_cast<int>(design_.size()); }
  int dimension() const override { return p_; }
  double value(int i, const Vec& x) const override;
  void gradient(int i, const Vec& x, Vec& out) const override;
  using LocalCostOracle::gradient;
  double node_lipschitz(int i) const override { return lipschitz_[i]; }
  double node_strong_convexity(int i) const override { return convexity_[i]; }
  std::optional<Vec> regularized_minimizer(int i, const Vec& linear,
                                           double quad) const override;

  const Eigen::MatrixXd& design(int i) const { return design_[i]; }
  const Vec& response(int i) const { return response_[i]; }
  const Eigen::MatrixXd& gram(int i) const { return gram_[i]; }
  const Vec& moment(int i) const { return moment_[i]; }

 private:
  int p_;
  std::vector<Eigen::MatrixXd> design_;
  std::vector<Vec> response_;
  std::vector<Eigen::MatrixXd> gram_;  // A^T A
  std::vector<Vec> moment_;            // A^T y
  std::vector<double> lipschitz_;
  std::vector<double> convexity_;
};

// f_i(x) = (1/l_i) sum_l ln(1 + exp(-y_l q_l^T x)), samples as columns of Q_i.
class LogisticProblem final : public LocalCostOracle {
 public:
  LogisticProblem(std::vector<Eigen::MatrixXd> features,
                  std::vector<Vec> labels);

  std::string kind() const override { return "logistic"; }
  int node_count() const override {
    return static_cast<int>(features_.size());
  }
  int dimension() const override { return p_; }
  double value(int i, const Vec& x) const override;
  void gradient(int i, const Vec& x, Vec& out) const override;
  using LocalCostOracle::gradient;
  double node_lipschitz(int i) const override { return lipschitz_[i]; }
  double node_strong_convexity(int) const override { return 0.0; }

  const Eigen::MatrixXd& features(int i) const { return features_[i]; }
  const Vec& labels(int i) const { return labels_[i]; }

 private:
  int p_;
  std::vector<Eigen::MatrixXd> features_;
  std::vector<Vec> labels_;
  std::vector<double> lipschitz_;
};

// ln(1 + e^t) without overflow.
double softplus(double t);

std::shared_ptr<LeastSquaresProblem> ls_generate(int n, int p,
                                                 std::uint64_t seed);
std::shared_ptr<LogisticProblem> lr_generate(int n, int p, std::uint64_t seed);

// Minimizer of sum_i f_i. Least squares: direct solve of the normal
// equations. Otherwise gradient descent with step 1/(n M) until
// ||sum_i grad f_i|| <= tolerance, starting from `warm_start` (or 0).
Vec solve_centralized(const LocalCostOracle& problem, double tolerance,
                      const std::optional<Vec>& warm_start = std::nullopt);

inline constexpr long kCentralizedMaxSteps = 10'000'000;

// Gradient of the aggregate cost sum_i f_i at a common point.
Vec aggregate_gradient(const LocalCostOracle& problem, const Vec& x);

// One directory per instance: problem.txt manifest plus node_<i>.csv files
// (matrix rows, then one response/label row).
void write_problem(const LocalCostOracle& problem, const std::string& dir);
std::shared_ptr<LocalCostOracle> read_problem(const std::string& dir);

}  // namespace cola

#endif  // COLA_PROBLEMS_HPP_
