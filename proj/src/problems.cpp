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

#include "cola/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cola/error.hpp"
#include "cola/rng.hpp"

namespace cola {

double ProblemConstants::kappa_f() const {
  return m > 0.0 ? M / m : std::numeric_limits<double>::infinity();
}

Vec LocalCostOracle::gradient(int i, const Vec& x) const {
  Vec out;
  gradient(i, x, out);
  return out;
}

ProblemConstants LocalCostOracle::constants() const {
  ProblemConstants c;
  c.m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < node_count(); ++i) {
    c.M = std::max(c.M, node_lipschitz(i));
    c.m = std::min(c.m, node_strong_convexity(i));
  }
  if (node_count() == 0) c.m = 0.0;
  return c;
}

void LocalCostOracle::check_node(int i, const Vec& x) const {
  require(i >= 0 && i < node_count(), "node index out of range");
  if (x.size() != dimension()) {
    fail(ErrorCode::kInvalidArgument,
         "dimension mismatch: expected " + std::to_string(dimension()) +
             ", got " + std::to_string(x.size()));
  }
}

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

namespace {

// 1 / (1 + e^{-t}) without overflow.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

LeastSquaresProblem::LeastSquaresProblem(std::vector<Eigen::MatrixXd> design,
                                         std::vector<Vec> response)
    : design_(std::move(design)), response_(std::move(response)) {
  require(!design_.empty(), "least squares problem needs at least one node");
  require(design_.size() == response_.size(),
          "design/response node counts differ");
  p_ = static_cast<int>(design_[0].cols());
  require(p_ >= 1, "dimension p must be >= 1");
  for (std::size_t i = 0; i < design_.size(); ++i) {
    const auto& a = design_[i];
    require(a.cols() == p_ && a.rows() == response_[i].size(),
            "node " + std::to_string(i) + ": inconsistent A/y shapes");
    gram_.push_back(a.transpose() * a);
    moment_.push_back(a.transpose() * response_[i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_.back(),
                                                       Eigen::EigenvaluesOnly);
    lipschitz_.push_back(eig.eigenvalues().maxCoeff());
    convexity_.push_back(std::max(0.0, eig.eigenvalues().minCoeff()));
  }
}

double LeastSquaresProblem::value(int i, const Vec& x) const {
  check_node(i, x);
  return 0.5 * (design_[i] * x - response_[i]).squaredNorm();
}

void LeastSquaresProblem::gradient(int i, const Vec& x, Vec& out) const {
  check_node(i, x);
  out.noalias() = gram_[i] * x;
  out -= moment_[i];
}

std::optional<Vec> LeastSquaresProblem::regularized_minimizer(
    int i, const Vec& linear, double quad) const {
  check_node(i, linear);
  // Stationarity: (A^T A + 2 quad I) x = A^T y - linear.
  Eigen::MatrixXd h = gram_[i];
  h.diagonal().array() += 2.0 * quad;
  return Vec(h.llt().solve(moment_[i] - linear));
}

LogisticProblem::LogisticProblem(std::vector<Eigen::MatrixXd> features,
                                 std::vector<Vec> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  require(!features_.empty(), "logistic problem needs at least one node");
  require(features_.size() == labels_.size(),
          "feature/label node counts differ");
  p_ = static_cast<int>(features_[0].rows());
  require(p_ >= 1, "dimension p must be >= 1");
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& q = features_[i];
    const auto& y = labels_[i];
    require(q.rows() == p_, "node " + std::to_string(i) + ": wrong p");
    require(q.cols() >= 1, "node " + std::to_string(i) + ": needs l_i >= 1");
    require(q.cols() == y.size(),
            "node " + std::to_string(i) + ": sample/label count mismatch");
    for (Eigen::Index l = 0; l < y.size(); ++l)
      require(y[l] == 1.0 || y[l] == -1.0, "labels must be -1 or +1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        q * q.transpose(), Eigen::EigenvaluesOnly);
    // sigma'(t) <= 1/4.
    lipschitz_.push_back(eig.eigenvalues().maxCoeff() /
                         (4.0 * static_cast<double>(q.cols())));
  }
}

double LogisticProblem::value(int i, const Vec& x) const {
  check_node(i, x);
  const auto& q = features_[i];
  const auto& y = labels_[i];
  double sum = 0.0;
  for (Eigen::Index l = 0; l < q.cols(); ++l)
    sum += softplus(-y[l] * q.col(l).dot(x));
  return sum / static_cast<double>(q.cols());
}

void LogisticProblem::gradient(int i, const Vec& x, Vec& out) const {
  check_node(i, x);
  const auto& q = features_[i];
  const auto& y = labels_[i];
  out.setZero(p_);
  for (Eigen::Index l = 0; l < q.cols(); ++l) {
    const double margin = -y[l] * q.col(l).dot(x);
    out.noalias() -= (y[l] * sigmoid(margin)) * q.col(l);
  }
  out /= static_cast<double>(q.cols());
}

std::shared_ptr<LeastSquaresProblem> ls_generate(int n, int p,
                                                 std::uint64_t seed) {
  require(n >= 1 && p >= 1, "least squares generator needs n, p >= 1");
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> design;
  std::vector<Vec> response;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd a(p, p);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) a(r, c) = rng.uniform();
    Vec b(p);
    for (int r = 0; r < p; ++r) b[r] = rng.uniform();
    response.push_back(a * b);
    design.push_back(std::move(a));
  }
  return std::make_shared<LeastSquaresProblem>(std::move(design),
                                               std::move(response));
}

std::shared_ptr<LogisticProblem> lr_generate(int n, int p,
                                             std::uint64_t seed) {
  require(n >= 1, "logistic generator needs n >= 1");
  require(p >= 2, "logistic generator needs p >= 2 (last feature is 1)");
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> features;
  std::vector<Vec> labels;
  for (int i = 0; i < n; ++i) {
    const auto samples = rng.uniform_int(1, 10);
    Eigen::MatrixXd q(p, samples);
    for (int r = 0; r + 1 < p; ++r)
      for (Eigen::Index l = 0; l < samples; ++l)
        q(r, l) = 0.1 * static_cast<double>(rng.uniform_int(1, 10));
    q.row(p - 1).setOnes();
    Vec y(samples);
    for (Eigen::Index l = 0; l < samples; ++l)
      y[l] = rng.uniform_int(0, 1) ? 1.0 : -1.0;
    features.push_back(std::move(q));
    labels.push_back(std::move(y));
  }
  return std::make_shared<LogisticProblem>(std::move(features),
                                           std::move(labels));
}

Vec aggregate_gradient(const LocalCostOracle& problem, const Vec& x) {
  Vec total = Vec::Zero(problem.dimension());
  Vec g;
  for (int i = 0; i < problem.node_count(); ++i) {
    problem.gradient(i, x, g);
    total += g;
  }
  return total;
}

Vec solve_centralized(const LocalCostOracle& problem, double tolerance,
                      const std::optional<Vec>& warm_start) {
  require(tolerance > 0.0, "tolerance must be positive");
  const int p = problem.dimension();
  if (const auto* ls = dynamic_cast<const LeastSquaresProblem*>(&problem)) {
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
    Vec rhs = Vec::Zero(p);
    for (int i = 0; i < ls->node_count(); ++i) {
      normal += ls->gram(i);
      rhs += ls->moment(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal,
                                                       Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    if (!(hi > 0.0) || lo < 1e-12 * hi) {
      fail(ErrorCode::kNumerical,
           "least squares normal matrix is singular to working precision");
    }
    return normal.llt().solve(rhs);
  }

  const double step =
      1.0 / (static_cast<double>(problem.node_count()) * problem.constants().M);
  Vec x = warm_start.value_or(Vec::Zero(p));
  require(x.size() == p, "warm start has wrong dimension");
  for (long k = 0; k < kCentralizedMaxSteps; ++k) {
    const Vec g = aggregate_gradient(problem, x);
    if (g.norm() <= tolerance) return x;
    x -= step * g;
  }
  fail(ErrorCode::kNotConverged,
       "centralized gradient descent did not reach tolerance in " +
           std::to_string(kCentralizedMaxSteps) + " steps");
}

namespace {

std::string node_file(const std::filesystem::path& dir, int i) {
  char name[32];
  std::snprintf(name, sizeof name, "node_%04d.csv", i);
  return (dir / name).string();
}

void write_row(std::ostream& out, const auto& row) {
  char buf[32];
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%.17g", row(c));
    out << (c ? "," : "") << buf;
  }
  out << '\n';
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorCode::kIo, path + ":" + std::to_string(lineno) +
                                 ": not a number: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_problem(const LocalCostOracle& problem, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  {
    std::ofstream manifest(fs::path(dir) / "problem.txt");
    if (!manifest) fail(ErrorCode::kIo, "cannot write manifest in " + dir);
    manifest << "kind = " << problem.kind() << "\n"
             << "n = " << problem.node_count() << "\n"
             << "p = " << problem.dimension() << "\n";
  }
  for (int i = 0; i < problem.node_count(); ++i) {
    std::ofstream out(node_file(dir, i));
    if (!out) fail(ErrorCode::kIo, "cannot write " + node_file(dir, i));
    if (const auto* ls = dynamic_cast<const LeastSquaresProblem*>(&problem)) {
      for (Eigen::Index r = 0; r < ls->design(i).rows(); ++r)
        write_row(out, ls->design(i).row(r));
      write_row(out, ls->response(i).transpose());
    } else if (const auto* lr =
                   dynamic_cast<const LogisticProblem*>(&problem)) {
      for (Eigen::Index r = 0; r < lr->features(i).rows(); ++r)
        write_row(out, lr->features(i).row(r));
      write_row(out, lr->labels(i).transpose());
    } else {
      fail(ErrorCode::kInvalidArgument,
           "problem kind '" + problem.kind() + "' is not serializable");
    }
    if (!out) fail(ErrorCode::kIo, "failed writing " + node_file(dir, i));
  }
}

std::shared_ptr<LocalCostOracle> read_problem(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto manifest_path = (fs::path(dir) / "problem.txt").string();
  std::ifstream manifest(manifest_path);
  if (!manifest) fail(ErrorCode::kIo, "cannot read " + manifest_path);
  std::string kind;
  int n = -1, p = -1;
  std::string line;
  while (std::getline(manifest, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "kind") kind = val;
    else if (key == "n") n = std::stoi(val);
    else if (key == "p") p = std::stoi(val);
  }
  if (n < 1 || p < 1 || kind.empty())
    fail(ErrorCode::kIo, manifest_path + ": incomplete manifest");

  std::vector<Eigen::MatrixXd> mats;
  std::vector<Vec> tails;
  for (int i = 0; i < n; ++i) {
    const auto rows = read_csv_rows(node_file(dir, i));
    if (static_cast<int>(rows.size()) != p + 1)
      fail(ErrorCode::kIo, node_file(dir, i) + ": expected " +
                               std::to_string(p + 1) + " rows");
    const auto cols = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd mat(p, cols);
    for (int r = 0; r < p; ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != cols)
        fail(ErrorCode::kIo, node_file(dir, i) + ": ragged matrix rows");
      for (Eigen::Index c = 0; c < cols; ++c) mat(r, c) = rows[r][c];
    }
    tails.push_back(Eigen::Map<const Vec>(rows[p].data(),
                                          static_cast<Eigen::Index>(rows[p].size())));
    mats.push_back(std::move(mat));
  }
  try {
    if (kind == "ls")
      return std::make_shared<LeastSquaresProblem>(std::move(mats),
                                                   std::move(tails));
    if (kind == "logistic")
      return std::make_shared<LogisticProblem>(std::move(mats),
                                               std::move(tails));
  } catch (const Error& e) {
    fail(ErrorCode::kIo, dir + ": " + e.what());
  }
  fail(ErrorCode::kIo, manifest_path + ": unknown problem kind '" + kind + "'");
}

}  // namespace cola
