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

#include "cola/censoring.hpp"

#include <cmath>

#include "cola/error.hpp"
#include "cola/format.hpp"

namespace cola {

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "linear") return ScheduleKind::kLinear;
  if (name == "sublinear") return ScheduleKind::kSublinear;
  if (name == "zero") return ScheduleKind::kZero;
  fail(ErrorCode::kInvalidArgument,
       "unknown censor kind '" + name + "' (expected linear|sublinear|zero)");
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kLinear: return "linear";
    case ScheduleKind::kSublinear: return "sublinear";
    case ScheduleKind::kZero: return "zero";
  }
  return "?";
}

ThresholdSchedule ThresholdSchedule::zero() {
  return ThresholdSchedule(ScheduleKind::kZero, 0.0, 0.0, 0.0);
}

ThresholdSchedule ThresholdSchedule::linear(double alpha, double beta) {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
  require(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
  return ThresholdSchedule(ScheduleKind::kLinear, alpha, beta, 0.0);
}

ThresholdSchedule ThresholdSchedule::sublinear(double alpha, double r) {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
  require(std::isfinite(r) && r > 1.0, "r must be > 1");
  return ThresholdSchedule(ScheduleKind::kSublinear, alpha, 0.0, r);
}

double ThresholdSchedule::at(long k) const {
  require(k >= 0, "iteration index must be >= 0");
  switch (kind_) {
    case ScheduleKind::kLinear:
      return alpha_ * std::pow(beta_, static_cast<double>(k));
    case ScheduleKind::kSublinear:
      // k^(-r) is undefined at 0; tau^0 = alpha keeps the sequence monotone.
      if (k == 0) return alpha_;
      return alpha_ * std::pow(static_cast<double>(k), -r_);
    case ScheduleKind::kZero:
      return 0.0;
  }
  return 0.0;
}

std::string ThresholdSchedule::describe() const {
  std::string out = to_string(kind_);
  if (kind_ == ScheduleKind::kLinear)
    out += "(alpha=" + shortest(alpha_) + ", beta=" + shortest(beta_) + ")";
  else if (kind_ == ScheduleKind::kSublinear)
    out += "(alpha=" + shortest(alpha_) + ", r=" + shortest(r_) + ")";
  return out;
}

CensorOutcome censor_decide(const Eigen::VectorXd& xhat_prev,
                            const Eigen::VectorXd& candidate, double tau) {
  require(xhat_prev.size() == candidate.size(),
          "censor_decide: dimension mismatch");
  require(tau >= 0.0, "censor_decide: tau must be >= 0");
  CensorOutcome out;
  out.xi = (xhat_prev - candidate).norm();
  out.transmit = out.xi >= tau;
  out.xhat_new = out.transmit ? candidate : xhat_prev;
  return out;
}

}  // namespace cola
