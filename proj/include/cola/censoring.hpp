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

#ifndef COLA_CENSORING_HPP_
#define COLA_CENSORING_HPP_

#include <string>

#include <Eigen/Dense>

namespace cola {

enum class ScheduleKind { kLinear, kSublinear, kZero };

ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

// Censoring threshold sequence tau^k.
//   linear:    alpha * beta^k,   beta in (0, 1)
//   sublinear: alpha * k^(-r),   r > 1, with tau^0 = alpha
//   zero:      0 (no censoring)
// Every kind is non-negative, non-increasing and summable.
class ThresholdSchedule {
 public:
  static ThresholdSchedule zero();
  static ThresholdSchedule linear(double alpha, double beta);
  static ThresholdSchedule sublinear(double alpha, double r);

  double at(long k) const;

  ScheduleKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double r() const { return r_; }

  std::string describe() const;

 private:
  ThresholdSchedule(ScheduleKind kind, double alpha, double beta, double r)
      : kind_(kind), alpha_(alpha), beta_(beta), r_(r) {}

  ScheduleKind kind_;
  double alpha_;
  double beta_;
  double r_;
};

inline double threshold_at(const ThresholdSchedule& sched, long k) {
  return sched.at(k);
}

struct CensorOutcome {
  bool transmit = false;
  Eigen::VectorXd xhat_new;
  double xi = 0.0;
};

// Transmit iff ||xhat_prev - candidate|| >= tau; ties transmit.
CensorOutcome censor_decide(const Eigen::VectorXd& xhat_prev,
                            const Eigen::VectorXd& candidate, double tau);

}  // namespace cola

#endif  // COLA_CENSORING_HPP_
