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

#ifndef COLA_TRACE_HPP_
#define COLA_TRACE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cola {

// One per iteration, row 0 being the initial state.
struct TraceRow {
  long k = 0;
  double accuracy = 0.0;
  long broadcasts = 0;
  long cum_broadcasts = 0;
  std::optional<double> energy;
  std::optional<double> r_grad;
  std::optional<double> r_cons;
  double wall_ms = 0.0;

  bool operator==(const TraceRow&) const = default;
};

enum class RunStatus { kOk, kDiverged, kFailed };

std::string to_string(RunStatus status);

struct RunTrace {
  std::string label;
  std::vector<TraceRow> rows;
  // pattern[k-1][i] == 1 iff node i broadcast in the round producing row k.
  std::vector<std::vector<std::uint8_t>> pattern;

  // Per-row protocol checks, not part of the CSV contract.
  std::vector<double> tau;         // tau^k
  std::vector<double> censor_gap;  // max_i ||xhat_i^k - x_i^k||
  std::vector<double> dual_sum;    // ||sum_i mu_i^k||
  std::vector<double> dual_norm;   // ||mu^k||

  RunStatus status = RunStatus::kOk;
  std::string message;
  // Ordered key/value pairs written to the metadata sidecar.
  std::vector<std::pair<std::string, std::string>> metadata;

  long iterations() const {
    return rows.empty() ? 0 : rows.back().k;
  }

  // First row reaching `target`, or nullptr.
  const TraceRow* first_reaching(double target) const {
    for (const auto& row : rows)
      if (row.accuracy <= target) return &row;
    return nullptr;
  }
};

}  // namespace cola

#endif  // COLA_TRACE_HPP_
