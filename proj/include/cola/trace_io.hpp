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

#ifndef COLA_TRACE_IO_HPP_
#define COLA_TRACE_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cola/trace.hpp"

namespace cola {

// Fixed column order of the trace CSV.
inline constexpr const char* kTraceHeader =
    "k,accuracy,broadcasts,cum_broadcasts,energy,r_grad,r_cons,wall_ms";

// Optional columns are written empty when absent. Doubles use the shortest round-trip form so the
// file re-parses to the same values.
void write_trace_csv(const RunTrace& trace, const std::string& path);
std::vector<TraceRow> read_trace_csv(const std::string& path);

// 0/1 per (round, node), 1 = broadcast. Header "k,node_0,...".
void write_pattern_csv(const RunTrace& trace, const std::string& path);
std::vector<std::vector<std::uint8_t>> read_pattern_csv(
    const std::string& path);

// `key = value` lines from trace.metadata.
void write_metadata(const RunTrace& trace, const std::string& path);

// Writes the three files under `stem` (stem.csv, stem_pattern.csv when a
// pattern was recorded, stem_meta.txt).
void emit_trace(const RunTrace& trace, const std::string& stem);

}  // namespace cola

#endif  // COLA_TRACE_IO_HPP_
