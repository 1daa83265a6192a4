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

#include "cola/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cola/error.hpp"
#include "cola/format.hpp"

namespace cola {

namespace {

std::string fmt(double v) { return shortest(v); }

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorCode::kIo, "failed writing " + path);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.k << ',' << fmt(r.accuracy) << ',' << r.broadcasts << ','
        << r.cum_broadcasts << ',' << fmt(r.energy) << ',' << fmt(r.r_grad)
        << ',' << fmt(r.r_cons) << ',' << fmt(r.wall_ms) << '\n';
  }
  finish(out, path);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader)
    fail(ErrorCode::kIo, path + ": unexpected header");
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 8)
      fail(ErrorCode::kIo, path + ":" + std::to_string(lineno) +
                               ": expected 8 columns");
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    try {
      TraceRow r;
      r.k = std::stol(cells[0]);
      r.accuracy = std::stod(cells[1]);
      r.broadcasts = std::stol(cells[2]);
      r.cum_broadcasts = std::stol(cells[3]);
      r.energy = opt(cells[4]);
      r.r_grad = opt(cells[5]);
      r.r_cons = opt(cells[6]);
      r.wall_ms = std::stod(cells[7]);
      rows.push_back(r);
    } catch (const std::exception&) {
      fail(ErrorCode::kIo,
           path + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  return rows;
}

void write_pattern_csv(const RunTrace& trace, const std::string& path) {
  auto out = open_out(path);
  const std::size_t n = trace.pattern.empty() ? 0 : trace.pattern[0].size();
  out << 'k';
  for (std::size_t i = 0; i < n; ++i) out << ",node_" << i;
  out << '\n';
  for (std::size_t t = 0; t < trace.pattern.size(); ++t) {
    out << (t + 1);
    for (auto bit : trace.pattern[t]) out << ',' << static_cast<int>(bit);
    out << '\n';
  }
  finish(out, path);
}

std::vector<std::vector<std::uint8_t>> read_pattern_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::uint8_t>> pattern;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    std::vector<std::uint8_t> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] != "0" && cells[c] != "1")
        fail(ErrorCode::kIo, path + ": pattern cells must be 0 or 1");
      row.push_back(cells[c] == "1" ? 1 : 0);
    }
    pattern.push_back(std::move(row));
  }
  return pattern;
}

void write_metadata(const RunTrace& trace, const std::string& path) {
  auto out = open_out(path);
  for (const auto& [k, v] : trace.metadata) out << k << " = " << v << '\n';
  finish(out, path);
}

void emit_trace(const RunTrace& trace, const std::string& stem) {
  write_trace_csv(trace, stem + ".csv");
  if (!trace.pattern.empty()) write_pattern_csv(trace, stem + "_pattern.csv");
  write_metadata(trace, stem + "_meta.txt");
}

}  // namespace cola
