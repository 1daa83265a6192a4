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

#ifndef COLA_CONFIG_HPP_
#define COLA_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cola/algorithms.hpp"
#include "cola/graph.hpp"

namespace cola {

// Experiment description.
//
// The text format is line based: `key = value` with dotted keys, `#`
// comments, and `[section]` headers that prefix the keys below them. So
//
//   [algorithm.cola]
//   censor.alpha = 0.7
//
// sets `algorithm.cola.censor.alpha`. Unknown keys are rejected.
struct TopologySpec {
  TopologyKind kind = TopologyKind::kLine;
  int n = 0;
  std::optional<double> edge_fraction;
  std::uint64_t seed = 1;
};

struct ProblemSpec {
  std::string kind = "ls";  // ls | logistic
  int p = 1;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  TopologySpec topology;
  ProblemSpec problem;
  // When set, network.csv and the problem files are read from here instead
  // of being generated.
  std::optional<std::string> instance_dir;

  std::vector<AlgorithmSpec> algorithms;
  long max_iter = 1000;
  double target_accuracy = 1e-8;
  bool early_stop = true;

  int replicates = 1;
  int threads = 1;
  BroadcastUnit broadcast_unit = BroadcastUnit::kNode;
  double xstar_tolerance = 1e-12;
  long xstar_reference_iters = 100000;

  std::string output_dir = "out";
  bool censor_pattern = false;
  bool record_energy = false;
  bool record_kkt = false;

  // Every accepted key with its effective value, sorted by key.
  std::map<std::string, std::string> entries;

  std::string canonical_text() const;
  std::uint64_t hash() const;
  std::optional<std::string> get(const std::string& key) const;
};

// Raw key/value view of a config text, in file order.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<ConfigEntry> parse_config_entries(const std::string& text,
                                              const std::string& source);

// Parses and validates. Throws kConfig listing every problem found.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source = "<inline>");
ExperimentConfig load_config(const std::string& path);

// Applies `key = value` overrides and re-validates.
ExperimentConfig with_overrides(
    const ExperimentConfig& base,
    const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace cola

#endif  // COLA_CONFIG_HPP_
