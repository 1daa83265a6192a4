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

#include "cola/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cola/error.hpp"

namespace cola {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char ch : key)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
          ch == '.' || ch == '-'))
      return false;
  return key.find("..") == std::string::npos;
}

const std::set<std::string> kGlobalKeys = {
    "topology.kind",        "topology.n",
    "topology.edge_fraction", "topology.seed",
    "problem.kind",         "problem.p",
    "problem.seed",         "instance.dir",
    "stop.max_iter",        "stop.target_accuracy",
    "stop.early_stop",      "experiment.replicates",
    "experiment.threads",   "experiment.broadcast_unit",
    "experiment.xstar_tolerance", "experiment.xstar_reference_iters",
    "output.dir",           "output.censor_pattern",
    "output.energy",        "output.kkt",
};

const std::set<std::string> kAlgorithmKeys = {
    "kind",        "c",           "rho",          "step_scale",
    "subproblem_tol", "censor.kind", "censor.alpha", "censor.beta",
    "censor.r",
};

// Collects every validation error instead of stopping at the first.
class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& entries)
      : entries_(entries) {}

  std::optional<std::string> raw(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used != v->size() || !std::isfinite(d)) throw std::invalid_argument(*v);
      return d;
    } catch (const std::exception&) {
      error(key + ": expected a finite number, got '" + *v + "'");
      return fallback;
    }
  }

  long integer(const std::string& key, long fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const long long d = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return static_cast<long>(d);
    } catch (const std::exception&) {
      error(key + ": expected an integer, got '" + *v + "'");
      return fallback;
    }
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument(*v);
      const auto d = std::stoull(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return d;
    } catch (const std::exception&) {
      error(key + ": expected a non-negative integer seed, got '" + *v + "'");
      return fallback;
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    error(key + ": expected true|false, got '" + *v + "'");
    return fallback;
  }

  void error(const std::string& what) { errors_.push_back(what); }
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  const std::map<std::string, std::string>& entries_;
  std::vector<std::string> errors_;
};

ExperimentConfig build_config(std::map<std::string, std::string> entries,
                              std::vector<std::string> ordered_algorithms) {
  ExperimentConfig cfg;
  Reader rd(entries);

  // Unknown keys first: fail closed.
  for (const auto& [key, value] : entries) {
    if (kGlobalKeys.count(key)) continue;
    if (key.rfind("algorithm.", 0) == 0) {
      const auto rest = key.substr(10);
      const auto dot = rest.find('.');
      if (dot != std::string::npos && kAlgorithmKeys.count(rest.substr(dot + 1)))
        continue;
    }
    rd.error("unknown key '" + key + "'");
  }

  // Topology.
  if (auto kind = rd.raw("topology.kind")) {
    try {
      cfg.topology.kind = parse_topology_kind(*kind);
    } catch (const Error& e) {
      rd.error(std::string("topology.kind: ") + e.what());
    }
  } else if (!rd.raw("instance.dir")) {
    rd.error("topology.kind is required");
  }
  cfg.topology.n = static_cast<int>(rd.integer("topology.n", 0));
  if (!rd.raw("instance.dir") && cfg.topology.n < 2)
    rd.error("topology.n must be >= 2");
  if (rd.raw("topology.edge_fraction")) {
    const double f = rd.number("topology.edge_fraction", 0.0);
    if (!(f > 0.0 && f <= 1.0)) rd.error("edge_fraction must be in (0,1]");
    cfg.topology.edge_fraction = f;
  }
  if (cfg.topology.kind == TopologyKind::kRandom &&
      !cfg.topology.edge_fraction && !rd.raw("instance.dir"))
    rd.error("topology.edge_fraction is required for the random topology");
  if (cfg.topology.kind != TopologyKind::kRandom && cfg.topology.edge_fraction)
    rd.error("topology.edge_fraction only applies to the random topology");
  if (cfg.topology.kind == TopologyKind::kRandom && cfg.topology.edge_fraction &&
      cfg.topology.n >= 2 &&
      random_edge_count(cfg.topology.n, *cfg.topology.edge_fraction) <
          cfg.topology.n - 1)
    rd.error("edge_fraction selects fewer than n-1 edges; graph cannot be "
             "connected");
  cfg.topology.seed = rd.seed("topology.seed", 1);

  // Problem.
  cfg.problem.kind = rd.raw("problem.kind").value_or("ls");
  if (cfg.problem.kind != "ls" && cfg.problem.kind != "logistic")
    rd.error("problem.kind must be ls|logistic");
  cfg.problem.p = static_cast<int>(rd.integer("problem.p", 1));
  if (cfg.problem.p < 1) rd.error("problem.p must be >= 1");
  if (cfg.problem.kind == "logistic" && cfg.problem.p < 2)
    rd.error("problem.p must be >= 2 for logistic problems");
  cfg.problem.seed = rd.seed("problem.seed", 1);
  cfg.instance_dir = rd.raw("instance.dir");

  // Stop criteria.
  cfg.max_iter = rd.integer("stop.max_iter", 1000);
  if (cfg.max_iter < 1) rd.error("stop.max_iter must be >= 1");
  cfg.target_accuracy = rd.number("stop.target_accuracy", 1e-8);
  if (!(cfg.target_accuracy > 0.0))
    rd.error("stop.target_accuracy must be > 0");
  cfg.early_stop = rd.boolean("stop.early_stop", true);

  // Experiment.
  cfg.replicates = static_cast<int>(rd.integer("experiment.replicates", 1));
  if (cfg.replicates < 1) rd.error("experiment.replicates must be >= 1");
  if (cfg.instance_dir && cfg.replicates != 1)
    rd.error("experiment.replicates must be 1 with instance.dir");
  cfg.threads = static_cast<int>(rd.integer("experiment.threads", 1));
  if (cfg.threads < 1) rd.error("experiment.threads must be >= 1");
  const auto unit = rd.raw("experiment.broadcast_unit").value_or("node");
  if (unit == "node") cfg.broadcast_unit = BroadcastUnit::kNode;
  else if (unit == "arc") cfg.broadcast_unit = BroadcastUnit::kArc;
  else rd.error("experiment.broadcast_unit must be node|arc");
  cfg.xstar_tolerance = rd.number("experiment.xstar_tolerance", 1e-12);
  if (!(cfg.xstar_tolerance > 0.0))
    rd.error("experiment.xstar_tolerance must be > 0");
  cfg.xstar_reference_iters =
      rd.integer("experiment.xstar_reference_iters", 100000);
  if (cfg.xstar_reference_iters < 0)
    rd.error("experiment.xstar_reference_iters must be >= 0");

  // Output.
  cfg.output_dir = rd.raw("output.dir").value_or("out");
  cfg.censor_pattern = rd.boolean("output.censor_pattern", false);
  cfg.record_energy = rd.boolean("output.energy", false);
  cfg.record_kkt = rd.boolean("output.kkt", false);

  // Algorithms, in the order they were first mentioned.
  if (ordered_algorithms.empty()) rd.error("at least one [algorithm.<name>] is required");
  for (const auto& name : ordered_algorithms) {
    const std::string pre = "algorithm." + name + ".";
    AlgorithmSpec spec;
    spec.label = name;
    const auto kind_text = rd.raw(pre + "kind");
    if (!kind_text) {
      rd.error(pre + "kind is required");
      continue;
    }
    try {
      spec.kind = parse_algorithm_kind(*kind_text);
    } catch (const Error& e) {
      rd.error(pre + "kind: " + e.what());
      continue;
    }
    spec.params.c = rd.number(pre + "c", 1.0);
    if (spec.kind != AlgorithmKind::kEtsd && !(spec.params.c > 0.0))
      rd.error(pre + "c must be > 0");
    spec.params.rho = rd.number(pre + "rho", 1.0);
    if (is_linearized(spec.kind) && !(spec.params.rho > 0.0))
      rd.error(pre + "rho must be > 0");
    if (!is_linearized(spec.kind) && rd.raw(pre + "rho"))
      rd.error(pre + "rho only applies to cola/dlm");
    spec.params.etsd_step_scale = rd.number(pre + "step_scale", 0.5);
    if (!(spec.params.etsd_step_scale > 0.0))
      rd.error(pre + "step_scale must be > 0");
    if (spec.kind != AlgorithmKind::kEtsd && rd.raw(pre + "step_scale"))
      rd.error(pre + "step_scale only applies to etsd");
    if (spec.kind == AlgorithmKind::kEtsd && rd.raw(pre + "c"))
      rd.error(pre + "c does not apply to etsd");
    spec.params.subproblem_tol = rd.number(pre + "subproblem_tol", 1e-8);
    if (!(spec.params.subproblem_tol > 0.0))
      rd.error(pre + "subproblem_tol must be > 0");

    const auto ckind = rd.raw(pre + "censor.kind").value_or("zero");
    const double alpha = rd.number(pre + "censor.alpha", 0.0);
    const double beta = rd.number(pre + "censor.beta", 0.5);
    const double r = rd.number(pre + "censor.r", 2.0);
    if ((spec.kind == AlgorithmKind::kDlm || spec.kind == AlgorithmKind::kAdmm) &&
        ckind != "zero")
      rd.error(pre + "censor.kind must be zero for " + *kind_text);
    // A parameter the chosen schedule ignores is almost certainly a typo.
    auto unused = [&](const char* what) {
      if (rd.raw(pre + "censor." + what))
        rd.error(pre + "censor." + what + " has no effect with censor.kind = " +
                 ckind);
    };
    if (ckind != "linear") unused("beta");
    if (ckind != "sublinear") unused("r");
    if (ckind == "zero") unused("alpha");
    if (ckind == "linear") {
      if (!(alpha >= 0.0)) rd.error(pre + "censor.alpha must be >= 0");
      if (!(beta > 0.0 && beta < 1.0)) rd.error(pre + "censor.beta: beta must be in (0,1)");
      if (!rd.raw(pre + "censor.alpha") || !rd.raw(pre + "censor.beta"))
        rd.error(pre + "linear censoring needs censor.alpha and censor.beta");
      if (alpha >= 0.0 && beta > 0.0 && beta < 1.0)
        spec.schedule = ThresholdSchedule::linear(alpha, beta);
    } else if (ckind == "sublinear") {
      if (!(alpha >= 0.0)) rd.error(pre + "censor.alpha must be >= 0");
      if (!(r > 1.0)) rd.error(pre + "censor.r: r must be > 1");
      if (!rd.raw(pre + "censor.alpha") || !rd.raw(pre + "censor.r"))
        rd.error(pre + "sublinear censoring needs censor.alpha and censor.r");
      if (alpha >= 0.0 && r > 1.0)
        spec.schedule = ThresholdSchedule::sublinear(alpha, r);
    } else if (ckind == "zero") {
      spec.schedule = ThresholdSchedule::zero();
    } else {
      rd.error(pre + "censor.kind must be linear|sublinear|zero");
    }
    cfg.algorithms.push_back(std::move(spec));
  }

  if (!rd.errors().empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : rd.errors()) msg += "\n  " + e;
    fail(ErrorCode::kConfig, msg);
  }
  cfg.entries = std::move(entries);
  return cfg;
}

std::vector<std::string> algorithm_order(
    const std::vector<std::string>& keys_in_order) {
  std::vector<std::string> names;
  for (const auto& key : keys_in_order) {
    if (key.rfind("algorithm.", 0) != 0) continue;
    const auto rest = key.substr(10);
    const auto name = rest.substr(0, rest.find('.'));
    if (name.empty() || rest.find('.') == std::string::npos) continue;
    if (std::find(names.begin(), names.end(), name) == names.end())
      names.push_back(name);
  }
  return names;
}

}  // namespace

std::vector<ConfigEntry> parse_config_entries(const std::string& text,
                                              const std::string& source) {
  std::vector<ConfigEntry> out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorCode::kConfig, where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section))
        fail(ErrorCode::kConfig, where + "bad section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::kConfig, where + "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      fail(ErrorCode::kConfig, where + "bad key '" + key + "'");
    if (!section.empty()) key = section + "." + key;
    if (value.empty())
      fail(ErrorCode::kConfig, where + "missing value for '" + key + "'");
    if (!seen.insert(key).second)
      fail(ErrorCode::kConfig, where + "duplicate key '" + key + "'");
    out.push_back({key, value, lineno});
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source) {
  const auto parsed = parse_config_entries(text, source);
  std::map<std::string, std::string> entries;
  std::vector<std::string> order;
  for (const auto& e : parsed) {
    entries[e.key] = e.value;
    order.push_back(e.key);
  }
  return build_config(std::move(entries), algorithm_order(order));
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

ExperimentConfig with_overrides(
    const ExperimentConfig& base,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  auto entries = base.entries;
  std::vector<std::string> order;
  for (const auto& a : base.algorithms) order.push_back("algorithm." + a.label + ".kind");
  for (const auto& [key, value] : overrides) {
    if (!valid_key(key)) fail(ErrorCode::kConfig, "bad override key '" + key + "'");
    if (trim(value).empty())
      fail(ErrorCode::kConfig, "missing value for override '" + key + "'");
    entries[key] = trim(value);
    order.push_back(key);
  }
  return build_config(std::move(entries), algorithm_order(order));
}

std::string ExperimentConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_text()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::optional<std::string> ExperimentConfig::get(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

}  // namespace cola
