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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "cola/config.hpp"
#include "cola/error.hpp"
#include "cola/experiment.hpp"
#include "cola/trace_io.hpp"
#include "support.hpp"

using namespace cola;

namespace {

const std::string kSmall = R"(
topology.kind = random
topology.n = 12
topology.edge_fraction = 0.3
topology.seed = 4
problem.kind = ls
problem.p = 2
problem.seed = 4
stop.max_iter = 60
stop.early_stop = false
output.censor_pattern = true
output.energy = true
output.kkt = true

[algorithm.plain]
kind = cola
c = 0.5
rho = 6

[algorithm.censored]
kind = cola
c = 0.5
rho = 6
censor.kind = linear
censor.alpha = 0.7
censor.beta = 0.94
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the wall_ms column (last) from a trace CSV.
std::string without_wall(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal config") {
  auto cfg = parse_config(
      "topology.kind = line\ntopology.n = 3\nproblem.kind = ls\n"
      "algorithm.a.kind = cola\n");
  CHECK(cfg.topology.kind == TopologyKind::kLine);
  CHECK(cfg.topology.n == 3);
  REQUIRE(cfg.algorithms.size() == 1);
  CHECK(cfg.algorithms[0].label == "a");
  CHECK(cfg.algorithms[0].schedule.kind() == ScheduleKind::kZero);
  CHECK(cfg.get("topology.n") == "3");
  CHECK_FALSE(cfg.get("nonsense").has_value());
}

TEST_CASE("config errors") {
  const std::string base =
      "topology.kind = line\ntopology.n = 3\nalgorithm.a.kind = cola\n";
  auto beta = config_error(base +
                           "algorithm.a.censor.kind = linear\n"
                           "algorithm.a.censor.alpha = 0.7\n"
                           "algorithm.a.censor.beta = 1.2\n");
  CHECK(beta.find("beta must be in (0,1)") != std::string::npos);

  auto unknown = config_error(base + "stop.max_iters = 3\n");
  CHECK(unknown.find("stop.max_iters") != std::string::npos);

  auto syntax = config_error(base + "this line has no equals sign\n");
  CHECK(syntax.find(":4") != std::string::npos);

  // Every problem is listed, not just the first.
  auto many = config_error(
      "topology.kind = line\ntopology.n = 1\nproblem.p = 0\n"
      "algorithm.a.kind = cola\nalgorithm.a.c = -1\n");
  CHECK(many.find("topology.n") != std::string::npos);
  CHECK(many.find("problem.p") != std::string::npos);
  CHECK(many.find("algorithm.a.c") != std::string::npos);

  CHECK(config_error("topology.kind = line\ntopology.n = 3\n")
            .find("algorithm") != std::string::npos);
  CHECK_FALSE(config_error(base + "algorithm.a.kind = cola\n").empty());
  CHECK_FALSE(config_error(base + "algorithm.b.kind = dlm\n"
                                  "algorithm.b.censor.kind = linear\n")
                  .empty());
  CHECK_FALSE(config_error(base + "algorithm.b.kind = admm\n"
                                  "algorithm.b.rho = 1\n")
                  .empty());
  CHECK_FALSE(config_error("topology.kind = random\ntopology.n = 5\n"
                           "algorithm.a.kind = cola\n")
                  .empty());
  CHECK_THROWS_AS(load_config("/nonexistent/cola.cfg"), Error);
}

TEST_CASE("paper configuration echoes its parameters") {
  auto cfg = load_config(std::string(COLA_SOURCE_DIR) + "/configs/ls_random.cfg");
  CHECK(cfg.topology.kind == TopologyKind::kRandom);
  CHECK(cfg.topology.n == 50);
  CHECK(*cfg.topology.edge_fraction == 0.1);
  CHECK(cfg.problem.p == 3);
  REQUIRE(cfg.algorithms.size() == 4);
  const auto& dlm = cfg.algorithms[0];
  const auto& cola = cfg.algorithms[1];
  const auto& admm = cfg.algorithms[2];
  const auto& coca = cfg.algorithms[3];
  CHECK(dlm.kind == AlgorithmKind::kDlm);
  CHECK(cola.params.c == 0.45);
  CHECK(cola.params.rho == 1.1);
  CHECK(cola.schedule.alpha() == 0.7);
  CHECK(cola.schedule.beta() == 0.94);
  CHECK(admm.params.c == 0.35);
  CHECK(coca.schedule.alpha() == 0.9);
  CHECK(coca.schedule.beta() == 0.92);
  CHECK(cfg.get("algorithm.cola.censor.beta") == "0.94");

  for (const char* name : {"ls_thresholds.cfg", "logistic_random.cfg",
                           "minimal.cfg"})
    CHECK_NOTHROW(load_config(std::string(COLA_SOURCE_DIR) + "/configs/" +
                              name));
}

TEST_CASE("overrides and hashing") {
  auto cfg = parse_config(kSmall);
  auto other = with_overrides(cfg, {{"topology.seed", "5"}});
  CHECK(other.topology.seed == 5);
  CHECK(other.hash() != cfg.hash());
  CHECK(with_overrides(cfg, {}).hash() == cfg.hash());
  CHECK(parse_config(kSmall).canonical_text() == cfg.canonical_text());
  CHECK_THROWS_AS(with_overrides(cfg, {{"topology.n", ""}}), Error);
  CHECK_THROWS_AS(with_overrides(cfg, {{"algorithm.plain.censor.beta", "2"}}),
                  Error);
}

TEST_CASE("experiment runs share one instance") {
  auto cfg = parse_config(kSmall);
  auto res = run_experiment(cfg);
  REQUIRE(res.runs.size() == 2);
  REQUIRE(res.instances.size() == 1);
  const int n = 12;
  const auto& plain = res.runs[0].trace;
  const auto& censored = res.runs[1].trace;
  CHECK(plain.rows.size() == 61);
  for (const auto& row : plain.rows) CHECK(row.cum_broadcasts == n * row.k);
  CHECK(censored.rows.back().cum_broadcasts < n * 60);
  for (const auto& run : res.runs) {
    CHECK(run.trace.rows[0].accuracy == doctest::Approx(1.0));
    CHECK(run.trace.rows[0].energy.has_value());
    CHECK(run.trace.rows[5].r_grad.has_value());
    for (std::size_t k = 1; k < run.trace.rows.size(); ++k)
      CHECK(run.trace.rows[k].cum_broadcasts >=
            run.trace.rows[k - 1].cum_broadcasts);
    auto check = testing::check_protocol(run.trace, true);
    CHECK(check.censor_bound);
    CHECK(check.dual_sum);
  }
  CHECK_FALSE(res.any_failed());
  REQUIRE(res.table.size() == 2);
  CHECK(res.table[0].algorithm == "plain");

  // Same instance when rebuilt from the config, and the x* used is the
  // centralized optimum.
  Instance again = make_instance(cfg, 0);
  CHECK(again.network == res.instances[0].network);
  CHECK(again.xstar == res.instances[0].xstar);
  CHECK(aggregate_gradient(*again.problem, again.xstar).norm() <= 1e-10);

  // Replicates use shifted seeds and get a median row.
  auto reps = run_experiment(with_overrides(cfg, {{"experiment.replicates", "3"}}));
  CHECK(reps.runs.size() == 6);
  CHECK(reps.instances[1].topology_seed == 5);
  CHECK(reps.table.size() == 8);
  CHECK(reps.table[3].replicate == "median");
}

TEST_CASE("outputs are deterministic and threads do not matter") {
  auto cfg = parse_config(kSmall);
  auto d1 = testing::temp_dir("det1");
  auto d2 = testing::temp_dir("det2");
  write_experiment(run_experiment(cfg), d1.string());
  write_experiment(
      run_experiment(with_overrides(cfg, {{"experiment.threads", "2"}})),
      d2.string());
  for (const char* f : {"plain_r0.csv", "censored_r0.csv"})
    CHECK(without_wall(slurp(d1 / f)) == without_wall(slurp(d2 / f)));
  for (const char* f : {"plain_r0_pattern.csv", "censored_r0_pattern.csv"})
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  // Metadata differs only in the config hash (threads is a config key).
  CHECK(slurp(d1 / "plain_r0_meta.txt").find("thm1_ok") != std::string::npos);
  CHECK(std::filesystem::exists(d1 / "comparison.csv"));
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("trace files") {
  auto dir = testing::temp_dir("trace");
  RunTrace toy;
  toy.label = "toy";
  for (long k = 0; k < 3; ++k) {
    TraceRow r;
    r.k = k;
    r.accuracy = std::pow(0.5, k) / 3.0;
    r.broadcasts = k ? 2 : 0;
    r.cum_broadcasts = 2 * k;
    if (k == 1) r.energy = 1.0 / 7.0;
    if (k == 2) {
      r.r_grad = 1e-300;
      r.r_cons = 0.1;
    }
    r.wall_ms = 0.125 * k;
    toy.rows.push_back(r);
  }
  write_trace_csv(toy, (dir / "toy.csv").string());
  const std::string text = slurp(dir / "toy.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.substr(0, text.find('\n')) == kTraceHeader);
  CHECK(read_trace_csv((dir / "toy.csv").string()) == toy.rows);

  // A real run, all columns populated.
  auto cfg = parse_config(kSmall);
  auto res = run_experiment(cfg);
  const auto& trace = res.runs[1].trace;
  emit_trace(trace, (dir / "run").string());
  CHECK(read_trace_csv((dir / "run.csv").string()) == trace.rows);
  CHECK(read_pattern_csv((dir / "run_pattern.csv").string()) == trace.pattern);
  CHECK(slurp(dir / "run_meta.txt").find("label = censored") !=
        std::string::npos);

  // Zero schedule: every entry of the pattern is 1.
  auto ones = read_pattern_csv((dir / "run_pattern.csv").string());
  emit_trace(res.runs[0].trace, (dir / "zero").string());
  for (const auto& round : read_pattern_csv((dir / "zero_pattern.csv").string()))
    for (auto bit : round) CHECK(bit == 1);

  CHECK_THROWS_AS(read_trace_csv((dir / "absent.csv").string()), Error);
  CHECK_THROWS_AS(write_trace_csv(toy, (dir / "no/such/dir/t.csv").string()),
                  Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("instances can be pinned to files") {
  auto dir = testing::temp_dir("instance");
  auto net = build_topology(TopologyKind::kRandom, 12, 0.3, 9);
  auto prob = ls_generate(12, 2, 9);
  write_network(net, (dir / "network.csv").string());
  write_problem(*prob, dir.string());
  auto cfg = parse_config("instance.dir = " + dir.string() +
                          "\nalgorithm.a.kind = dlm\nalgorithm.a.rho = 6\n"
                          "stop.max_iter = 10\n");
  Instance inst = make_instance(cfg, 0);
  CHECK(inst.network == net);
  CHECK(inst.problem->value(3, Vec::Ones(2)) == prob->value(3, Vec::Ones(2)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a failing run does not stop its siblings") {
  auto cfg = parse_config(R"(
topology.kind = line
topology.n = 5
problem.kind = ls
problem.p = 2
problem.seed = 3
stop.max_iter = 3000
[algorithm.wild]
kind = cola
c = 0.001
rho = 0.001
[algorithm.calm]
kind = cola
c = 1
rho = 5
)");
  auto res = run_experiment(cfg);
  REQUIRE(res.runs.size() == 2);
  CHECK(res.runs[0].trace.status == RunStatus::kDiverged);
  CHECK(res.runs[1].trace.status == RunStatus::kOk);
  CHECK(res.any_failed());
  CHECK(format_table(res.table).find("diverged") != std::string::npos);
}

}  // TEST_SUITE
