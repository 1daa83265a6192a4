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

// cola-sim: command-line front end over the C API.
//
//   cola-sim run --config <path> [--out <dir>] [--seed-override N]
//                [--max-iter N] [--set key=value]...
//   cola-sim validate --config <path> [--set key=value]...
//   cola-sim gen --topology <kind> --n N [--edge-fraction f] ...
//
// Exit codes: 0 success, 1 config error, 2 run divergence, 3 IO.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cola_sim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitIo = 3;

int exit_code(cola_status st) {
  switch (st) {
    case COLA_OK: return kExitOk;
    case COLA_ERR_IO: return kExitIo;
    case COLA_ERR_CONFIG:
    case COLA_ERR_INVALID_ARGUMENT: return kExitConfig;
    default: return kExitDiverged;
  }
}

int report(cola_status st) {
  std::fprintf(stderr, "cola-sim: %s: %s\n", cola_status_name(st),
               cola_last_error());
  return exit_code(st);
}

std::string table_text(const cola_experiment* exp) {
  size_t needed = 0;
  cola_experiment_table(exp, nullptr, 0, &needed);
  std::string text(needed, '\0');
  cola_experiment_table(exp, text.data(), text.size(), &needed);
  if (!text.empty()) text.pop_back();
  return text;
}

struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;
};

// Loads the config and applies --set overrides in order.
cola_status open_config(const ConfigArgs& args, cola_config** cfg) {
  cola_status st = cola_config_load_file(args.path.c_str(), cfg);
  if (st != COLA_OK) return st;
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    // A missing '=' leaves an empty value, which the config rejects.
    const std::string key = kv.substr(0, eq);
    const std::string value = eq == std::string::npos ? "" : kv.substr(eq + 1);
    st = cola_config_set(*cfg, key.c_str(), value.c_str());
    if (st != COLA_OK) return st;
  }
  return COLA_OK;
}

int cmd_run(const ConfigArgs& args, const std::string& out_dir,
            const std::string& seed_override, const std::string& max_iter) {
  cola_config* cfg = nullptr;
  cola_status st = open_config(args, &cfg);
  if (st == COLA_OK && !seed_override.empty()) {
    st = cola_config_set(cfg, "topology.seed", seed_override.c_str());
    if (st == COLA_OK)
      st = cola_config_set(cfg, "problem.seed", seed_override.c_str());
  }
  if (st == COLA_OK && !max_iter.empty())
    st = cola_config_set(cfg, "stop.max_iter", max_iter.c_str());
  if (st != COLA_OK) {
    cola_config_free(cfg);
    return report(st);
  }

  std::string dir = out_dir;
  if (dir.empty()) {
    char buf[4096];
    if (cola_config_get(cfg, "output.dir", buf, sizeof buf, nullptr) == COLA_OK)
      dir = buf;
    else
      dir = "out";
  }

  cola_experiment* exp = nullptr;
  st = cola_experiment_run(cfg, &exp);
  cola_config_free(cfg);
  if (st != COLA_OK) return report(st);

  st = cola_experiment_write(exp, dir.c_str());
  if (st != COLA_OK) {
    cola_experiment_free(exp);
    return report(st);
  }
  std::fputs(table_text(exp).c_str(), stdout);
  std::printf("\nwrote %s\n", dir.c_str());

  int code = kExitOk;
  for (size_t i = 0; i < cola_experiment_run_count(exp); ++i) {
    cola_run_info info;
    cola_experiment_run_info(exp, i, &info);
    if (info.status != COLA_RUN_OK) {
      std::fprintf(stderr, "cola-sim: run %s (replicate %d) %s\n", info.label,
                   info.replicate,
                   info.status == COLA_RUN_DIVERGED ? "diverged" : "failed");
      code = kExitDiverged;
    }
  }
  cola_experiment_free(exp);
  return code;
}

int cmd_validate(const ConfigArgs& args) {
  cola_config* cfg = nullptr;
  cola_status st = open_config(args, &cfg);
  if (st != COLA_OK) {
    cola_config_free(cfg);
    return report(st);
  }
  size_t needed = 0;
  st = cola_config_validate(cfg, nullptr, 0, &needed);
  if (st == COLA_OK) {
    std::string text(needed, '\0');
    st = cola_config_validate(cfg, text.data(), text.size(), &needed);
    text.pop_back();
    std::fputs(text.c_str(), stdout);
  }
  cola_config_free(cfg);
  return st == COLA_OK ? kExitOk : report(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized consensus optimization simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cola_version()));

  ConfigArgs run_args;
  std::string out_dir, seed_override, max_iter;
  auto* run = app.add_subcommand("run", "Run an experiment and write traces");
  run->add_option("--config", run_args.path, "Experiment config file")
      ->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_option("--seed-override", seed_override,
                  "Base seed for topology and problem");
  run->add_option("--max-iter", max_iter, "Override stop.max_iter");
  run->add_option("--set", run_args.sets, "Override a config key (key=value)");

  ConfigArgs val_args;
  auto* validate =
      app.add_subcommand("validate", "Print constants and parameter checks");
  validate->add_option("--config", val_args.path, "Experiment config file")
      ->required();
  validate->add_option("--set", val_args.sets,
                       "Override a config key (key=value)");

  std::string topology, problem, gen_out;
  int n = 0, p = 3;
  double edge_fraction = 0.0;
  uint64_t topology_seed = 1, problem_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate and pin an instance");
  gen->add_option("--topology", topology, "line|star|complete|random")
      ->required();
  gen->add_option("--n", n, "Node count")->required();
  gen->add_option("--edge-fraction", edge_fraction,
                  "Fraction of possible edges (random only)");
  gen->add_option("--topology-seed", topology_seed, "Topology seed");
  gen->add_option("--problem", problem, "ls|logistic")->required();
  gen->add_option("--p", p, "Variable dimension");
  gen->add_option("--problem-seed", problem_seed, "Problem seed");
  gen->add_option("--out", gen_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return cmd_run(run_args, out_dir, seed_override, max_iter);
  if (*validate) return cmd_validate(val_args);

  cola_instance_spec spec{topology.c_str(), n,       edge_fraction,
                          topology_seed,    problem.c_str(), p,
                          problem_seed};
  const cola_status st = cola_generate_instance(&spec, gen_out.c_str());
  if (st != COLA_OK) return report(st);
  std::printf("wrote %s\n", gen_out.c_str());
  return kExitOk;
}
