// Copyright 2026 The osrepair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osr/cli.hpp"

namespace {

void add_config_flags(CLI::App* cmd, osr::cli::RunConfig& config,
                      std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override)");
  cmd->add_option("--gamma", config.gamma, "enhancement constant (> 0)");
  cmd->add_option("--kappa", config.kappa, "training neighborhood size");
  cmd->add_option("--k", config.k, "providers per tuple");
  cmd->add_option("--G", config.G, "normalization constant (< 0 for auto)");
  cmd->add_option("--model", config.model_kind,
                  "regressor: linear|ridge|tree|gaussian");
  cmd->add_option("--m", config.model_pool, "model pool size (< 0 for all)");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--epsilon", config.epsilon, "fractionality tolerance");
  cmd->add_option("--sidecar", config.sidecar, "typing sidecar path");
  cmd->add_flag("--fill-missing", config.fill_missing,
                "replace empty cells with the column mode");
  cmd->add_flag("--timing", config.timing, "record wall time in reports");
  cmd->add_option("--dump-losses", config.dump_losses,
                  "write per-tuple loss diagnostics to this CSV");
  cmd->add_option("--dump-lp", config.dump_lp,
                  "write the optimization model in LP format");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal subset repair under denial constraints"};
  app.require_subcommand(1);

  std::string data, dcs, out = "-", truth, report;
  std::string out_data, out_truth, axis;
  std::vector<std::string> kinds, values;
  double rate = 0.1;
  osr::cli::RunConfig config;
  std::string config_path;

  // A config file provides the baseline; flags parsed afterwards override it.
  for (int a = 1; a + 1 < argc; ++a) {
    if (std::string(argv[a]) == "--config") {
      try {
        config = osr::cli::load_config(argv[a + 1]);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return osr::cli::kExitUsage;
      }
      break;
    }
  }

  CLI::App* repair = app.add_subcommand("repair", "compute a removal set");
  repair->add_option("--data", data, "input CSV")->required();
  repair->add_option("--dcs", dcs, "denial constraint file")->required();
  repair->add_option("--method", config.method, "exact|clique|prob");
  repair->add_option("--out", out, "report path ('-' for stdout)");
  add_config_flags(repair, config, config_path);

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a repair report");
  evaluate->add_option("--report", report, "repair report path")->required();
  evaluate->add_option("--truth", truth, "ground-truth id list")->required();
  evaluate->add_option("--out", out, "report path ('-' for stdout)");

  CLI::App* inject = app.add_subcommand("inject", "corrupt a clean relation");
  inject->add_option("--data", data, "clean input CSV")->required();
  inject->add_option("--rate", rate, "fraction of tuples to corrupt")->required();
  inject->add_option("--kinds", kinds, "typo|duplicate|bogus|outlier");
  inject->add_option("--seed", config.seed, "random seed");
  inject->add_option("--out-data", out_data, "dirty CSV path")->required();
  inject->add_option("--out-truth", out_truth, "truth id list path")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "repair+evaluate over a parameter");
  sweep->add_option("--data", data, "input CSV")->required();
  sweep->add_option("--dcs", dcs, "denial constraint file")->required();
  sweep->add_option("--truth", truth, "ground-truth id list")->required();
  sweep->add_option("--axis", axis, "gamma|kappa|k|m|model_kind")->required();
  sweep->add_option("--values", values, "axis values")->required();
  sweep->add_option("--method", config.method, "exact|clique|prob");
  sweep->add_option("--out", out, "CSV path ('-' for stdout)");
  add_config_flags(sweep, config, config_path);

  CLI::App* detect = app.add_subcommand("detect", "list conflicts only");
  detect->add_option("--data", data, "input CSV")->required();
  detect->add_option("--dcs", dcs, "denial constraint file")->required();
  detect->add_option("--out", out, "report path ('-' for stdout)");
  detect->add_option("--sidecar", config.sidecar, "typing sidecar path");
  detect->add_flag("--fill-missing", config.fill_missing,
                   "replace empty cells with the column mode");

  CLI11_PARSE(app, argc, argv);

  try {
    if (repair->parsed())
      return osr::cli::cmd_repair(data, dcs, config, out);
    if (evaluate->parsed())
      return osr::cli::cmd_evaluate(report, truth, out);
    if (inject->parsed())
      return osr::cli::cmd_inject(data, rate, kinds, config.seed, out_data, out_truth);
    if (sweep->parsed())
      return osr::cli::cmd_sweep(data, dcs, truth, config, axis, values, out);
    if (detect->parsed())
      return osr::cli::cmd_detect(data, dcs, config, out);
  } catch (const osr::ConstraintParseError& e) {
    std::cerr << "constraint parse error: " << e.what() << "\n";
    return osr::cli::kExitConstraintParse;
  } catch (const osr::SolveError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return osr::cli::kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return osr::cli::kExitUsage;
  }
  return osr::cli::kExitUsage;
}
