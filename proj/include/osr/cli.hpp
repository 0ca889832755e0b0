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

#ifndef OSR_CLI_HPP_
#define OSR_CLI_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "osr/repair.hpp"

namespace osr::cli {

// Exit codes shared by the command entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConstraintParse = 2;
inline constexpr int kExitSolverFailure = 3;

struct RunConfig {
  double gamma = 0.2;
  int kappa = 10;
  int k = 4;
  double G = -1.0;                  // < 0 selects auto mode
  std::string model_kind = "linear";
  int model_pool = -1;              // < 0 means all tuples own a model
  std::uint64_t seed = 0;
  double epsilon = 1e-6;
  std::string method = "clique";    // exact | clique | prob
  std::string sidecar;              // optional typing sidecar for the data CSV
  bool fill_missing = false;        // substitute column modes for empty cells
  bool timing = false;              // include wall_time_ms in reports
  std::string dump_losses;          // write per-tuple loss diagnostics CSV
  std::string dump_lp;              // write the (I)LP in LP interchange format

  RepairParams to_params() const;   // solver limits come from the environment
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& config, const std::string& path);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<int> removed_ids;
  double objective = 0.0;
  double wall_time_ms = 0.0;
};

EvalReport evaluate_removal(const std::set<int>& removed, const std::set<int>& truth,
                            int instance_size);

// Ground-truth file: one dirty tuple id per line, `#` comments allowed.
std::set<int> load_truth(const std::string& path);

double outlier_value(double observed_max, double u);

enum class ErrorKind { kTypo, kDuplicate, kBogus, kOutlier };

ErrorKind error_kind_from_string(const std::string& name);

// Corrupts ceil(rate * n) distinct tuples with the requested error kinds and
// writes the dirty CSV plus the ground-truth id list. Deterministic per seed.
void inject_errors(const Instance& clean, double rate,
                   const std::vector<ErrorKind>& kinds, std::uint64_t seed,
                   Instance& dirty, std::set<int>& truth);

// Command entry points. Each writes its report to `out` ("-" for stdout) and
// returns an exit code rather than throwing for the failure classes with
// dedicated codes.
int cmd_repair(const std::string& data, const std::string& dcs,
               const RunConfig& config, const std::string& out);
int cmd_evaluate(const std::string& report, const std::string& truth,
                 const std::string& out);
int cmd_inject(const std::string& data, double rate,
               const std::vector<std::string>& kinds, std::uint64_t seed,
               const std::string& out_data, const std::string& out_truth);
int cmd_sweep(const std::string& data, const std::string& dcs,
              const std::string& truth, const RunConfig& config,
              const std::string& axis, const std::vector<std::string>& values,
              const std::string& out_csv);
int cmd_detect(const std::string& data, const std::string& dcs,
               const RunConfig& config, const std::string& out);

}  // namespace osr::cli

#endif  // OSR_CLI_HPP_
