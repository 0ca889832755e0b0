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

#include "osr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace osr::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["gamma"] = c.gamma;
  j["kappa"] = c.kappa;
  j["k"] = c.k;
  if (c.G < 0.0) j["G"] = "auto";
  else j["G"] = c.G;
  j["model"] = c.model_kind;
  if (c.model_pool < 0) j["m"] = "all";
  else j["m"] = c.model_pool;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["method"] = c.method;
  return j;
}

void config_from_json(const ordered_json& j, RunConfig& c) {
  if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
  if (j.contains("kappa")) c.kappa = j["kappa"].get<int>();
  if (j.contains("k")) c.k = j["k"].get<int>();
  if (j.contains("G")) {
    if (j["G"].is_string()) c.G = -1.0;
    else c.G = j["G"].get<double>();
  }
  if (j.contains("model")) c.model_kind = j["model"].get<std::string>();
  if (j.contains("m")) {
    if (j["m"].is_string()) c.model_pool = -1;
    else c.model_pool = j["m"].get<int>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
  if (j.contains("method")) c.method = j["method"].get<std::string>();
}

void validate(const RunConfig& c) {
  if (c.gamma <= 0.0) throw DataError("gamma must be > 0");
  if (c.kappa < 1) throw DataError("kappa must be >= 1");
  if (c.k < 1) throw DataError("k must be >= 1");
  if (c.epsilon <= 0.0) throw DataError("epsilon must be > 0");
  if (c.method != "exact" && c.method != "clique" && c.method != "prob")
    throw DataError("method must be exact, clique, or prob");
  regressor_kind_from_string(c.model_kind);
}

struct RepairOutcome {
  RepairResult result;
  int n = 0;
  int conflict_count = 0;
  double wall_ms = 0.0;
};

RepairOutcome run_repair(const std::string& data, const std::string& dcs_path,
                         const RunConfig& config) {
  validate(config);
  LoadOptions load;
  load.sidecar_path = config.sidecar;
  load.missing = config.fill_missing ? MissingPolicy::kSubstituteMode
                                     : MissingPolicy::kError;
  Instance inst = load_csv(data, load);
  std::vector<DenialConstraint> dcs = parse_dc_file(dcs_path, inst.schema);
  RepairParams params = config.to_params();

  auto started = std::chrono::steady_clock::now();
  ConflictGraph graph = detect_conflicts(inst, dcs);
  LossTable table = build_loss_table(inst, graph, params.dep, params.kind);

  if (!config.dump_losses.empty()) {
    std::ostringstream csv;
    csv << "id,raw_loss,u,gamma,tuple_value,providers\n";
    for (int i = 0; i < table.size(); ++i) {
      csv << i << ',' << table.tuple_raw_loss(i) << ',' << table.conflict_balance(i)
          << ',' << table.enhancement(i) << ',' << table.tuple_value(i) << ',';
      const std::vector<int>& m = table.providers(i);
      for (std::size_t p = 0; p < m.size(); ++p) csv << (p ? "|" : "") << m[p];
      csv << "\n";
    }
    write_text(config.dump_losses, csv.str());
  }
  if (!config.dump_lp.empty())
    write_lp(build_osr_model(table, graph, params.dep.k, {}).lp, config.dump_lp);

  RepairOutcome outcome;
  if (config.method == "exact")
    outcome.result = exact_repair(graph, table, params);
  else if (config.method == "prob")
    outcome.result = probabilistic_repair(graph, table, params, config.seed);
  else
    outcome.result = clique_repair(graph, table, params);
  auto finished = std::chrono::steady_clock::now();

  outcome.n = inst.size();
  outcome.conflict_count = static_cast<int>(graph.conflict_set.size());
  outcome.wall_ms =
      std::chrono::duration<double, std::milli>(finished - started).count();
  return outcome;
}

ordered_json repair_report(const std::string& data, const std::string& dcs,
                           const RunConfig& config, const RepairOutcome& outcome) {
  ordered_json report;
  report["command"] = "repair";
  report["data"] = data;
  report["dcs"] = dcs;
  report["method"] = config.method;
  report["config"] = config_json(config);
  report["n"] = outcome.n;
  report["conflict_count"] = outcome.conflict_count;
  report["removed"] = std::vector<int>(outcome.result.removed.begin(),
                                       outcome.result.removed.end());
  report["objective"] = outcome.result.objective;
  ordered_json diag;
  diag["iterations"] = outcome.result.diagnostics.iterations;
  diag["cliques_added"] = outcome.result.diagnostics.cliques_added;
  diag["lp_solves"] = outcome.result.diagnostics.lp_solves;
  diag["simplex_pivots"] = outcome.result.diagnostics.simplex_pivots;
  if (outcome.result.diagnostics.seed)
    diag["seed"] = *outcome.result.diagnostics.seed;
  diag["final_lp_integral"] = outcome.result.diagnostics.final_lp_integral;
  report["diagnostics"] = diag;
  // Wall time is opt-in so that default reports stay byte-stable per seed.
  if (config.timing) report["wall_time_ms"] = outcome.wall_ms;
  return report;
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

RepairParams RunConfig::to_params() const {
  RepairParams params;
  params.dep.gamma = gamma;
  params.dep.kappa = kappa;
  params.dep.k = k;
  params.dep.G = G;
  params.dep.model_pool = model_pool;
  params.kind = regressor_kind_from_string(model_kind);
  params.epsilon = epsilon;
  params.solve = SolveOptions::from_env();
  return params;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  ordered_json j = ordered_json::parse(in, nullptr, true, true);
  RunConfig config;
  config_from_json(j, config);
  validate(config);
  return config;
}

void save_config(const RunConfig& config, const std::string& path) {
  write_text(path, json_text(config_json(config)));
}

EvalReport evaluate_removal(const std::set<int>& removed, const std::set<int>& truth,
                            int instance_size) {
  for (int id : removed)
    if (id < 0 || id >= instance_size)
      throw DataError("removal id outside instance: " + std::to_string(id));
  for (int id : truth)
    if (id < 0 || id >= instance_size)
      throw DataError("truth id outside instance: " + std::to_string(id));

  std::size_t hits = 0;
  for (int id : removed) hits += truth.count(id);

  EvalReport report;
  report.removed_ids.assign(removed.begin(), removed.end());
  report.precision = removed.empty()
                         ? 0.0
                         : static_cast<double>(hits) / static_cast<double>(removed.size());
  report.recall = truth.empty()
                      ? 0.0
                      : static_cast<double>(hits) / static_cast<double>(truth.size());
  double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

std::set<int> load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open truth file: " + path);
  std::set<int> truth;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    truth.insert(std::stoi(trimmed));
  }
  return truth;
}

double outlier_value(double observed_max, double u) {
  return observed_max * (1.0 + u);
}

ErrorKind error_kind_from_string(const std::string& name) {
  if (name == "typo") return ErrorKind::kTypo;
  if (name == "duplicate") return ErrorKind::kDuplicate;
  if (name == "bogus") return ErrorKind::kBogus;
  if (name == "outlier") return ErrorKind::kOutlier;
  throw DataError("unknown error kind: " + name);
}

void inject_errors(const Instance& clean, double rate,
                   const std::vector<ErrorKind>& kinds, std::uint64_t seed,
                   Instance& dirty, std::set<int>& truth) {
  if (!(rate > 0.0 && rate < 1.0)) throw DataError("rate must be in (0, 1)");
  if (kinds.empty()) throw DataError("at least one error kind required");
  const int n = clean.size();
  const int m = clean.attr_count();
  int count = static_cast<int>(std::ceil(rate * n));
  if (count < 1 || count > n) throw DataError("corruption count out of range");

  std::vector<int> numeric_attrs, categorical_attrs;
  for (int j = 0; j < m; ++j)
    (clean.schema[j].kind == AttrKind::kNumeric ? numeric_attrs : categorical_attrs)
        .push_back(j);

  std::mt19937_64 rng(seed);
  auto pick = [&](int bound) { return static_cast<int>(rng() % static_cast<std::uint64_t>(bound)); };

  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (int p = 0; p < count; ++p) std::swap(ids[p], ids[p + pick(n - p)]);
  ids.resize(count);

  dirty = clean;
  truth.clear();
  for (int victim : ids) {
    truth.insert(victim);
    ErrorKind kind = kinds[pick(static_cast<int>(kinds.size()))];
    if (kind == ErrorKind::kTypo && categorical_attrs.empty()) kind = ErrorKind::kDuplicate;
    if (kind == ErrorKind::kBogus && categorical_attrs.empty()) kind = ErrorKind::kDuplicate;
    if (kind == ErrorKind::kOutlier && numeric_attrs.empty()) kind = ErrorKind::kDuplicate;

    switch (kind) {
      case ErrorKind::kTypo: {
        int j = categorical_attrs[pick(static_cast<int>(categorical_attrs.size()))];
        std::string s = std::get<std::string>(dirty.tuples[victim].values[j]);
        char c = static_cast<char>('a' + pick(26));
        int action = s.empty() ? 0 : pick(3);
        if (action == 0) {
          s.insert(s.begin() + pick(static_cast<int>(s.size()) + 1), c);
        } else if (action == 1) {
          s.erase(s.begin() + pick(static_cast<int>(s.size())));
        } else {
          s[pick(static_cast<int>(s.size()))] = c;
        }
        dirty.tuples[victim].values[j] = s;
        break;
      }
      case ErrorKind::kDuplicate: {
        int j = pick(m);
        int other = pick(n - 1);
        if (other >= victim) ++other;
        dirty.tuples[victim].values[j] = clean.tuples[other].values[j];
        break;
      }
      case ErrorKind::kBogus: {
        int j = categorical_attrs[pick(static_cast<int>(categorical_attrs.size()))];
        dirty.tuples[victim].values[j] =
            "__bogus_" + std::to_string(pick(1000000));
        break;
      }
      case ErrorKind::kOutlier: {
        int j = numeric_attrs[pick(static_cast<int>(numeric_attrs.size()))];
        double u = 1.0 + 2.0 * next_unit(rng);  // u in [1, 3)
        dirty.tuples[victim].values[j] =
            outlier_value(clean.schema[j].observed_max, u);
        break;
      }
    }
  }

  // Refresh observed ranges and lengths for the dirty relation.
  for (int j = 0; j < m; ++j) {
    AttributeMeta& meta = dirty.schema[j];
    if (meta.kind == AttrKind::kNumeric) {
      for (int i = 0; i < n; ++i) {
        double v = std::get<double>(dirty.tuples[i].values[j]);
        if (i == 0 || v < meta.observed_min) meta.observed_min = v;
        if (i == 0 || v > meta.observed_max) meta.observed_max = v;
      }
    } else {
      meta.max_len = 0;
      for (int i = 0; i < n; ++i)
        meta.max_len = std::max(meta.max_len,
                                std::get<std::string>(dirty.tuples[i].values[j]).size());
    }
  }
}

int cmd_repair(const std::string& data, const std::string& dcs,
               const RunConfig& config, const std::string& out) {
  try {
    RepairOutcome outcome = run_repair(data, dcs, config);
    write_text(out, json_text(repair_report(data, dcs, config, outcome)));
    if (config.timing)
      std::cerr << "repair wall time: " << outcome.wall_ms << " ms\n";
    return kExitOk;
  } catch (const ConstraintParseError& e) {
    std::cerr << "constraint parse error: " << e.what() << "\n";
    return kExitConstraintParse;
  } catch (const SolveError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}

int cmd_evaluate(const std::string& report_path, const std::string& truth_path,
                 const std::string& out) {
  std::ifstream in(report_path);
  if (!in) throw DataError("cannot open report file: " + report_path);
  ordered_json report = ordered_json::parse(in);
  std::set<int> removed;
  for (int id : report.at("removed").get<std::vector<int>>()) removed.insert(id);
  int n = report.at("n").get<int>();

  EvalReport eval = evaluate_removal(removed, load_truth(truth_path), n);
  eval.objective = report.at("objective").get<double>();
  if (report.contains("wall_time_ms"))
    eval.wall_time_ms = report["wall_time_ms"].get<double>();

  ordered_json j;
  j["precision"] = eval.precision;
  j["recall"] = eval.recall;
  j["f1"] = eval.f1;
  j["removed_ids"] = eval.removed_ids;
  j["objective"] = eval.objective;
  j["wall_time_ms"] = eval.wall_time_ms;
  write_text(out, json_text(j));
  return kExitOk;
}

int cmd_inject(const std::string& data, double rate,
               const std::vector<std::string>& kind_names, std::uint64_t seed,
               const std::string& out_data, const std::string& out_truth) {
  Instance clean = load_csv(data);
  std::vector<ErrorKind> kinds;
  for (const std::string& name : kind_names)
    kinds.push_back(error_kind_from_string(name));
  if (kinds.empty())
    kinds = {ErrorKind::kTypo, ErrorKind::kDuplicate, ErrorKind::kBogus,
             ErrorKind::kOutlier};

  Instance dirty;
  std::set<int> truth;
  inject_errors(clean, rate, kinds, seed, dirty, truth);
  write_csv(dirty, out_data);
  std::string truth_text;
  for (int id : truth) truth_text += std::to_string(id) + "\n";
  write_text(out_truth, truth_text);
  return kExitOk;
}

int cmd_sweep(const std::string& data, const std::string& dcs,
              const std::string& truth_path, const RunConfig& base,
              const std::string& axis, const std::vector<std::string>& values,
              const std::string& out_csv) {
  std::set<int> truth = load_truth(truth_path);
  std::ostringstream csv;
  csv << "axis,value,method,precision,recall,f1,objective,removed,wall_time_ms\n";
  for (const std::string& value : values) {
    RunConfig config = base;
    if (axis == "gamma") config.gamma = std::stod(value);
    else if (axis == "kappa") config.kappa = std::stoi(value);
    else if (axis == "k") config.k = std::stoi(value);
    else if (axis == "m") config.model_pool = value == "all" ? -1 : std::stoi(value);
    else if (axis == "model_kind") config.model_kind = value;
    else throw DataError("unknown sweep axis: " + axis);

    RepairOutcome outcome = run_repair(data, dcs, config);
    EvalReport eval = evaluate_removal(outcome.result.removed, truth, outcome.n);
    csv << axis << ',' << value << ',' << config.method << ',' << eval.precision
        << ',' << eval.recall << ',' << eval.f1 << ',' << outcome.result.objective
        << ',' << outcome.result.removed.size() << ','
        << (base.timing ? outcome.wall_ms : 0.0) << "\n";
  }
  write_text(out_csv, csv.str());
  return kExitOk;
}

int cmd_detect(const std::string& data, const std::string& dcs,
               const RunConfig& config, const std::string& out) {
  try {
    LoadOptions load;
    load.sidecar_path = config.sidecar;
    load.missing = config.fill_missing ? MissingPolicy::kSubstituteMode
                                       : MissingPolicy::kError;
    Instance inst = load_csv(data, load);
    std::vector<DenialConstraint> constraints = parse_dc_file(dcs, inst.schema);
    ConflictGraph graph = detect_conflicts(inst, constraints);

    ordered_json j;
    j["command"] = "detect";
    j["n"] = inst.size();
    j["edges"] = ordered_json::array();
    for (auto [i, l] : graph.edges) j["edges"].push_back({i, l});
    j["conflict_set"] = graph.conflict_set;
    write_text(out, json_text(j));
    return kExitOk;
  } catch (const ConstraintParseError& e) {
    std::cerr << "constraint parse error: " << e.what() << "\n";
    return kExitConstraintParse;
  }
}

}  // namespace osr::cli
