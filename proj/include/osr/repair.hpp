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

#ifndef OSR_REPAIR_HPP_
#define OSR_REPAIR_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "osr/constraints.hpp"
#include "osr/depmodel.hpp"
#include "osr/lp.hpp"
#include "osr/osr_model.hpp"

namespace osr {

enum class RepairMethod { kExact, kClique, kProbabilistic, kOracle };

std::string to_string(RepairMethod m);

struct RepairParams {
  DepParams dep;
  RegressorKind kind = RegressorKind::kLinear;
  double epsilon = 1e-6;  // fractionality tolerance for rounding/classification
  SolveOptions solve;
  int oracle_limit = 16;
};

struct RepairDiagnostics {
  long iterations = 0;     // LP solves (clique), B&B nodes (exact)
  long cliques_added = 0;  // clique rows accumulated by Alg-style iteration
  long lp_solves = 0;
  long simplex_pivots = 0;
  std::optional<long> seed;
  bool final_lp_integral = false;
  long minimal_sets = 0;  // oracle: minimal removal sets enumerated
};

struct RepairResult {
  std::set<int> removed;  // I_N
  double objective = 0.0;
  RepairMethod method = RepairMethod::kExact;
  RepairDiagnostics diagnostics;
};

// L(I \ removed): each survivor contributes its k best surviving candidate
// providers (only positive pair values, matching what the ILP would pick).
double evaluate_objective(const LossTable& table, const std::set<int>& removed);

// Walks `removed` by descending tuple value L(t_i) (ties: ascending id) and
// reinserts any tuple whose conflict partners are all still removed.
// Requires that the survivors are violation-free on entry.
std::set<int> minimality_pass(const ConflictGraph& graph, std::set<int> removed,
                              const LossTable& table);

// ILP over the pruned model, no clique rows. The minimality pass is a safety
// net for user-supplied G, where pair values may go negative.
RepairResult exact_repair(const Instance& inst, const std::vector<DenialConstraint>& dcs,
                          const RepairParams& params);
RepairResult exact_repair(const ConflictGraph& graph, const LossTable& table,
                          const RepairParams& params);

// Iterated LP relaxation: collect tuples at 0.5, extract greedy maximal
// cliques from them, add the size->2 cliques as rows, re-solve until no new
// clique larger than an edge appears, then round x <= 0.5 into the removal
// set and restore minimality.
RepairResult clique_repair(const Instance& inst, const std::vector<DenialConstraint>& dcs,
                           const RepairParams& params);
RepairResult clique_repair(const ConflictGraph& graph, const LossTable& table,
                           const RepairParams& params);

// Per conflict edge, keeps tuple i with probability L(t_i)/(L(t_i)+L(t_l));
// edges are sampled independently in ascending (i, l) order, then the
// minimality pass runs. Deterministic for a fixed seed.
RepairResult probabilistic_repair(const Instance& inst,
                                  const std::vector<DenialConstraint>& dcs,
                                  const RepairParams& params, std::uint64_t seed);
RepairResult probabilistic_repair(const ConflictGraph& graph, const LossTable& table,
                                  const RepairParams& params, std::uint64_t seed);

// Enumerates every minimal removal set over subsets of I_C and returns one
// with the largest objective (ties: lexicographically smallest id set).
RepairResult brute_force_oracle(const Instance& inst,
                                const std::vector<DenialConstraint>& dcs,
                                const LossTable& table, int limit = 16);
RepairResult brute_force_oracle(const ConflictGraph& graph, const LossTable& table,
                                int limit = 16);

}  // namespace osr

#endif  // OSR_REPAIR_HPP_
