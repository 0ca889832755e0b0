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

#include "osr/repair.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace osr {

namespace {

// Uniform double in [0,1) built from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string to_string(RepairMethod m) {
  switch (m) {
    case RepairMethod::kExact: return "exact";
    case RepairMethod::kClique: return "clique";
    case RepairMethod::kProbabilistic: return "prob";
    case RepairMethod::kOracle: return "oracle";
  }
  return "?";
}

double evaluate_objective(const LossTable& table, const std::set<int>& removed) {
  const int k = table.params().k;
  double total = 0.0;
  for (int i = 0; i < table.size(); ++i) {
    if (removed.count(i)) continue;
    int taken = 0;
    // Candidates are ordered by descending pair value.
    for (int l : table.candidates(i)) {
      if (taken >= k) break;
      if (removed.count(l)) continue;
      double value = table.pair_value(i, l);
      if (value <= 0.0) break;
      total += value;
      ++taken;
    }
  }
  return total;
}

std::set<int> minimality_pass(const ConflictGraph& graph, std::set<int> removed,
                              const LossTable& table) {
  std::vector<int> order(removed.begin(), removed.end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double va = table.tuple_value(a), vb = table.tuple_value(b);
    if (va != vb) return va > vb;
    return a < b;
  });
  for (int t : order) {
    bool conflicts_with_survivor = false;
    for (int nb : graph.adjacency[t])
      if (!removed.count(nb)) {
        conflicts_with_survivor = true;
        break;
      }
    if (!conflicts_with_survivor) removed.erase(t);
  }
  return removed;
}

RepairResult exact_repair(const ConflictGraph& graph, const LossTable& table,
                          const RepairParams& params) {
  OsrModel model = build_osr_model(table, graph, params.dep.k, {});
  LpSolution sol = solve_ilp(model.lp, params.solve);
  if (sol.status != LpStatus::kOptimal)
    throw SolveError(sol.status == LpStatus::kIterationLimit
                         ? "ILP node/iteration limit exceeded"
                         : "ILP infeasible (internal)");

  std::set<int> removed;
  for (int t : graph.conflict_set)
    if (sol.values[model.x_var[t]] < 0.5) removed.insert(t);
  removed = minimality_pass(graph, std::move(removed), table);

  RepairResult result;
  result.method = RepairMethod::kExact;
  result.removed = std::move(removed);
  result.objective = evaluate_objective(table, result.removed);
  result.diagnostics.iterations = sol.nodes;
  result.diagnostics.lp_solves = sol.nodes == 0 ? 1 : 1 + 2 * sol.nodes;
  result.diagnostics.simplex_pivots = sol.iterations;
  result.diagnostics.final_lp_integral = true;
  return result;
}

RepairResult clique_repair(const ConflictGraph& graph, const LossTable& table,
                           const RepairParams& params) {
  const double eps = params.epsilon;
  const long c = static_cast<long>(graph.conflict_set.size());
  const long iteration_cap = c >= 3 ? c * (c - 1) * (c - 2) / 6 + 1 : 2;

  std::set<std::vector<int>> known_cliques;
  std::vector<std::vector<int>> clique_rows;  // |I_q| > 2, in discovery order
  LpSolution sol;
  std::vector<int> x_var;  // identical layout across iterations
  RepairResult result;
  result.method = RepairMethod::kClique;

  while (true) {
    OsrModel model = build_osr_model(table, graph, params.dep.k, clique_rows);
    x_var = model.x_var;
    sol = solve_lp(model.lp, params.solve);
    ++result.diagnostics.lp_solves;
    ++result.diagnostics.iterations;
    result.diagnostics.simplex_pivots += sol.iterations;
    if (sol.status != LpStatus::kOptimal)
      throw SolveError("LP relaxation failed (limit or infeasible)");

    // I_h: tuples whose keep-variable sits at one half.
    std::vector<int> half;
    for (int t : graph.conflict_set)
      if (std::abs(sol.values[x_var[t]] - 0.5) <= eps) half.push_back(t);

    std::size_t new_big_cliques = 0;
    std::set<int> marked;
    for (int seed : half) {
      if (marked.count(seed)) continue;
      std::vector<int> clique =
          greedy_maximal_clique(graph, seed, graph.conflict_set);
      for (int t : clique)
        if (std::abs(sol.values[x_var[t]] - 0.5) <= eps) marked.insert(t);
      if (clique.size() > 2 && known_cliques.insert(clique).second) {
        clique_rows.push_back(clique);
        ++new_big_cliques;
        ++result.diagnostics.cliques_added;
      }
    }

    // Loop while a newly observed clique is larger than an edge; a fractional
    // solution with nothing new to add is handled by rounding plus the
    // minimality pass.
    if (new_big_cliques == 0) break;
    if (result.diagnostics.iterations > iteration_cap)
      throw SolveError("clique iteration bound exceeded (internal)");
  }

  result.diagnostics.final_lp_integral =
      classify_solution(sol, eps) == SolutionClass::kIntegral;

  std::set<int> removed;
  for (int t : graph.conflict_set)
    if (sol.values[x_var[t]] <= 0.5 + eps) removed.insert(t);
  result.removed = minimality_pass(graph, std::move(removed), table);
  result.objective = evaluate_objective(table, result.removed);
  return result;
}

RepairResult probabilistic_repair(const ConflictGraph& graph, const LossTable& table,
                                  const RepairParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<int> removed;
  for (auto [i, l] : graph.edges) {
    // Keep-probability of Eq-form L_i / (L_i + L_l); a conflict pair with no
    // positive weight on either side degenerates to a fair coin.
    double li = std::max(table.tuple_value(i), 0.0);
    double ll = std::max(table.tuple_value(l), 0.0);
    double keep_i = li + ll > 0.0 ? li / (li + ll) : 0.5;
    if (next_unit(rng) < 1.0 - keep_i) removed.insert(i);
    else removed.insert(l);
  }
  RepairResult result;
  result.method = RepairMethod::kProbabilistic;
  result.diagnostics.seed = static_cast<long>(seed);
  result.removed = minimality_pass(graph, std::move(removed), table);
  result.objective = evaluate_objective(table, result.removed);
  return result;
}

RepairResult brute_force_oracle(const ConflictGraph& graph, const LossTable& table,
                                int limit) {
  const int c = static_cast<int>(graph.conflict_set.size());
  if (c > limit)
    throw SolveError("conflict set exceeds oracle limit (" + std::to_string(c) +
                     " > " + std::to_string(limit) + ")");
  if (c > 30) throw SolveError("oracle supports at most 30 conflict tuples");

  std::vector<int> slot_of(graph.n, -1);
  for (int s = 0; s < c; ++s) slot_of[graph.conflict_set[s]] = s;
  std::vector<std::uint32_t> edge_mask;
  for (auto [i, l] : graph.edges)
    edge_mask.push_back((1u << slot_of[i]) | (1u << slot_of[l]));
  std::vector<std::uint32_t> neighbor_mask(c, 0);
  for (auto [i, l] : graph.edges) {
    neighbor_mask[slot_of[i]] |= 1u << slot_of[l];
    neighbor_mask[slot_of[l]] |= 1u << slot_of[i];
  }

  // Survivors outside the conflict neighborhood contribute a constant.
  std::set<int> conflict_ids(graph.conflict_set.begin(), graph.conflict_set.end());
  double constant = 0.0;
  std::vector<int> variable_tuples;
  const int k = table.params().k;
  for (int i = 0; i < table.size(); ++i) {
    bool depends = conflict_ids.count(i) > 0;
    if (!depends)
      for (int l : table.candidates(i))
        if (conflict_ids.count(l)) {
          depends = true;
          break;
        }
    if (depends) {
      variable_tuples.push_back(i);
    } else {
      int taken = 0;
      for (int l : table.candidates(i)) {
        if (taken >= k) break;
        double value = table.pair_value(i, l);
        if (value <= 0.0) break;
        constant += value;
        ++taken;
      }
    }
  }

  auto ids_of = [&](std::uint32_t mask) {
    std::vector<int> ids;
    for (int s = 0; s < c; ++s)
      if ((mask >> s) & 1u) ids.push_back(graph.conflict_set[s]);
    return ids;
  };

  bool found = false;
  double best_objective = 0.0;
  std::uint32_t best_mask = 0;
  long minimal_sets = 0;
  const std::uint32_t end_mask = 1u << c;
  for (std::uint32_t mask = 0; mask < end_mask; ++mask) {
    bool covers = true;
    for (std::uint32_t em : edge_mask)
      if ((em & mask) == 0) {
        covers = false;
        break;
      }
    if (!covers) continue;
    bool minimal = true;
    for (int s = 0; s < c && minimal; ++s)
      if ((mask >> s) & 1u)
        if ((neighbor_mask[s] & ~mask) == 0) minimal = false;
    if (!minimal) continue;
    ++minimal_sets;

    std::set<int> removed;
    for (int s = 0; s < c; ++s)
      if ((mask >> s) & 1u) removed.insert(graph.conflict_set[s]);
    double objective = constant;
    for (int i : variable_tuples) {
      if (removed.count(i)) continue;
      int taken = 0;
      for (int l : table.candidates(i)) {
        if (taken >= k) break;
        if (removed.count(l)) continue;
        double value = table.pair_value(i, l);
        if (value <= 0.0) break;
        objective += value;
        ++taken;
      }
    }
    bool better = !found || objective > best_objective;
    if (found && objective == best_objective) {
      std::vector<int> a = ids_of(mask), b = ids_of(best_mask);
      better = std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
    if (better) {
      found = true;
      best_objective = objective;
      best_mask = mask;
    }
  }
  if (!found) throw SolveError("no minimal removal set found (internal)");

  RepairResult result;
  result.method = RepairMethod::kOracle;
  for (int s = 0; s < c; ++s)
    if ((best_mask >> s) & 1u) result.removed.insert(graph.conflict_set[s]);
  result.objective = evaluate_objective(table, result.removed);
  result.diagnostics.minimal_sets = minimal_sets;
  return result;
}

RepairResult exact_repair(const Instance& inst, const std::vector<DenialConstraint>& dcs,
                          const RepairParams& params) {
  ConflictGraph graph = detect_conflicts(inst, dcs);
  LossTable table = build_loss_table(inst, graph, params.dep, params.kind);
  return exact_repair(graph, table, params);
}

RepairResult clique_repair(const Instance& inst, const std::vector<DenialConstraint>& dcs,
                           const RepairParams& params) {
  ConflictGraph graph = detect_conflicts(inst, dcs);
  LossTable table = build_loss_table(inst, graph, params.dep, params.kind);
  return clique_repair(graph, table, params);
}

RepairResult probabilistic_repair(const Instance& inst,
                                  const std::vector<DenialConstraint>& dcs,
                                  const RepairParams& params, std::uint64_t seed) {
  ConflictGraph graph = detect_conflicts(inst, dcs);
  LossTable table = build_loss_table(inst, graph, params.dep, params.kind);
  return probabilistic_repair(graph, table, params, seed);
}

RepairResult brute_force_oracle(const Instance& inst,
                                const std::vector<DenialConstraint>& dcs,
                                const LossTable& table, int limit) {
  return brute_force_oracle(detect_conflicts(inst, dcs), table, limit);
}

}  // namespace osr
