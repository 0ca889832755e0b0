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

#include <random>
#include <set>

#include "doctest.h"
#include "testutil.hpp"

using osrtest::kT5;
using osrtest::kT7;
using osrtest::kT10;
using osrtest::kT11;
using osrtest::kT12;

namespace {

struct RawFixture {
  osr::ConflictGraph graph;
  osr::LossTable table;
};

// Pair-loss matrix with a designated best provider per row; everything else
// sits at a high default loss.
RawFixture raw_fixture(int n, const std::vector<std::pair<int, int>>& edges,
                       const std::vector<std::pair<int, double>>& best_provider,
                       int k = 1, double gamma = 0.2) {
  osr::ConflictGraph graph = osrtest::make_graph(n, edges);
  std::vector<double> loss(static_cast<std::size_t>(n) * n, 0.95);
  for (int i = 0; i < n; ++i)
    if (best_provider[i].first >= 0)
      loss[static_cast<std::size_t>(i) * n + best_provider[i].first] =
          best_provider[i].second;
  osr::DepParams params;
  params.k = k;
  params.gamma = gamma;
  params.G = 1.0;
  osr::LossTable table = osr::LossTable::from_raw(n, 1, loss, graph, params);
  return {std::move(graph), std::move(table)};
}

}  // namespace

TEST_CASE("evaluate objective recomputes provider sets among survivors") {
  // Four tuples, k=2: tuple 0 draws from providers 1 (best) and 2; removing 1
  // shifts its contribution to {2, 3}.
  const int n = 4;
  osr::ConflictGraph graph = osrtest::make_graph(n, {{1, 3}});
  std::vector<double> loss(n * n, 0.9);
  auto at = [&](int i, int l) -> double& { return loss[i * n + l]; };
  at(0, 1) = 0.1;
  at(0, 2) = 0.3;
  at(0, 3) = 0.5;
  at(1, 0) = 0.2;
  at(2, 0) = 0.2;
  at(3, 0) = 0.2;
  osr::DepParams params;
  params.k = 2;
  params.G = 1.0;
  osr::LossTable table = osr::LossTable::from_raw(n, 1, loss, graph, params);

  double g1 = table.enhancement(1), g3 = table.enhancement(3);
  double full = osr::evaluate_objective(table, {});
  // Tuple 0 contributes (1-.1)+(1-.3); tuples 1..3 contribute (1-.2) each
  // modulo their enhancement, tuple 2 at (1-.2) and (1-.9).
  CHECK(full == doctest::Approx(0.9 + 0.7 + 0.8 * g1 + (0.8 + 0.1) + 0.8 * g3 +
                                0.1 * g1 + 0.1 * g3));

  double without_1 = osr::evaluate_objective(table, {1});
  // Tuple 0 falls back to providers 2 and 3; tuple 1 contributes nothing.
  CHECK(without_1 ==
        doctest::Approx(0.7 + 0.5 + (0.8 + 0.1) + 0.8 * g3 + 0.1 * g3));
}

TEST_CASE("minimality pass follows descending tuple value") {
  // Conflict shape of the running example: edge {t5,t7}, triangle
  // {t10,t11,t12}; values ordered t11 > t10 > t12 > t5.
  std::vector<std::pair<int, double>> best(12, {2, 0.6});
  best[kT5] = {0, 0.9};
  best[kT7] = {1, 0.1};
  best[kT10] = {2, 0.35};
  best[kT11] = {3, 0.15};
  best[kT12] = {5, 0.5};
  RawFixture f = raw_fixture(
      12, {{kT5, kT7}, {kT10, kT11}, {kT10, kT12}, {kT11, kT12}}, best);

  REQUIRE(f.table.tuple_value(kT11) > f.table.tuple_value(kT10));
  REQUIRE(f.table.tuple_value(kT10) > f.table.tuple_value(kT12));
  REQUIRE(f.table.tuple_value(kT12) > f.table.tuple_value(kT5));

  std::set<int> over_removed{kT5, kT10, kT11, kT12};
  std::set<int> fixed = osr::minimality_pass(f.graph, over_removed, f.table);
  CHECK(fixed == std::set<int>{kT5, kT10, kT12});  // t11 reinserted

  // Already-minimal input is untouched.
  CHECK(osr::minimality_pass(f.graph, fixed, f.table) == fixed);
}

TEST_CASE("minimality pass reinserts the heavier endpoint of a lone edge") {
  RawFixture f = raw_fixture(3, {{0, 1}}, {{2, 0.2}, {2, 0.7}, {-1, 0.0}});
  REQUIRE(f.table.tuple_value(0) > f.table.tuple_value(1));
  std::set<int> fixed = osr::minimality_pass(f.graph, {0, 1}, f.table);
  CHECK(fixed == std::set<int>{1});
}

TEST_CASE("exact repair on a conflict-free instance removes nothing") {
  osrtest::Case c = osrtest::random_case(3, 10, 0, 0);
  osr::RepairParams params = osrtest::small_params();
  osr::RepairResult result = osr::exact_repair(c.inst, c.dcs, params);
  CHECK(result.removed.empty());
  CHECK(result.diagnostics.iterations == 0);
}

TEST_CASE("exact repair drops the weak middle of a chain") {
  std::vector<std::pair<int, double>> best{
      {3, 0.2}, {3, 0.8}, {4, 0.25}, {4, 0.3}, {3, 0.3}};
  RawFixture f = raw_fixture(5, {{0, 1}, {1, 2}}, best);
  osr::RepairParams params = osrtest::small_params(1);
  osr::RepairResult exact = osr::exact_repair(f.graph, f.table, params);
  osr::RepairResult oracle = osr::brute_force_oracle(f.graph, f.table);
  CHECK(exact.removed == std::set<int>{1});
  CHECK(oracle.removed == exact.removed);
  CHECK(exact.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
  CHECK(oracle.diagnostics.minimal_sets == 2);  // {b} and {a, c}
}

TEST_CASE("exact repair reproduces the running example's keep pattern") {
  std::vector<std::pair<int, double>> best(12, {2, 0.6});
  best[kT5] = {0, 0.9};
  best[kT7] = {1, 0.1};
  best[kT10] = {2, 0.35};
  best[kT11] = {3, 0.15};
  best[kT12] = {5, 0.5};
  RawFixture f = raw_fixture(
      12, {{kT5, kT7}, {kT10, kT11}, {kT10, kT12}, {kT11, kT12}}, best);
  osr::RepairParams params = osrtest::small_params(1);
  osr::RepairResult exact = osr::exact_repair(f.graph, f.table, params);
  CHECK(exact.removed == std::set<int>{kT5, kT10, kT12});  // keeps t7 and t11
  osr::RepairResult oracle = osr::brute_force_oracle(f.graph, f.table);
  CHECK(exact.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
}

TEST_CASE("exact repair matches the oracle on random instances") {
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 10; ++trial) {
    osrtest::Case c = osrtest::random_case(rng(), 14, 1, 10);
    osr::RepairParams params = osrtest::small_params();
    osr::LossTable table = osr::build_loss_table(c.inst, c.graph, params.dep);
    osr::RepairResult exact = osr::exact_repair(c.graph, table, params);
    osr::RepairResult oracle = osr::brute_force_oracle(c.graph, table, 12);
    CHECK(exact.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    CHECK(osr::is_minimal_removal_set(c.graph, exact.removed));
  }
}

TEST_CASE("clique repair finishes in one iteration without halves") {
  RawFixture f = raw_fixture(3, {{0, 1}}, {{2, 0.2}, {2, 0.7}, {-1, 0.0}});
  osr::RepairParams params = osrtest::small_params(1);
  osr::RepairResult result = osr::clique_repair(f.graph, f.table, params);
  CHECK(result.diagnostics.iterations == 1);
  CHECK(result.diagnostics.cliques_added == 0);
  CHECK(result.removed == std::set<int>{1});
  CHECK(result.diagnostics.final_lp_integral);
}

TEST_CASE("clique repair needs a second round on an even triangle") {
  std::vector<std::pair<int, double>> best{{3, 0.3}, {3, 0.3}, {3, 0.3}, {4, 0.3}, {3, 0.3}};
  RawFixture f = raw_fixture(5, {{0, 1}, {0, 2}, {1, 2}}, best);
  osr::RepairParams params = osrtest::small_params(1);
  osr::RepairResult result = osr::clique_repair(f.graph, f.table, params);
  CHECK(result.diagnostics.iterations == 2);
  CHECK(result.diagnostics.cliques_added == 1);
  CHECK(result.removed.size() == 2);  // keeps exactly one triangle member
  CHECK(osr::is_minimal_removal_set(f.graph, result.removed));
  osr::RepairResult exact = osr::exact_repair(f.graph, f.table, params);
  CHECK(result.objective == doctest::Approx(exact.objective).epsilon(1e-9));
}

TEST_CASE("clique repair equals exact on chains plus disjoint cliques") {
  std::mt19937_64 rng(401);
  int integral_seen = 0;
  for (int trial = 0; trial < 6; ++trial) {
    osrtest::Case c = osrtest::chains_and_cliques_case(rng(), 14, 2, 2);
    osr::RepairParams params = osrtest::small_params();
    osr::LossTable table = osr::build_loss_table(c.inst, c.graph, params.dep);
    osr::RepairResult clique = osr::clique_repair(c.graph, table, params);
    osr::RepairResult exact = osr::exact_repair(c.graph, table, params);
    if (clique.diagnostics.final_lp_integral) {
      ++integral_seen;
      CHECK(clique.objective == exact.objective);
    }
    CHECK(osr::is_minimal_removal_set(c.graph, clique.removed));
  }
  CHECK(integral_seen > 0);
}

TEST_CASE("probabilistic repair honors boundary probabilities and seeds") {
  // L(t0) = 0 and L(t1) > 0: t0 always removed.
  RawFixture zero =
      raw_fixture(3, {{0, 1}}, {{-1, 0.0}, {2, 0.2}, {-1, 0.0}});
  // Force tuple 0's pair values to zero with a raw loss equal to G.
  {
    const int n = 3;
    std::vector<double> loss(n * n, 1.0);
    loss[0 * n + 2] = 1.0;  // value (1-1)=0
    loss[1 * n + 2] = 0.2;
    loss[2 * n + 0] = 0.9;
    osr::DepParams params;
    params.k = 1;
    params.G = 1.0;
    osr::LossTable table =
        osr::LossTable::from_raw(n, 1, loss, zero.graph, params);
    REQUIRE(table.tuple_value(0) == doctest::Approx(0.0));
    REQUIRE(table.tuple_value(1) > 0.0);
    osr::RepairParams rp = osrtest::small_params(1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      osr::RepairResult result =
          osr::probabilistic_repair(zero.graph, table, rp, seed);
      CHECK(result.removed == std::set<int>{0});
    }
  }

  // Seed replay is exact; different seeds eventually differ on a fair edge.
  RawFixture fair = raw_fixture(4, {{0, 1}}, {{2, 0.4}, {3, 0.4}, {3, 0.2}, {2, 0.2}});
  osr::RepairParams rp = osrtest::small_params(1);
  osr::RepairResult a = osr::probabilistic_repair(fair.graph, fair.table, rp, 11);
  osr::RepairResult b = osr::probabilistic_repair(fair.graph, fair.table, rp, 11);
  CHECK(a.removed == b.removed);
  std::set<std::set<int>> outcomes;
  for (std::uint64_t seed = 0; seed < 40; ++seed)
    outcomes.insert(
        osr::probabilistic_repair(fair.graph, fair.table, rp, seed).removed);
  CHECK(outcomes.size() == 2);
}

TEST_CASE("zero-weight conflict pairs fall back to a fair coin") {
  const int n = 3;
  osr::ConflictGraph graph = osrtest::make_graph(n, {{0, 1}});
  std::vector<double> loss(n * n, 1.0);  // every pair value (1-1) = 0
  osr::DepParams params;
  params.k = 1;
  params.G = 1.0;
  osr::LossTable table = osr::LossTable::from_raw(n, 1, loss, graph, params);
  REQUIRE(table.tuple_value(0) == 0.0);
  REQUIRE(table.tuple_value(1) == 0.0);
  osr::RepairParams rp = osrtest::small_params(1);
  std::set<std::set<int>> outcomes;
  for (std::uint64_t seed = 0; seed < 64; ++seed)
    outcomes.insert(osr::probabilistic_repair(graph, table, rp, seed).removed);
  CHECK(outcomes.count({0}) == 1);
  CHECK(outcomes.count({1}) == 1);
}

TEST_CASE("oracle enumerates the running example's six minimal sets") {
  osr::Instance inst = osrtest::electricity12();
  std::vector<osr::DenialConstraint> dcs = osrtest::electricity_dcs(inst);
  osr::RepairParams params = osrtest::small_params();
  osr::LossTable table =
      osr::build_loss_table(inst, osr::detect_conflicts(inst, dcs), params.dep);
  osr::RepairResult oracle = osr::brute_force_oracle(inst, dcs, table);
  CHECK(oracle.diagnostics.minimal_sets == 6);
  CHECK(oracle.removed.size() == 3);
  CHECK(osr::is_minimal_removal_set(inst, dcs, oracle.removed));
}

TEST_CASE("oracle rejects oversized conflict sets") {
  osrtest::Case c = osrtest::random_case(19, 20, 4, 16);
  osr::RepairParams params = osrtest::small_params();
  osr::LossTable table = osr::build_loss_table(c.inst, c.graph, params.dep);
  CHECK_THROWS_AS(osr::brute_force_oracle(c.graph, table, 1), osr::SolveError);
}

TEST_CASE("all methods return minimal removal sets with consistent objectives") {
  std::mt19937_64 rng(509);
  for (int trial = 0; trial < 6; ++trial) {
    osrtest::Case c = osrtest::random_case(rng(), 14, 1, 10);
    osr::RepairParams params = osrtest::small_params();
    osr::LossTable table = osr::build_loss_table(c.inst, c.graph, params.dep);
    osr::RepairResult results[] = {
        osr::exact_repair(c.graph, table, params),
        osr::clique_repair(c.graph, table, params),
        osr::probabilistic_repair(c.graph, table, params, trial),
        osr::brute_force_oracle(c.graph, table, 12),
    };
    for (const osr::RepairResult& r : results) {
      CHECK(osr::is_minimal_removal_set(c.graph, r.removed));
      for (int t : r.removed) CHECK(c.graph.in_conflict[t]);
      CHECK(r.objective ==
            doctest::Approx(osr::evaluate_objective(table, r.removed)).epsilon(1e-6));
    }
  }
}
