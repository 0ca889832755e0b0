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

#ifndef OSR_OSR_MODEL_HPP_
#define OSR_OSR_MODEL_HPP_

#include <utility>
#include <vector>

#include "osr/constraints.hpp"
#include "osr/depmodel.hpp"
#include "osr/lp.hpp"

namespace osr {

// The subset-repair (I)LP plus index maps back to tuples. Variables are x_i
// ("keep tuple i") for conflict tuples and y_il ("l provides value to i") for
// every tuple and each of its candidate providers.
struct OsrModel {
  LpModel lp;
  std::vector<int> x_var;                  // tuple id -> x index, -1 if clean
  std::vector<std::pair<int, int>> y_of;   // y order -> (i, l)
  int first_y = 0;                         // x vars occupy [0, first_y)

  int y_var(int order) const { return first_y + order; }
};

// Rows, in order: x_i + x_l <= 1 per conflict edge; y_il <= x_i / y_il <= x_l
// couplings where the endpoint is a conflict tuple; per-tuple provider budgets
// (sum y <= k for clean tuples, sum y <= k*x_i for conflict tuples); one
// sum_{q} x <= 1 row per supplied clique of size > 2. Objective: maximize
// sum L(t_i,t_l) * y_il.
OsrModel build_osr_model(const LossTable& table, const ConflictGraph& graph, int k,
                         const std::vector<std::vector<int>>& cliques);

}  // namespace osr

#endif  // OSR_OSR_MODEL_HPP_
