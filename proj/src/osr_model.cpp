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

#include "osr/osr_model.hpp"

#include <string>

namespace osr {

OsrModel build_osr_model(const LossTable& table, const ConflictGraph& graph, int k,
                         const std::vector<std::vector<int>>& cliques) {
  const int n = table.size();
  OsrModel model;
  model.x_var.assign(n, -1);

  for (int t : graph.conflict_set)
    model.x_var[t] = model.lp.add_variable("x" + std::to_string(t));
  model.first_y = static_cast<int>(model.lp.variables.size());

  std::vector<std::vector<int>> y_index(n);
  for (int i = 0; i < n; ++i) {
    for (int l : table.candidates(i)) {
      int var = model.lp.add_variable("y" + std::to_string(i) + "_" + std::to_string(l));
      model.lp.set_objective(var, table.pair_value(i, l));
      model.y_of.emplace_back(i, l);
      y_index[i].push_back(var);
    }
  }

  for (auto [i, l] : graph.edges) {
    int row = model.lp.add_constraint(1.0);
    model.lp.add_to_constraint(row, model.x_var[i], 1.0);
    model.lp.add_to_constraint(row, model.x_var[l], 1.0);
  }

  for (int i = 0; i < n; ++i) {
    const std::vector<int>& cand = table.candidates(i);
    for (std::size_t p = 0; p < cand.size(); ++p) {
      int l = cand[p];
      int y = y_index[i][p];
      if (model.x_var[i] >= 0) {
        int row = model.lp.add_constraint(0.0);
        model.lp.add_to_constraint(row, y, 1.0);
        model.lp.add_to_constraint(row, model.x_var[i], -1.0);
      }
      if (model.x_var[l] >= 0) {
        int row = model.lp.add_constraint(0.0);
        model.lp.add_to_constraint(row, y, 1.0);
        model.lp.add_to_constraint(row, model.x_var[l], -1.0);
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (y_index[i].empty() && model.x_var[i] < 0) continue;
    if (model.x_var[i] < 0) {
      int row = model.lp.add_constraint(static_cast<double>(k));
      for (int y : y_index[i]) model.lp.add_to_constraint(row, y, 1.0);
    } else {
      int row = model.lp.add_constraint(0.0);
      for (int y : y_index[i]) model.lp.add_to_constraint(row, y, 1.0);
      model.lp.add_to_constraint(row, model.x_var[i], -static_cast<double>(k));
    }
  }

  for (const std::vector<int>& clique : cliques) {
    if (clique.size() <= 2) continue;
    int row = model.lp.add_constraint(1.0);
    for (int t : clique) model.lp.add_to_constraint(row, model.x_var[t], 1.0);
  }

  return model;
}

}  // namespace osr
