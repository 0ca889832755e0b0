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

#ifndef OSR_LP_HPP_
#define OSR_LP_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace osr {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
};

// Sparse <= row.
struct LpConstraint {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

// Maximization model over box-bounded variables with <= rows.
struct LpModel {
  std::vector<LpVariable> variables;
  std::vector<double> objective;  // aligned with variables
  std::vector<LpConstraint> constraints;

  int add_variable(const std::string& name, double lower = 0.0, double upper = 1.0);
  void set_objective(int var, double coeff) { objective[var] = coeff; }
  int add_constraint(double rhs);
  void add_to_constraint(int row, int var, double coeff);
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  long iterations = 0;  // simplex pivots
  long nodes = 0;       // branch-and-bound nodes (solve_ilp only)
};

struct SolveOptions {
  long iteration_limit = 2000000;
  long node_limit = 200000;
  // 0: pick by component size; 1: dense tableau; 2: sparse revised simplex.
  // The forced modes exist for cross-checking the two engines in tests.
  int engine = 0;

  // Applies OSR_LP_ITERATION_LIMIT / OSR_ILP_NODE_LIMIT when set.
  static SolveOptions from_env();
};

// Primal bounded-variable simplex over each connected component of the model
// (components are solved independently and merged). Dantzig pricing with a
// Bland's-rule fallback on degenerate pivot streaks keeps runs deterministic
// and cycle-free.
LpSolution solve_lp(const LpModel& model, const SolveOptions& options = {});

// Best-bound branch and bound on the LP relaxation; branches on the variable
// farthest from an integer, preferring non-y variables, lowest index on ties.
// All variables are treated as binary.
LpSolution solve_ilp(const LpModel& model, const SolveOptions& options = {});

enum class SolutionClass { kIntegral, kHalfIntegral, kOther };

// Integral if every value is within eps of {0,1}; half-integral if every value
// is within eps of {0,0.5,1} with at least one 0.5; other otherwise.
SolutionClass classify_solution(const LpSolution& sol, double eps = 1e-6);

std::string to_string(SolutionClass c);

// Writes the model in CPLEX LP interchange format for external cross-checks.
void write_lp(const LpModel& model, const std::string& path);

}  // namespace osr

#endif  // OSR_LP_HPP_
