// Copyright 2026 The OptiGraph Authors
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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "optigraph/graph.hpp"

namespace optigraph {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view status_name(SolveStatus s);

struct SolverConfig {
  double feas_tol = 1e-7;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 500000;
  double mip_gap = 1e-6;  // relative
  double integrality_tol = 1e-6;
  std::size_t max_nodes = 200000;
  std::size_t best_bound_restart = 100;  // B&B nodes between best-bound picks
  bool root_duals = false;               // MIP: report root LP duals

  void validate() const;
};

/// Dual sign convention (min problems): y_i = d(objective)/d(rhs_i), so
/// y <= 0 on <= rows, y >= 0 on >= rows, free on equality rows.
struct SolveResult {
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective = 0.0;
  std::map<VariableId, double> primal;
  std::vector<double> duals;  // by row index
  std::map<VariableId, double> reduced_costs;
  std::size_t iterations = 0;
  std::size_t nodes = 0;       // branch-and-bound nodes (0 for LP)
  double bound = 0.0;          // best proven lower bound
  std::string diagnostics;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  double value(const VariableId& v) const;
};

SolveResult solve_lp(const StandardFormProblem& p, const SolverConfig& cfg = {});
/// `start`, when given and feasible, seeds the incumbent.
SolveResult solve_mip(const StandardFormProblem& p, const SolverConfig& cfg = {},
                      const std::map<VariableId, double>* start = nullptr);
/// Dispatches on whether the problem has integer columns.
SolveResult solve(const StandardFormProblem& p, const SolverConfig& cfg = {},
                  const std::map<VariableId, double>* start = nullptr);

/// Copy of `p` with lower = upper = value for each assignment; rows untouched.
StandardFormProblem fix_variables(const StandardFormProblem& p,
                                  const std::map<VariableId, double>& assignments);

/// Optimality certificate measured against the original problem data.
struct LpCertificate {
  double primal_residual = 0.0;       // max row/bound violation
  double dual_sign_violation = 0.0;   // max wrong-signed dual or reduced cost
  double complementarity = 0.0;       // max |y_i * slack_i| and |d_j * dist-to-bound|
  double duality_gap = 0.0;           // |c'x - (b'y + sum d_j x_j)| / (1 + |c'x|)
};

LpCertificate certify(const StandardFormProblem& p, const SolveResult& r);

/// Fixed-format text: objective row, then rows with sense and rhs, then
/// bounds. Columns are referred to by canonical name.
void write_problem(std::ostream& out, const StandardFormProblem& p);

}  // namespace optigraph
