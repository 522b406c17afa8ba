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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "optigraph/serialize.hpp"
#include "optigraph/solver.hpp"

namespace optigraph {

class RemoteOptiGraph;

struct BendersConfig {
  double rel_gap = 1e-3;
  std::size_t max_iterations = 200;
  bool add_slacks = true;
  double slack_penalty = 1e6;
  double theta_lower = 0.0;
  /// Relative violation below which a new cut is not added.
  double cut_tol = 1e-9;
  /// Replace theta_lower by a bound computed from each subproblem with its
  /// fixing rows removed.
  bool derive_theta_lower = false;
  /// With an integer master, first run on its continuous relaxation.
  bool relax_first = true;

  void validate() const;
};

/// theta_w >= intercept + sum coefficients[x] * x
struct BendersCut {
  std::size_t subproblem = 0;
  std::size_t iteration = 0;
  double intercept = 0.0;
  std::map<VariableId, double> coefficients;
  std::map<VariableId, double> point;  // master values the cut was built at
  double value = 0.0;                  // subproblem value at `point`

  double evaluate(const std::map<VariableId, double>& x) const;
};

struct BendersState {
  std::size_t iteration = 0;
  std::vector<double> lower_bound;  // nondecreasing
  std::vector<double> upper_bound;  // best incumbent
  std::vector<double> seconds;      // wall time at the end of each iteration
  std::vector<BendersCut> cuts;
  std::map<VariableId, double> incumbent;
  std::vector<std::string> subproblems;
  bool converged = false;
  double slack_activity = 0.0;  // at the incumbent

  double objective() const { return upper_bound.empty() ? 0.0 : upper_bound.back(); }
  double lower() const { return lower_bound.empty() ? 0.0 : lower_bound.back(); }
  double gap() const;
  /// iteration,wall_seconds,lower_bound,upper_bound,rel_gap
  std::string trace_csv(bool with_timing = true) const;
};

double relative_gap(double lower, double upper);

/// A master variable fixed inside a subproblem through a copy column.
struct ComplicatingVariable {
  VariableId id;
  std::string name;
};

struct SubproblemSpec {
  std::vector<ComplicatingVariable> complicating;
  /// Link rows over master variables and subproblem variables.
  std::vector<Constraint> links;
  bool add_slacks = true;
  double slack_penalty = 1e6;
};

Json to_json(const SubproblemSpec& s);
SubproblemSpec subproblem_spec_from_json(const Json& j);

struct SubproblemSolution {
  SolveStatus status = SolveStatus::kIterationLimit;
  double value = 0.0;
  std::vector<double> duals;  // d value / d fixed value, one per complicating variable
  double slack = 0.0;         // sum of fixing-row slacks
};

Json to_json(const SubproblemSolution& s);
SubproblemSolution subproblem_solution_from_json(const Json& j);

/// Subproblem LP: the flattened subgraph, one free copy per complicating
/// variable, the link rows written over the copies, and fixing rows
/// copy_k (+ s+_k - s-_k) = xhat_k whose duals are the cut coefficients.
class BendersSubproblem {
 public:
  BendersSubproblem(const OptiGraph& sub, SubproblemSpec spec, SolverConfig cfg = {});

  SubproblemSolution solve(const std::vector<double>& xhat) const;
  /// Optimal value with the fixing rows removed: a lower bound on every
  /// solve() value. Throws StructureError if that relaxation is unbounded.
  double relaxation_bound() const;

  const StandardFormProblem& problem() const { return problem_; }
  const SubproblemSpec& spec() const { return spec_; }

 private:
  SubproblemSpec spec_;
  SolverConfig cfg_;
  StandardFormProblem problem_;
  std::vector<std::size_t> fixing_rows_;
  std::vector<VariableId> slacks_;
};

/// Pairs subproblem variables with root variables whose name suffix
/// (`[:name][subscripts]`) matches.
struct LinkingVariableMap {
  std::map<VariableId, VariableId> sub_to_master;
};

LinkingVariableMap map_linking_variables(const OptiGraph& root, const OptiGraph& sub,
                                         const std::vector<Constraint>& links = {});

/// Top-level edges must each join the root and exactly one other direct
/// subgraph; the graph must not own nodes itself; subproblems must be LPs.
void validate_structure(const OptiGraph& g, std::size_t root);
void validate_structure(const RemoteOptiGraph& g, const RemoteOptiGraph& root);

class BendersSolver {
 public:
  BendersSolver(const OptiGraph& g, std::size_t root, BendersConfig cfg = {},
                SolverConfig solver_cfg = {});
  BendersSolver(const RemoteOptiGraph& g, const RemoteOptiGraph& root, BendersConfig cfg = {},
                SolverConfig solver_cfg = {});
  ~BendersSolver();
  BendersSolver(const BendersSolver&) = delete;
  BendersSolver& operator=(const BendersSolver&) = delete;

  BendersState run();

  std::size_t num_subproblems() const;
  const StandardFormProblem& master() const;
  /// Complicating master variables of subproblem w.
  const std::vector<ComplicatingVariable>& complicating(std::size_t w) const;
  /// Direct solve of subproblem w at a master point.
  SubproblemSolution evaluate(std::size_t w, const std::map<VariableId, double>& x) const;
  /// Points satisfying the master rows and bounds, drawn around the
  /// incumbent of `state`.
  std::vector<std::map<VariableId, double>> sample_master_points(std::size_t n, std::uint64_t seed,
                                                                 const BendersState& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

BendersState run_benders(const OptiGraph& g, std::size_t root, const BendersConfig& cfg = {},
                         const SolverConfig& solver_cfg = {});
BendersState run_benders(const RemoteOptiGraph& g, const RemoteOptiGraph& root,
                         const BendersConfig& cfg = {}, const SolverConfig& solver_cfg = {});

struct CutCheckReport {
  bool passed = true;
  std::size_t checked = 0;
  double max_violation = 0.0;
  std::string failure;
};

using SubproblemOracle = std::function<double(std::size_t, const std::map<VariableId, double>&)>;

/// Every stored cut must underestimate the directly computed subproblem
/// value at each point, within 1e-6 (1 + |v|).
CutCheckReport cut_validity_check(const BendersState& state,
                                  const std::vector<std::map<VariableId, double>>& points,
                                  const SubproblemOracle& value);

}  // namespace optigraph
