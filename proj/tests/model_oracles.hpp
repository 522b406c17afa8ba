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

// Direct-solve references for decomposition tests. Recourse values come
// from solving the root part and one other part together with the root
// columns fixed by bounds, so no copy columns or fixing rows are involved.

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "optigraph/models.hpp"
#include "optigraph/solver.hpp"

namespace optigraph::oracle {

inline std::set<std::string> defined_names(const BuildProgram& p) {
  std::set<std::string> out;
  for (const auto& ins : p.instructions())
    if (const auto* v = std::get_if<program::AddVariable>(&ins))
      out.insert(canonical_name(v->node, v->name, v->subscripts));
  return out;
}

class RecourseOracle {
 public:
  explicit RecourseOracle(const ModelPlan& plan) {
    root_names_ = defined_names(plan.parts[plan.root].program);
    for (std::size_t i = 0; i < plan.parts.size(); ++i) {
      if (i == plan.root) continue;
      ModelPlan pair;
      pair.parts = {plan.parts[plan.root], plan.parts[i]};
      std::set<std::string> names = root_names_;
      names.merge(defined_names(plan.parts[i].program));
      for (const auto& l : plan.links) {
        bool inside = true;
        for (const auto& [n, c] : l.body.terms) inside = inside && names.contains(n);
        if (inside) pair.links.push_back(l);
      }
      problems_.push_back(flatten(build_local(pair)));
    }
  }

  std::size_t size() const { return problems_.size(); }

  /// Optimal recourse cost of subproblem w with the root at `x` (by name);
  /// +inf when that point leaves the subproblem infeasible.
  double operator()(std::size_t w, const std::map<std::string, double>& x) const {
    const StandardFormProblem& p = problems_.at(w);
    std::map<VariableId, double> fixed;
    double root_cost = 0.0;
    for (const auto& v : p.variable_order) {
      const std::string& name = p.name_of(v);
      if (!root_names_.contains(name)) continue;
      double value = x.at(name);
      fixed[v] = value;
      root_cost += p.objective.coefficient(v) * value;
    }
    SolveResult r = solve_lp(fix_variables(p, fixed));
    if (r.status == SolveStatus::kInfeasible) return std::numeric_limits<double>::infinity();
    return r.objective - root_cost;
  }

 private:
  std::set<std::string> root_names_;
  std::vector<StandardFormProblem> problems_;
};

/// Names the points of a master point map through `g`.
inline std::map<std::string, double> by_name(const OptiGraph& g, const std::map<VariableId, double>& x) {
  std::map<std::string, double> out;
  for (const auto& [v, value] : x)
    if (g.contains_variable(v)) out[g.variable_name(v)] = value;
  return out;
}

}  // namespace optigraph::oracle
