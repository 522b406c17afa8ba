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

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "optigraph/graph.hpp"
#include "optigraph/serialize.hpp"

namespace optigraph {

/// Affine expression over canonical variable names.
struct NamedExpr {
  std::vector<std::pair<std::string, double>> terms;
  double constant = 0.0;

  NamedExpr& add(std::string name, double coefficient = 1.0) {
    terms.emplace_back(std::move(name), coefficient);
    return *this;
  }
};

struct NamedConstraint {
  NamedExpr body;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

namespace program {

struct AddNode {
  std::string label;
};
struct AddVariable {
  std::string node;
  std::string name;
  std::vector<std::int64_t> subscripts;
  VariableBounds bounds;
};
struct AddConstraint {
  std::string node;
  NamedConstraint constraint;
};
struct SetObjective {
  std::string node;
  NamedExpr objective;
};
/// Link constraint between nodes of the same graph.
struct AddLink {
  NamedConstraint constraint;
};

}  // namespace program

using Instruction = std::variant<program::AddNode, program::AddVariable, program::AddConstraint,
                                 program::SetObjective, program::AddLink>;

/// Model-building script addressed by node label and canonical variable
/// name. The same program can be applied to a local graph, shipped to a
/// worker in one request, or replayed one request per instruction.
class BuildProgram {
 public:
  void add_node(std::string label) { instructions_.push_back(program::AddNode{std::move(label)}); }
  /// Returns the canonical name of the new variable.
  std::string add_variable(const std::string& node, const std::string& name, VariableBounds bounds = {},
                           std::vector<std::int64_t> subscripts = {});
  void add_constraint(std::string node, NamedConstraint c) {
    instructions_.push_back(program::AddConstraint{std::move(node), std::move(c)});
  }
  void set_objective(std::string node, NamedExpr objective) {
    instructions_.push_back(program::SetObjective{std::move(node), std::move(objective)});
  }
  void add_link(NamedConstraint c) { instructions_.push_back(program::AddLink{std::move(c)}); }
  /// Requests a proxy for the named variable in the execution result.
  void fetch(std::string name) { fetch_.push_back(std::move(name)); }

  const std::vector<Instruction>& instructions() const { return instructions_; }
  const std::vector<std::string>& fetches() const { return fetch_; }
  std::size_t size() const { return instructions_.size(); }
  bool empty() const { return instructions_.empty(); }

 private:
  std::vector<Instruction> instructions_;
  std::vector<std::string> fetch_;
};

Json to_json(const NamedExpr& e);
NamedExpr named_expr_from_json(const Json& j);
Json to_json(const NamedConstraint& c);
NamedConstraint named_constraint_from_json(const Json& j);
Json to_json(const Instruction& ins);
Instruction instruction_from_json(const Json& j);
Json to_json(const BuildProgram& p);
BuildProgram program_from_json(const Json& j);

/// Resolves canonical names against `g` (hierarchy wide).
AffineExpr resolve(const OptiGraph& g, const NamedExpr& e);
Constraint resolve(const OptiGraph& g, const NamedConstraint& c);

/// Applies one instruction to `g`.
void apply(OptiGraph& g, const Instruction& ins);

/// Applies every instruction in order and returns the fetched variables.
/// On failure `g` is restored to its state before the call and the error
/// names the failing instruction index.
std::vector<VariableId> execute(OptiGraph& g, const BuildProgram& p);

}  // namespace optigraph
