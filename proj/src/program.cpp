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

#include "optigraph/program.hpp"

namespace optigraph {

std::string BuildProgram::add_variable(const std::string& node, const std::string& name,
                                       VariableBounds bounds, std::vector<std::int64_t> subscripts) {
  std::string canonical = canonical_name(node, name, subscripts);
  instructions_.push_back(program::AddVariable{node, name, std::move(subscripts), bounds});
  return canonical;
}

Json to_json(const NamedExpr& e) {
  Json terms = Json::array();
  for (const auto& [name, c] : e.terms) terms.push_back(Json::array({name, c}));
  Json j;
  j["terms"] = std::move(terms);
  j["constant"] = e.constant;
  return j;
}

NamedExpr named_expr_from_json(const Json& j) {
  NamedExpr e;
  e.constant = j.at("constant").get<double>();
  for (const auto& t : j.at("terms")) e.add(t.at(0).get<std::string>(), t.at(1).get<double>());
  return e;
}

Json to_json(const NamedConstraint& c) {
  Json j;
  j["body"] = to_json(c.body);
  j["sense"] = std::string(sense_symbol(c.sense));
  j["rhs"] = c.rhs;
  return j;
}

NamedConstraint named_constraint_from_json(const Json& j) {
  return {named_expr_from_json(j.at("body")), parse_sense(j.at("sense").get<std::string>()),
          j.at("rhs").get<double>()};
}

namespace {

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

}  // namespace

Json to_json(const Instruction& ins) {
  return std::visit(
      Overload{
          [](const program::AddNode& i) {
            Json j;
            j["op"] = "add_node";
            j["label"] = i.label;
            return j;
          },
          [](const program::AddVariable& i) {
            Json j;
            j["op"] = "add_variable";
            j["node"] = i.node;
            j["name"] = i.name;
            j["subscripts"] = i.subscripts;
            j["bounds"] = to_json(i.bounds);
            return j;
          },
          [](const program::AddConstraint& i) {
            Json j;
            j["op"] = "add_constraint";
            j["node"] = i.node;
            j["constraint"] = to_json(i.constraint);
            return j;
          },
          [](const program::SetObjective& i) {
            Json j;
            j["op"] = "set_objective";
            j["node"] = i.node;
            j["objective"] = to_json(i.objective);
            return j;
          },
          [](const program::AddLink& i) {
            Json j;
            j["op"] = "add_link";
            j["constraint"] = to_json(i.constraint);
            return j;
          },
      },
      ins);
}

Instruction instruction_from_json(const Json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "add_node") return program::AddNode{j.at("label").get<std::string>()};
  if (op == "add_variable")
    return program::AddVariable{j.at("node").get<std::string>(), j.at("name").get<std::string>(),
                                j.at("subscripts").get<std::vector<std::int64_t>>(),
                                bounds_from_json(j.at("bounds"))};
  if (op == "add_constraint")
    return program::AddConstraint{j.at("node").get<std::string>(),
                                  named_constraint_from_json(j.at("constraint"))};
  if (op == "set_objective")
    return program::SetObjective{j.at("node").get<std::string>(),
                                 named_expr_from_json(j.at("objective"))};
  if (op == "add_link") return program::AddLink{named_constraint_from_json(j.at("constraint"))};
  throw ModelError("unknown build instruction '" + op + "'");
}

Json to_json(const BuildProgram& p) {
  Json ins = Json::array();
  for (const auto& i : p.instructions()) ins.push_back(to_json(i));
  Json j;
  j["instructions"] = std::move(ins);
  j["fetch"] = p.fetches();
  return j;
}

BuildProgram program_from_json(const Json& j) {
  BuildProgram p;
  for (const auto& i : j.at("instructions")) {
    Instruction ins = instruction_from_json(i);
    std::visit(Overload{
                   [&](program::AddNode& a) { p.add_node(std::move(a.label)); },
                   [&](program::AddVariable& a) {
                     p.add_variable(a.node, a.name, a.bounds, std::move(a.subscripts));
                   },
                   [&](program::AddConstraint& a) { p.add_constraint(std::move(a.node), std::move(a.constraint)); },
                   [&](program::SetObjective& a) { p.set_objective(std::move(a.node), std::move(a.objective)); },
                   [&](program::AddLink& a) { p.add_link(std::move(a.constraint)); },
               },
               ins);
  }
  for (const auto& f : j.at("fetch")) p.fetch(f.get<std::string>());
  return p;
}

AffineExpr resolve(const OptiGraph& g, const NamedExpr& e) {
  AffineExpr out(e.constant);
  for (const auto& [name, c] : e.terms) {
    auto v = g.find_variable(name);
    if (!v) throw ModelError("unknown variable '" + name + "' in graph '" + g.label() + "'");
    out.add_term(*v, c);
  }
  return out;
}

Constraint resolve(const OptiGraph& g, const NamedConstraint& c) {
  return {resolve(g, c.body), c.sense, c.rhs};
}

namespace {

NodeId node_by_label(const OptiGraph& g, const std::string& label) {
  const OptiNode* n = g.find_node(label);
  if (!n) throw ModelError("unknown node '" + label + "' in graph '" + g.label() + "'");
  return n->id();
}

}  // namespace

void apply(OptiGraph& g, const Instruction& ins) {
  std::visit(Overload{
                 [&](const program::AddNode& a) { g.add_node(a.label); },
                 [&](const program::AddVariable& a) {
                   g.add_variable(node_by_label(g, a.node), a.name, a.bounds, a.subscripts);
                 },
                 [&](const program::AddConstraint& a) {
                   g.add_constraint(node_by_label(g, a.node), resolve(g, a.constraint));
                 },
                 [&](const program::SetObjective& a) {
                   g.set_node_objective(node_by_label(g, a.node), resolve(g, a.objective));
                 },
                 [&](const program::AddLink& a) { g.add_link_constraint(resolve(g, a.constraint)); },
             },
             ins);
}

std::vector<VariableId> execute(OptiGraph& g, const BuildProgram& p) {
  if (p.empty() && p.fetches().empty()) return {};
  OptiGraph snapshot = g;
  std::size_t index = 0;
  try {
    for (; index < p.size(); ++index) apply(g, p.instructions()[index]);
    std::vector<VariableId> out;
    for (const auto& name : p.fetches()) {
      auto v = g.find_variable(name);
      if (!v) throw ModelError("cannot fetch unknown variable '" + name + "'");
      out.push_back(*v);
    }
    return out;
  } catch (const std::exception& e) {
    g = std::move(snapshot);
    std::string where = index < p.size() ? "instruction " + std::to_string(index)
                                         : std::string("fetch");
    throw ModelError("build program failed at " + where + ": " + e.what());
  }
}

}  // namespace optigraph
