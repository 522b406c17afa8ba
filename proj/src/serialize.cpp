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

#include "optigraph/serialize.hpp"

#include <cmath>

namespace optigraph {

namespace {

double finite(const Json& j, const char* what) {
  if (!j.is_number()) throw ModelError(std::string("expected a number for ") + what);
  return j.get<double>();
}

}  // namespace

Json bound_to_json(double value) {
  if (std::isinf(value)) return nullptr;
  return value;
}

double lower_from_json(const Json& j) { return j.is_null() ? -kInf : finite(j, "lower bound"); }
double upper_from_json(const Json& j) { return j.is_null() ? kInf : finite(j, "upper bound"); }

Json to_json(const VariableId& v) { return Json::array({v.node.str(), v.index}); }

VariableId variable_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ModelError("malformed variable id");
  return {NodeId::parse(j[0].get<std::string>()), j[1].get<std::uint32_t>()};
}

Json to_json(const VariableBounds& b) {
  Json j;
  j["lower"] = bound_to_json(b.lower);
  j["upper"] = bound_to_json(b.upper);
  j["integer"] = b.is_integer();
  return j;
}

VariableBounds bounds_from_json(const Json& j) {
  return {lower_from_json(j.at("lower")), upper_from_json(j.at("upper")),
          j.value("integer", false) ? Integrality::kInteger : Integrality::kContinuous};
}

Json to_json(const AffineExpr& e) {
  Json terms = Json::array();
  for (const auto& [v, c] : e.terms()) terms.push_back(Json::array({v.node.str(), v.index, c}));
  Json j;
  j["terms"] = std::move(terms);
  j["constant"] = e.constant();
  return j;
}

AffineExpr expr_from_json(const Json& j) {
  AffineExpr e(finite(j.at("constant"), "constant"));
  for (const auto& t : j.at("terms")) {
    if (!t.is_array() || t.size() != 3) throw ModelError("malformed expression term");
    e.add_term({NodeId::parse(t[0].get<std::string>()), t[1].get<std::uint32_t>()},
               finite(t[2], "coefficient"));
  }
  return e;
}

Json to_json(const Constraint& c) {
  Json j;
  j["body"] = to_json(c.body);
  j["sense"] = std::string(sense_symbol(c.sense));
  j["rhs"] = c.rhs;
  return j;
}

Constraint constraint_from_json(const Json& j) {
  return {expr_from_json(j.at("body")), parse_sense(j.at("sense").get<std::string>()),
          finite(j.at("rhs"), "rhs")};
}

Json graph_to_json(const OptiGraph& g) {
  Json j;
  j["id"] = g.id().str();
  j["label"] = g.label();
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) {
    Json node;
    node["id"] = n.id().str();
    node["label"] = n.label();
    Json vars = Json::array();
    for (const auto& v : n.variables()) {
      Json var;
      var["name"] = v.var_name;
      var["subscripts"] = v.subscripts;
      var["bounds"] = to_json(v.bounds);
      vars.push_back(std::move(var));
    }
    node["variables"] = std::move(vars);
    Json rows = Json::array();
    for (const auto& c : n.constraints()) rows.push_back(to_json(c));
    node["constraints"] = std::move(rows);
    node["objective"] = to_json(n.objective());
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    Json edge;
    edge["id"] = e.id.str();
    Json rows = Json::array();
    for (const auto& c : e.constraints) rows.push_back(to_json(c));
    edge["constraints"] = std::move(rows);
    edges.push_back(std::move(edge));
  }
  j["edges"] = std::move(edges);
  Json subs = Json::array();
  for (const auto* sg : g.subgraphs()) subs.push_back(graph_to_json(*sg));
  j["subgraphs"] = std::move(subs);
  return j;
}

namespace {

void load_nodes(OptiGraph& g, const Json& j) {
  for (const auto& node : j.at("nodes")) {
    NodeId id = g.add_node(node.at("label").get<std::string>(),
                           NodeId::parse(node.at("id").get<std::string>()));
    for (const auto& var : node.at("variables")) {
      auto subs = var.at("subscripts").get<std::vector<std::int64_t>>();
      g.add_variable(id, var.at("name").get<std::string>(), bounds_from_json(var.at("bounds")), subs);
    }
  }
  for (const auto& sub : j.at("subgraphs")) {
    OptiGraph child(sub.at("label").get<std::string>(), GraphId::parse(sub.at("id").get<std::string>()));
    load_nodes(child, sub);
    g.add_subgraph(std::move(child));
  }
}

// Constraints are loaded after every node exists so that edges may reference
// nodes anywhere below.
void load_rows(OptiGraph& g, const Json& j) {
  for (const auto& node : j.at("nodes")) {
    NodeId id = NodeId::parse(node.at("id").get<std::string>());
    for (const auto& c : node.at("constraints")) g.add_constraint(id, constraint_from_json(c));
    g.set_node_objective(id, expr_from_json(node.at("objective")));
  }
  std::size_t i = 0;
  for (const auto& sub : j.at("subgraphs")) load_rows(g.subgraph(i++), sub);
  for (const auto& edge : j.at("edges")) {
    EdgeId id = EdgeId::parse(edge.at("id").get<std::string>());
    for (const auto& c : edge.at("constraints")) g.add_link_constraint(constraint_from_json(c), id);
  }
}

}  // namespace

OptiGraph graph_from_json(const Json& j) {
  OptiGraph g(j.at("label").get<std::string>(), GraphId::parse(j.at("id").get<std::string>()));
  load_nodes(g, j);
  load_rows(g, j);
  return g;
}

}  // namespace optigraph
