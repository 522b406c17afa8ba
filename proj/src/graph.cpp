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

#include "optigraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <sstream>

#include <json.hpp>

namespace optigraph {

std::optional<VariableId> OptiNode::find_variable(std::string_view var_name,
                                                  std::span<const std::int64_t> subscripts) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.var_name == var_name && std::equal(v.subscripts.begin(), v.subscripts.end(),
                                             subscripts.begin(), subscripts.end()))
      return VariableId{id_, static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

std::string_view row_origin_name(RowOrigin origin) {
  switch (origin) {
    case RowOrigin::kNode:
      return "node";
    case RowOrigin::kEdge:
      return "edge";
    case RowOrigin::kInterWorker:
      return "interworker";
    case RowOrigin::kAuxiliary:
      return "auxiliary";
  }
  return "?";
}

bool StandardFormProblem::has_integers() const {
  return std::any_of(bounds.begin(), bounds.end(),
                     [](const auto& kv) { return kv.second.is_integer(); });
}

void StandardFormProblem::add_variable(const VariableId& v, std::string name, VariableBounds b) {
  if (bounds.contains(v)) throw ModelError("column '" + name + "' already present");
  variable_order.push_back(v);
  bounds.emplace(v, b);
  names.emplace(v, std::move(name));
}

std::size_t StandardFormProblem::add_row(Constraint c, RowProvenance prov) {
  double constant = c.body.constant();
  if (constant != 0.0) {
    c.body.add_constant(-constant);
    c.rhs -= constant;
  }
  rows.push_back(std::move(c));
  provenance.push_back(std::move(prov));
  return rows.size() - 1;
}

const std::string& StandardFormProblem::name_of(const VariableId& v) const {
  auto it = names.find(v);
  if (it == names.end()) throw ModelError("variable " + v.node.str() + "#" +
                                          std::to_string(v.index) + " is not a column");
  return it->second;
}

std::string format_expr(const AffineExpr& e,
                        const std::function<std::string(const VariableId&)>& namer) {
  std::vector<std::pair<std::string, double>> terms;
  terms.reserve(e.size());
  for (const auto& [v, c] : e.terms()) terms.emplace_back(namer(v), c);
  std::sort(terms.begin(), terms.end());
  std::string out;
  for (const auto& [name, c] : terms) {
    if (!out.empty()) out += " + ";
    out += format_double(c) + "*" + name;
  }
  if (e.constant() != 0.0 || out.empty()) {
    if (!out.empty()) out += " + ";
    out += format_double(e.constant());
  }
  return out;
}

std::string format_constraint(const Constraint& c,
                              const std::function<std::string(const VariableId&)>& namer) {
  AffineExpr body = c.body;
  double rhs = c.rhs - body.constant();
  body.add_constant(-body.constant());
  return format_expr(body, namer) + " " + std::string(sense_symbol(c.sense)) + " " +
         format_double(rhs);
}

std::string canonical_dump(const StandardFormProblem& p) {
  auto namer = [&](const VariableId& v) { return p.name_of(v); };
  std::vector<std::string> vars;
  for (const auto& v : p.variable_order) {
    const auto& b = p.bounds.at(v);
    vars.push_back(p.name_of(v) + " in [" + format_double(b.lower) + ", " +
                   format_double(b.upper) + "]" + (b.is_integer() ? " integer" : ""));
  }
  std::vector<std::string> rows;
  for (const auto& r : p.rows) rows.push_back(format_constraint(r, namer));
  std::sort(vars.begin(), vars.end());
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out << "objective: min " << format_expr(p.objective, namer) << "\n";
  out << "variables: " << vars.size() << "\n";
  for (const auto& v : vars) out << "  " << v << "\n";
  out << "rows: " << rows.size() << "\n";
  for (const auto& r : rows) out << "  " << r << "\n";
  return out.str();
}

OptiGraph::OptiGraph(std::string label) : OptiGraph(std::move(label), GraphId::generate()) {}

OptiGraph::OptiGraph(std::string label, GraphId id) : id_(id), label_(std::move(label)) {
  validate_identifier(label_, "graph label");
}

OptiGraph::OptiGraph(const OptiGraph& other)
    : id_(other.id_),
      label_(other.label_),
      nodes_(other.nodes_),
      edges_(other.edges_),
      node_index_(other.node_index_),
      label_index_(other.label_index_),
      name_index_(other.name_index_) {
  subgraphs_.reserve(other.subgraphs_.size());
  for (const auto& sg : other.subgraphs_) subgraphs_.push_back(std::make_unique<OptiGraph>(*sg));
}

OptiGraph& OptiGraph::operator=(const OptiGraph& other) {
  if (this != &other) *this = OptiGraph(other);
  return *this;
}

NodeId OptiGraph::add_node(std::string label) { return add_node(std::move(label), NodeId::generate()); }

NodeId OptiGraph::add_node(std::string label, NodeId id) {
  validate_identifier(label, "node label");
  if (label_index_.contains(label))
    throw ModelError("node label '" + label + "' already used in graph '" + label_ + "'");
  if (contains_node(id)) throw ModelError("node id " + id.str() + " already in hierarchy");
  label_index_.emplace(label, id);
  node_index_.emplace(id, nodes_.size());
  nodes_.emplace_back(id, std::move(label));
  return id;
}

VariableId OptiGraph::add_variable(NodeId node_id, std::string_view var_name, VariableBounds bounds,
                                   std::span<const std::int64_t> subscripts) {
  OptiGraph* owner = mutable_owner(node_id);
  OptiNode& n = owner->mutable_node(node_id);
  std::string name = canonical_name(n.label(), var_name, subscripts);
  if (bounds.lower > bounds.upper)
    throw ModelError("variable '" + name + "' has lower bound " + format_double(bounds.lower) +
                     " above upper bound " + format_double(bounds.upper));
  if (std::isnan(bounds.lower) || std::isnan(bounds.upper))
    throw ModelError("variable '" + name + "' has a NaN bound");
  if (owner->name_index_.contains(name))
    throw ModelError("variable '" + name + "' already exists on node '" + n.label() + "'");
  VariableId id{node_id, static_cast<std::uint32_t>(n.variables_.size())};
  n.variables_.push_back(VariableRecord{std::string(var_name),
                                        {subscripts.begin(), subscripts.end()}, name, bounds});
  owner->name_index_.emplace(std::move(name), id);
  return id;
}

ConstraintId OptiGraph::add_constraint(NodeId node_id, Constraint c) {
  OptiNode& n = mutable_owner(node_id)->mutable_node(node_id);
  for (const auto& [v, coef] : c.body.terms()) {
    if (v.node != node_id)
      throw ModelError("constraint on node '" + n.label() +
                       "' references a variable of another node; use add_link_constraint");
    if (v.index >= n.variables_.size())
      throw ModelError("constraint on node '" + n.label() + "' references unknown variable index " +
                       std::to_string(v.index));
  }
  if (!std::isfinite(c.rhs)) throw ModelError("constraint rhs must be finite");
  n.constraints_.push_back(std::move(c));
  return ConstraintId{node_id, static_cast<std::uint32_t>(n.constraints_.size() - 1)};
}

void OptiGraph::check_edge_incidence(const std::set<NodeId>& nodes) const {
  if (nodes.size() < 2)
    throw ModelError("link constraint spans " + std::to_string(nodes.size()) +
                     " node(s); single-node constraints belong on the node");
  for (const auto& id : nodes)
    if (!contains_node(id))
      throw ModelError("link constraint references node " + id.str() +
                       " outside the hierarchy of graph '" + label_ + "'");
}

EdgeId OptiGraph::add_link_constraint(Constraint c) { return append_link(std::move(c), std::nullopt); }

EdgeId OptiGraph::add_link_constraint(Constraint c, EdgeId preferred_id) {
  return append_link(std::move(c), preferred_id);
}

EdgeId OptiGraph::append_link(Constraint c, std::optional<EdgeId> preferred_id) {
  std::set<NodeId> incident;
  for (const auto& [v, coef] : c.body.terms()) incident.insert(v.node);
  check_edge_incidence(incident);
  for (const auto& [v, coef] : c.body.terms())
    if (!contains_variable(v))
      throw ModelError("link constraint references unknown variable index " +
                       std::to_string(v.index) + " on node " + v.node.str());
  if (!std::isfinite(c.rhs)) throw ModelError("constraint rhs must be finite");
  auto it = std::find_if(edges_.begin(), edges_.end(),
                         [&](const OptiEdge& e) { return e.nodes == incident; });
  if (it == edges_.end()) {
    edges_.push_back(OptiEdge{preferred_id.value_or(EdgeId::generate()), std::move(incident), {}});
    it = edges_.end() - 1;
  }
  it->constraints.push_back(std::move(c));
  return it->id;
}

void OptiGraph::collect_ids(std::set<Uuid>& out) const {
  out.insert(id_.value);
  for (const auto& n : nodes_) out.insert(n.id().value);
  for (const auto& e : edges_) out.insert(e.id.value);
  for (const auto& sg : subgraphs_) sg->collect_ids(out);
}

OptiGraph& OptiGraph::add_subgraph(OptiGraph child) {
  std::set<Uuid> mine, theirs;
  collect_ids(mine);
  child.collect_ids(theirs);
  for (const auto& id : theirs)
    if (mine.contains(id))
      throw ModelError("subgraph '" + child.label() + "' shares id " + id.str() +
                       " with graph '" + label_ + "' (already owned or cyclic)");
  subgraphs_.push_back(std::make_unique<OptiGraph>(std::move(child)));
  return *subgraphs_.back();
}

void OptiGraph::set_node_objective(NodeId node_id, AffineExpr objective) {
  OptiNode& n = mutable_owner(node_id)->mutable_node(node_id);
  for (const auto& [v, coef] : objective.terms())
    if (v.node != node_id || v.index >= n.variables_.size())
      throw ModelError("objective of node '" + n.label() + "' references a foreign variable");
  n.objective_ = std::move(objective);
}

AffineExpr OptiGraph::objective() const {
  AffineExpr total;
  for (const auto* n : all_nodes()) total += n->objective();
  return total;
}

void OptiGraph::set_bounds(const VariableId& v, VariableBounds b) {
  if (b.lower > b.upper)
    throw ModelError("bounds [" + format_double(b.lower) + ", " + format_double(b.upper) +
                     "] are inverted for '" + variable_name(v) + "'");
  OptiNode& n = mutable_owner(v.node)->mutable_node(v.node);
  if (v.index >= n.variables_.size()) throw ModelError("unknown variable index");
  n.variables_[v.index].bounds = b;
}

void OptiGraph::set_lower_bound(const VariableId& v, double value) {
  VariableBounds b = bounds(v);
  if (value > b.upper)
    throw ModelError("lower bound " + format_double(value) + " exceeds upper bound " +
                     format_double(b.upper) + " of '" + variable_name(v) + "'");
  b.lower = value;
  set_bounds(v, b);
}

void OptiGraph::set_upper_bound(const VariableId& v, double value) {
  VariableBounds b = bounds(v);
  if (value < b.lower)
    throw ModelError("upper bound " + format_double(value) + " is below lower bound " +
                     format_double(b.lower) + " of '" + variable_name(v) + "'");
  b.upper = value;
  set_bounds(v, b);
}

const VariableBounds& OptiGraph::bounds(const VariableId& v) const {
  const OptiNode& n = node(v.node);
  if (v.index >= n.variables().size()) throw ModelError("unknown variable index");
  return n.variables()[v.index].bounds;
}

const std::string& OptiGraph::variable_name(const VariableId& v) const {
  const OptiNode& n = node(v.node);
  if (v.index >= n.variables().size()) throw ModelError("unknown variable index");
  return n.variables()[v.index].name;
}

std::vector<const OptiGraph*> OptiGraph::subgraphs() const {
  std::vector<const OptiGraph*> out;
  for (const auto& sg : subgraphs_) out.push_back(sg.get());
  return out;
}

std::vector<const OptiNode*> OptiGraph::all_nodes() const {
  std::vector<const OptiNode*> out;
  for (const auto& n : nodes_) out.push_back(&n);
  for (const auto& sg : subgraphs_) {
    auto sub = sg->all_nodes();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::vector<const OptiEdge*> OptiGraph::all_edges() const {
  std::vector<const OptiEdge*> out;
  for (const auto& e : edges_) out.push_back(&e);
  for (const auto& sg : subgraphs_) {
    auto sub = sg->all_edges();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::size_t OptiGraph::num_all_nodes() const {
  std::size_t n = nodes_.size();
  for (const auto& sg : subgraphs_) n += sg->num_all_nodes();
  return n;
}

const OptiNode* OptiGraph::find_node(const NodeId& id) const {
  const OptiGraph* owner = owning_graph(id);
  return owner ? &owner->nodes_[owner->node_index_.at(id)] : nullptr;
}

const OptiNode* OptiGraph::find_node(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  return it == label_index_.end() ? nullptr : &nodes_[node_index_.at(it->second)];
}

const OptiNode& OptiGraph::node(const NodeId& id) const {
  const OptiNode* n = find_node(id);
  if (!n) throw ModelError("node " + id.str() + " is not in graph '" + label_ + "'");
  return *n;
}

const OptiGraph* OptiGraph::owning_graph(const NodeId& id) const {
  if (node_index_.contains(id)) return this;
  for (const auto& sg : subgraphs_)
    if (const OptiGraph* g = sg->owning_graph(id)) return g;
  return nullptr;
}

const OptiGraph* OptiGraph::find_graph(const GraphId& id) const {
  if (id_ == id) return this;
  for (const auto& sg : subgraphs_)
    if (const OptiGraph* g = sg->find_graph(id)) return g;
  return nullptr;
}

OptiGraph* OptiGraph::find_graph(const GraphId& id) {
  return const_cast<OptiGraph*>(std::as_const(*this).find_graph(id));
}

std::optional<VariableId> OptiGraph::find_variable(std::string_view canonical) const {
  auto it = name_index_.find(std::string(canonical));
  if (it != name_index_.end()) return it->second;
  for (const auto& sg : subgraphs_)
    if (auto v = sg->find_variable(canonical)) return v;
  return std::nullopt;
}

bool OptiGraph::contains_variable(const VariableId& v) const {
  const OptiNode* n = find_node(v.node);
  return n && v.index < n->variables().size();
}

OptiGraph* OptiGraph::mutable_owner(const NodeId& id) {
  auto* owner = const_cast<OptiGraph*>(owning_graph(id));
  if (!owner) throw ModelError("node " + id.str() + " is not in graph '" + label_ + "'");
  return owner;
}

OptiNode& OptiGraph::mutable_node(const NodeId& id) { return nodes_[node_index_.at(id)]; }

namespace {

void flatten_into(const OptiGraph& g, StandardFormProblem& p) {
  for (const auto& n : g.nodes()) {
    for (std::size_t i = 0; i < n.variables().size(); ++i)
      p.add_variable(n.variable(static_cast<std::uint32_t>(i)), n.variables()[i].name,
                     n.variables()[i].bounds);
    p.objective += n.objective();
  }
  for (const auto* sg : g.subgraphs()) flatten_into(*sg, p);
}

void collect_rows(const OptiGraph& g, StandardFormProblem& p) {
  for (const auto& n : g.nodes())
    for (const auto& c : n.constraints()) p.add_row(c, {RowOrigin::kNode, n.id().str()});
  for (const auto& e : g.edges())
    for (const auto& c : e.constraints) p.add_row(c, {RowOrigin::kEdge, e.id.str()});
  for (const auto* sg : g.subgraphs()) collect_rows(*sg, p);
}

void dump_into(const OptiGraph& g, const std::string& path, std::vector<std::string>& lines) {
  using nlohmann::json;
  auto namer = [&](const VariableId& v) { return g.variable_name(v); };
  lines.push_back(json{{"record", "graph"},
                       {"path", path},
                       {"nodes", g.nodes().size()},
                       {"edges", g.edges().size()},
                       {"subgraphs", g.num_subgraphs()}}
                      .dump());
  for (const auto& n : g.nodes()) {
    lines.push_back(json{{"record", "node"},
                         {"graph", path},
                         {"label", n.label()},
                         {"variables", n.variables().size()},
                         {"objective", format_expr(n.objective(), namer)}}
                        .dump());
    for (const auto& v : n.variables())
      lines.push_back(json{{"record", "variable"},
                           {"node", n.label()},
                           {"name", v.name},
                           {"lower", format_double(v.bounds.lower)},
                           {"upper", format_double(v.bounds.upper)},
                           {"integer", v.bounds.is_integer()}}
                          .dump());
    for (const auto& c : n.constraints())
      lines.push_back(json{{"record", "constraint"},
                           {"owner", n.label()},
                           {"row", format_constraint(c, namer)}}
                          .dump());
  }
  for (const auto& e : g.edges()) {
    std::vector<std::string> labels;
    for (const auto& id : e.nodes) labels.push_back(g.node(id).label());
    std::sort(labels.begin(), labels.end());
    std::string owner;
    for (const auto& l : labels) owner += (owner.empty() ? "" : "|") + l;
    lines.push_back(json{{"record", "edge"},
                         {"graph", path},
                         {"nodes", labels},
                         {"constraints", e.constraints.size()}}
                        .dump());
    for (const auto& c : e.constraints)
      lines.push_back(json{{"record", "constraint"},
                           {"owner", owner},
                           {"row", format_constraint(c, namer)}}
                          .dump());
  }
  for (const auto* sg : g.subgraphs()) dump_into(*sg, path + "/" + sg->label(), lines);
}

}  // namespace

StandardFormProblem flatten(const OptiGraph& g) {
  StandardFormProblem p;
  flatten_into(g, p);
  collect_rows(g, p);
  return p;
}

std::string dump_graph(const OptiGraph& g) {
  std::vector<std::string> lines;
  dump_into(g, g.label(), lines);
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace optigraph
