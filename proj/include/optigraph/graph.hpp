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

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "optigraph/algebra.hpp"

namespace optigraph {

struct VariableRecord {
  std::string var_name;
  std::vector<std::int64_t> subscripts;
  std::string name;  // canonical
  VariableBounds bounds;
};

/// A node owns its variables, local constraints and objective fragment.
class OptiNode {
 public:
  OptiNode(NodeId id, std::string label) : id_(id), label_(std::move(label)) {}

  NodeId id() const { return id_; }
  const std::string& label() const { return label_; }
  const std::vector<VariableRecord>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const AffineExpr& objective() const { return objective_; }
  std::size_t num_variables() const { return variables_.size(); }

  VariableId variable(std::uint32_t index) const { return {id_, index}; }
  std::optional<VariableId> find_variable(std::string_view var_name,
                                          std::span<const std::int64_t> subscripts = {}) const;

 private:
  friend class OptiGraph;

  NodeId id_;
  std::string label_;
  std::vector<VariableRecord> variables_;
  std::vector<Constraint> constraints_;
  AffineExpr objective_;
};

/// Hyperedge over >= 2 nodes holding linking constraints.
struct OptiEdge {
  EdgeId id;
  std::set<NodeId> nodes;
  std::vector<Constraint> constraints;
};

enum class RowOrigin { kNode, kEdge, kInterWorker, kAuxiliary };

std::string_view row_origin_name(RowOrigin origin);

struct RowProvenance {
  RowOrigin origin = RowOrigin::kNode;
  std::string id;
};

/// Flattened affine LP/MIP. Rows carry no body constant; `variable_order`
/// lists every column exactly once.
struct StandardFormProblem {
  AffineExpr objective;
  std::vector<Constraint> rows;
  std::vector<RowProvenance> provenance;
  std::vector<VariableId> variable_order;
  std::map<VariableId, VariableBounds> bounds;
  std::map<VariableId, std::string> names;

  std::size_t num_variables() const { return variable_order.size(); }
  std::size_t num_rows() const { return rows.size(); }
  bool has_integers() const;

  void add_variable(const VariableId& v, std::string name, VariableBounds b);
  /// Appends a row, moving any body constant to the rhs.
  std::size_t add_row(Constraint c, RowProvenance provenance = {RowOrigin::kAuxiliary, ""});
  const std::string& name_of(const VariableId& v) const;
};

/// Canonical text of a problem: sorted bounds, objective and rows keyed by
/// canonical names. Equal strings mean equal models up to ordering.
std::string canonical_dump(const StandardFormProblem& p);

/// Hierarchical hypergraph of optimization nodes. Subgraphs are owned by
/// value; references returned by add_subgraph stay valid until that
/// subgraph is removed or the parent is destroyed.
class OptiGraph {
 public:
  explicit OptiGraph(std::string label = "graph");
  OptiGraph(std::string label, GraphId id);
  OptiGraph(const OptiGraph& other);
  OptiGraph& operator=(const OptiGraph& other);
  OptiGraph(OptiGraph&&) noexcept = default;
  OptiGraph& operator=(OptiGraph&&) noexcept = default;
  ~OptiGraph() = default;

  GraphId id() const { return id_; }
  const std::string& label() const { return label_; }

  NodeId add_node(std::string label);
  /// Used when rebuilding a graph from a serialized copy.
  NodeId add_node(std::string label, NodeId id);

  VariableId add_variable(NodeId node, std::string_view var_name, VariableBounds bounds = {},
                          std::span<const std::int64_t> subscripts = {});
  ConstraintId add_constraint(NodeId node, Constraint c);
  EdgeId add_link_constraint(Constraint c);
  /// Appends a link constraint to an edge with a caller-chosen id (rebuilds).
  EdgeId add_link_constraint(Constraint c, EdgeId preferred_id);
  OptiGraph& add_subgraph(OptiGraph child);

  void set_node_objective(NodeId node, AffineExpr objective);
  /// The graph objective is the sum of node objectives over the hierarchy.
  AffineExpr set_to_node_objectives() const { return objective(); }
  AffineExpr objective() const;

  void set_bounds(const VariableId& v, VariableBounds bounds);
  void set_lower_bound(const VariableId& v, double value);
  void set_upper_bound(const VariableId& v, double value);
  const VariableBounds& bounds(const VariableId& v) const;
  const std::string& variable_name(const VariableId& v) const;

  const std::vector<OptiNode>& nodes() const { return nodes_; }
  const std::vector<OptiEdge>& edges() const { return edges_; }
  std::vector<const OptiGraph*> subgraphs() const;
  OptiGraph& subgraph(std::size_t i) { return *subgraphs_.at(i); }
  const OptiGraph& subgraph(std::size_t i) const { return *subgraphs_.at(i); }
  std::size_t num_subgraphs() const { return subgraphs_.size(); }

  /// Nodes of this graph followed by those of each subgraph, recursively.
  std::vector<const OptiNode*> all_nodes() const;
  std::vector<const OptiEdge*> all_edges() const;
  std::size_t num_all_nodes() const;

  bool contains_node(const NodeId& id) const { return find_node(id) != nullptr; }
  const OptiNode& node(const NodeId& id) const;
  const OptiNode* find_node(const NodeId& id) const;
  const OptiNode* find_node(std::string_view label) const;
  /// The graph in this hierarchy that directly owns `id`.
  const OptiGraph* owning_graph(const NodeId& id) const;
  const OptiGraph* find_graph(const GraphId& id) const;
  OptiGraph* find_graph(const GraphId& id);
  /// Hierarchy-wide lookup by canonical name.
  std::optional<VariableId> find_variable(std::string_view canonical) const;
  bool contains_variable(const VariableId& v) const;

 private:
  OptiNode& mutable_node(const NodeId& id);
  OptiGraph* mutable_owner(const NodeId& id);
  void collect_ids(std::set<Uuid>& out) const;
  void check_edge_incidence(const std::set<NodeId>& nodes) const;
  EdgeId append_link(Constraint c, std::optional<EdgeId> preferred_id);

  GraphId id_;
  std::string label_;
  std::vector<OptiNode> nodes_;
  std::vector<OptiEdge> edges_;
  std::vector<std::unique_ptr<OptiGraph>> subgraphs_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<std::string, NodeId> label_index_;
  std::unordered_map<std::string, VariableId> name_index_;
};

/// Rows = node constraints then edge constraints, walking the hierarchy
/// depth first; columns in the same walk order.
StandardFormProblem flatten(const OptiGraph& g);

/// One JSON record per line (graph/node/variable/constraint/edge), keys
/// sorted, lines sorted. Ids are omitted so dumps compare across builds.
std::string dump_graph(const OptiGraph& g);

/// Renders an expression as "c*name + ..." sorted by name.
std::string format_expr(const AffineExpr& e,
                        const std::function<std::string(const VariableId&)>& namer);
std::string format_constraint(const Constraint& c,
                              const std::function<std::string(const VariableId&)>& namer);

}  // namespace optigraph
