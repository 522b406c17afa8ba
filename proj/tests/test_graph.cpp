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

#include <doctest.h>

#include <random>
#include <set>

#include "optigraph/graph.hpp"

using namespace optigraph;

TEST_CASE("add_node") {
  OptiGraph g;
  g.add_node("n1");
  CHECK(g.nodes().size() == 1);
  CHECK_THROWS_AS(g.add_node("n1"), ModelError);

  OptiGraph many;
  std::set<NodeId> ids;
  for (int i = 0; i < 52; ++i) ids.insert(many.add_node("op" + std::to_string(i)));
  CHECK(ids.size() == 52);
  for (int i = 0; i < 52; ++i) CHECK(many.find_node("op" + std::to_string(i)) != nullptr);
}

TEST_CASE("add_variable assigns dense indices and validates bounds") {
  OptiGraph g;
  NodeId n = g.add_node("n");
  VariableId x = g.add_variable(n, "x");
  CHECK(x.index == 0);
  CHECK(g.variable_name(x) == "n[:x]");
  CHECK(g.bounds(x).lower == 0.0);
  CHECK(g.bounds(x).upper == kInf);
  CHECK_THROWS_AS(g.add_variable(n, "y", {5.0, 3.0}), ModelError);
  CHECK_THROWS_AS(g.add_variable(n, "x"), ModelError);
  VariableId zero = g.add_variable(n, "vZERO", {0.0, 0.0});
  CHECK(zero.index == 1);
  std::vector<std::int64_t> s{1, 2};
  VariableId sub = g.add_variable(n, "x", {}, s);
  CHECK(g.variable_name(sub) == "n[:x][1,2]");
  CHECK(g.find_variable("n[:x][1,2]") == sub);
}

TEST_CASE("add_constraint keeps rows node-local") {
  OptiGraph g;
  NodeId n1 = g.add_node("n1"), n2 = g.add_node("n2");
  VariableId x = g.add_variable(n1, "x", {-kInf, kInf}), y = g.add_variable(n1, "y", {-kInf, kInf});
  VariableId z = g.add_variable(n2, "z");
  g.add_constraint(n1, eq(AffineExpr(x) + AffineExpr(y), 0.0));
  CHECK(g.node(n1).constraints().size() == 1);
  CHECK_THROWS_AS(g.add_constraint(n1, eq(AffineExpr(x) + AffineExpr(z), 0.0)), ModelError);

  // Mass balance row y_save + y_sell - zeta x_buy = 0 with zeta = 2.
  NodeId op = g.add_node("op");
  VariableId save = g.add_variable(op, "y_save", {-20, 20});
  VariableId sell = g.add_variable(op, "y_sell", {0, 50});
  VariableId buy = g.add_variable(op, "x_buy", {0, 15});
  g.add_constraint(op, eq(AffineExpr(save) + AffineExpr(sell) - 2.0 * AffineExpr(buy), 0.0));
  CHECK(g.node(op).constraints().back().body.size() == 3);
}

TEST_CASE("link constraint edge policies") {
  OptiGraph g;
  NodeId a = g.add_node("a"), b = g.add_node("b"), c = g.add_node("c");
  VariableId xa = g.add_variable(a, "x"), xb = g.add_variable(b, "x"), xc = g.add_variable(c, "x");
  CHECK_THROWS_AS(g.add_link_constraint(AffineExpr(xa) <= 1.0), ModelError);
  EdgeId e = g.add_link_constraint(AffineExpr(xb) - AffineExpr(xa) <= 0.0);
  EdgeId again = g.add_link_constraint(AffineExpr(xa) + AffineExpr(xb) >= 1.0);
  CHECK(e == again);
  CHECK(g.edges().size() == 1);
  CHECK(g.edges()[0].constraints.size() == 2);
  g.add_link_constraint(AffineExpr(xa) + AffineExpr(xb) + AffineExpr(xc) <= 1.0);
  CHECK(g.edges().size() == 2);
  CHECK(g.edges()[1].nodes.size() == 3);

  OptiGraph other;
  NodeId far = other.add_node("far");
  VariableId xf = other.add_variable(far, "x");
  CHECK_THROWS_AS(g.add_link_constraint(AffineExpr(xa) + AffineExpr(xf) <= 1.0), ModelError);
}

TEST_CASE("subgraph nesting") {
  OptiGraph g("G");
  NodeId top = g.add_node("top");
  OptiGraph g1("G1");
  NodeId n1 = g1.add_node("n1");
  OptiGraph& g1ref = g.add_subgraph(std::move(g1));
  OptiGraph g11("G11");
  NodeId n11 = g11.add_node("n11");
  OptiGraph copy_of_g11 = g11;
  g1ref.add_subgraph(std::move(g11));
  CHECK(g.num_subgraphs() == 1);
  CHECK(g.subgraph(0).num_subgraphs() == 1);

  // all_nodes = own nodes plus descendants, checked against a set union.
  std::set<NodeId> expected{top, n1, n11};
  std::set<NodeId> got;
  for (const auto* n : g.all_nodes()) got.insert(n->id());
  CHECK(got == expected);
  CHECK(g.num_all_nodes() == g.nodes().size() + g.subgraph(0).num_all_nodes());

  // Same child twice (same ids) is rejected.
  CHECK_THROWS_AS(g.add_subgraph(copy_of_g11), ModelError);
  OptiGraph self = g;
  CHECK_THROWS_AS(g.add_subgraph(self), ModelError);

  // Parent links into descendants.
  VariableId xt = g.add_variable(top, "x");
  VariableId x11 = g.add_variable(n11, "x");
  g.add_link_constraint(AffineExpr(xt) - AffineExpr(x11) <= 0.0);
  CHECK(g.owning_graph(n11)->label() == "G11");
  CHECK(g.find_variable("n11[:x]") == x11);
}

TEST_CASE("graph objective is the sum of node objectives") {
  OptiGraph g;
  NodeId a = g.add_node("a"), b = g.add_node("b"), c = g.add_node("c");
  VariableId x = g.add_variable(a, "x"), y = g.add_variable(b, "y");
  g.set_node_objective(a, 2.0 * AffineExpr(x));
  g.set_node_objective(b, 3.0 * AffineExpr(y));
  AffineExpr obj = g.set_to_node_objectives();
  CHECK(obj.coefficient(x) == 2.0);
  CHECK(obj.coefficient(y) == 3.0);
  CHECK(obj.size() == 2);
  (void)c;
  CHECK_THROWS_AS(g.set_node_objective(a, AffineExpr(y)), ModelError);
}

namespace {

// Random hierarchical graph; returns node/edge content independent of nesting
// through the `nest_deep` switch.
OptiGraph random_graph(std::uint32_t seed, bool nest_deep) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  OptiGraph g("root");
  OptiGraph a("A"), b("B");
  std::vector<VariableId> vars;
  // Ids must match between the two nestings, so they derive from the seed.
  auto id_for = [&](int k) {
    Uuid u;
    u.bytes[0] = static_cast<std::uint8_t>(seed);
    u.bytes[1] = static_cast<std::uint8_t>(k);
    u.bytes[15] = 1;
    return NodeId{u};
  };
  NodeId na = a.add_node("na", id_for(1));
  NodeId nb = b.add_node("nb", id_for(2));
  for (int i = 0; i < 3; ++i) vars.push_back(a.add_variable(na, "x", {0, 10}, std::vector<std::int64_t>{i}));
  for (int i = 0; i < 3; ++i) vars.push_back(b.add_variable(nb, "y", {-1, 5}, std::vector<std::int64_t>{i}));
  a.add_constraint(na, AffineExpr(vars[0]) + AffineExpr(vars[1]) <= 4.0);
  b.add_constraint(nb, AffineExpr(vars[3]) - AffineExpr(vars[4]) >= -2.0);
  a.set_node_objective(na, AffineExpr(vars[0], coef(rng)) + AffineExpr(vars[2], 1.0));
  b.set_node_objective(nb, AffineExpr(vars[5], coef(rng)));
  if (nest_deep) {
    a.add_subgraph(std::move(b));
    g.add_subgraph(std::move(a));
  } else {
    g.add_subgraph(std::move(a));
    g.add_subgraph(std::move(b));
  }
  g.add_link_constraint(eq(AffineExpr(vars[2], coef(rng) == 0 ? 1.0 : 2.0) - AffineExpr(vars[5]), 1.0));
  return g;
}

}  // namespace

TEST_CASE("flatten") {
  OptiGraph empty;
  StandardFormProblem p = flatten(empty);
  CHECK(p.num_variables() == 0);
  CHECK(p.num_rows() == 0);

  // Re-nesting that preserves node and edge sets does not change the model.
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    auto flat = canonical_dump(flatten(random_graph(seed, false)));
    auto deep = canonical_dump(flatten(random_graph(seed, true)));
    CHECK(flat == deep);
  }

  OptiGraph g = random_graph(3, false);
  StandardFormProblem q = flatten(g);
  CHECK(q.num_variables() == 6);
  CHECK(q.num_rows() == 3);
  CHECK(q.provenance[0].origin == RowOrigin::kEdge);  // root edges precede subgraph rows
  CHECK(q.provenance[2].origin == RowOrigin::kNode);
  // Determinism: flatten twice, identical dumps and column orders.
  StandardFormProblem q2 = flatten(g);
  CHECK(q.variable_order == q2.variable_order);
  CHECK(canonical_dump(q) == canonical_dump(q2));
}

TEST_CASE("hierarchy objective equals the sum of node objectives at random points") {
  OptiGraph g = random_graph(9, true);
  StandardFormProblem p = flatten(g);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 50; ++k) {
    std::map<VariableId, double> point;
    for (const auto& v : p.variable_order) point[v] = u(rng);
    auto at = [&](const VariableId& v) { return point.at(v); };
    double direct = 0.0;
    for (const auto* n : g.all_nodes()) direct += n->objective().evaluate(at);
    CHECK(p.objective.evaluate(at) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("graph dump is sorted and id-free") {
  OptiGraph a = random_graph(5, false);
  OptiGraph b = random_graph(5, false);
  std::string da = dump_graph(a);
  CHECK(da == dump_graph(b));
  CHECK(da.find("\"record\":\"edge\"") != std::string::npos);
  CHECK(da.find(a.id().str()) == std::string::npos);
}

TEST_CASE("bound mutation") {
  OptiGraph g;
  NodeId n = g.add_node("n");
  VariableId x = g.add_variable(n, "x", {0, 4});
  g.set_lower_bound(x, 1.0);
  CHECK(g.bounds(x).lower == 1.0);
  CHECK_THROWS_AS(g.set_lower_bound(x, 5.0), ModelError);
  CHECK_THROWS_AS(g.set_upper_bound(x, 0.5), ModelError);
}
