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

#include "optigraph/algebra.hpp"

using namespace optigraph;

namespace {

struct Vars {
  NodeId n = NodeId::generate();
  VariableId x{n, 0}, y{n, 1}, z{n, 2};
};

// Integer-valued coefficients keep float addition exact, so the monoid laws
// can be checked with ==.
AffineExpr random_expr(std::mt19937& rng, const std::vector<VariableId>& pool) {
  std::uniform_int_distribution<int> coef(-5, 5), count(0, static_cast<int>(pool.size()));
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  AffineExpr e(static_cast<double>(coef(rng)));
  int k = count(rng);
  for (int i = 0; i < k; ++i) e.add_term(pool[pick(rng)], coef(rng));
  return e;
}

}  // namespace

TEST_CASE("expr_add cancels and merges") {
  Vars v;
  AffineExpr a(v.x, 1.0);
  AffineExpr b(v.x, -1.0);
  b.add_constant(5.0);
  AffineExpr sum = expr_add(a, b);
  CHECK(sum.empty());
  CHECK(sum.constant() == 5.0);

  AffineExpr c(v.x, 2.0);
  c.add_constant(1.0);
  AffineExpr d(v.y, 3.0);
  AffineExpr merged = expr_add(c, d);
  CHECK(merged.size() == 2);
  CHECK(merged.coefficient(v.x) == 2.0);
  CHECK(merged.coefficient(v.y) == 3.0);
  CHECK(merged.constant() == 1.0);
}

TEST_CASE("expr_scale") {
  Vars v;
  AffineExpr a(v.x, 3.0);
  a.add_constant(1.0);
  AffineExpr twice = expr_scale(a, 2.0);
  CHECK(twice.coefficient(v.x) == 6.0);
  CHECK(twice.constant() == 2.0);
  AffineExpr none = expr_scale(a, 0.0);
  CHECK(none.empty());
  CHECK(none.constant() == 0.0);
  CHECK(expr_scale(a, 1.0) == a);
}

TEST_CASE("zero coefficients are dropped but tiny ones survive") {
  Vars v;
  AffineExpr e;
  e.add_term(v.x, 0.0);
  CHECK(e.empty());
  e.add_term(v.y, 1e-300);
  CHECK(e.size() == 1);
}

TEST_CASE("affine expressions form a commutative monoid; scaling distributes") {
  Vars v;
  std::vector<VariableId> pool{v.x, v.y, v.z};
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 500; ++trial) {
    AffineExpr a = random_expr(rng, pool), b = random_expr(rng, pool), c = random_expr(rng, pool);
    CHECK(expr_add(a, b) == expr_add(b, a));
    CHECK(expr_add(expr_add(a, b), c) == expr_add(a, expr_add(b, c)));
    CHECK(expr_add(a, AffineExpr{}) == a);
    double k = std::uniform_int_distribution<int>(-4, 4)(rng);
    CHECK(expr_scale(expr_add(a, b), k) == expr_add(expr_scale(a, k), expr_scale(b, k)));
    AffineExpr sum = expr_add(a, b);
    for (const auto& [var, coef] : sum.terms()) CHECK(coef != 0.0);
  }
}

TEST_CASE("comparison operators build rows with constants on the rhs") {
  Vars v;
  Constraint c = (AffineExpr(v.x) + AffineExpr(3.0)) <= AffineExpr(v.y, 2.0);
  CHECK(c.sense == Sense::kLessEqual);
  CHECK(c.rhs == -3.0);
  CHECK(c.body.coefficient(v.x) == 1.0);
  CHECK(c.body.coefficient(v.y) == -2.0);
  CHECK(c.body.constant() == 0.0);
  Constraint e = eq(AffineExpr(v.x), 4.0);
  CHECK(e.sense == Sense::kEqual);
  CHECK(e.rhs == 4.0);
}

TEST_CASE("canonical_name follows the label[:name][subscripts] scheme") {
  std::vector<std::int64_t> three{3};
  CHECK(canonical_name("planning_node", "vCAP", three) == "planning_node[:vCAP][3]");
  CHECK(canonical_name("n1", "x") == "n1[:x]");
  std::vector<std::int64_t> a{1, 2}, b{12};
  CHECK(canonical_name("n1", "x", a) != canonical_name("n1", "x", b));
  CHECK(name_suffix("planning_node[:vCAP][3]") == "[:vCAP][3]");
  CHECK_THROWS_AS(canonical_name("bad[", "x"), ModelError);
  CHECK_THROWS_AS(canonical_name("n", "x]"), ModelError);
  CHECK_THROWS_AS(canonical_name("", "x"), ModelError);
}

TEST_CASE("canonical_name is injective over small subscript sets") {
  // Exhaustive: every subscript list of length <= 3 over {-1,0,1,2,10,12,21}.
  std::vector<std::int64_t> alphabet{-1, 0, 1, 2, 10, 12, 21};
  std::vector<std::vector<std::int64_t>> lists{{}};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& l : lists)
      if (static_cast<int>(l.size()) == len - 1)
        for (auto s : alphabet) {
          auto ext = l;
          ext.push_back(s);
          next.push_back(ext);
        }
    lists.insert(lists.end(), next.begin(), next.end());
  }
  std::set<std::string> seen;
  std::size_t total = 0;
  for (std::string label : {"n1", "n", "n11"})
    for (std::string name : {"x", "x1", "y"})
      for (const auto& l : lists) {
        seen.insert(canonical_name(label, name, l));
        ++total;
      }
  CHECK(seen.size() == total);
}

TEST_CASE("uuid text round trip") {
  for (int i = 0; i < 100; ++i) {
    Uuid u = Uuid::generate();
    CHECK(Uuid::parse(u.str()) == u);
  }
  CHECK_THROWS_AS(Uuid::parse("zz"), ModelError);
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double x = d(rng);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-0.0) == "0");
}
