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

// Brute-force reference solvers used by the test suites. They work from the
// StandardFormProblem data only and share no code with the simplex.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "optigraph/graph.hpp"

namespace optigraph::oracle {

struct Halfspace {
  Eigen::VectorXd a;
  double b;
  bool equality;  // a'x = b, else a'x <= b
};

inline std::vector<Halfspace> halfspaces(const StandardFormProblem& p) {
  const auto n = static_cast<Eigen::Index>(p.variable_order.size());
  std::map<VariableId, Eigen::Index> col;
  for (Eigen::Index j = 0; j < n; ++j) col[p.variable_order[j]] = j;
  std::vector<Halfspace> out;
  for (const auto& r : p.rows) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [v, c] : r.body.terms()) a(col.at(v)) = c;
    double b = r.rhs - r.body.constant();
    if (r.sense == Sense::kGreaterEqual) {
      a = -a;
      b = -b;
    }
    out.push_back({a, b, r.sense == Sense::kEqual});
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& bd = p.bounds.at(p.variable_order[j]);
    if (std::isfinite(bd.upper)) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a(j) = 1;
      out.push_back({a, bd.upper, false});
    }
    if (std::isfinite(bd.lower)) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a(j) = -1;
      out.push_back({a, -bd.lower, false});
    }
  }
  return out;
}

/// Minimum of the objective over all basic feasible points of a bounded
/// polytope; nullopt when no vertex is feasible.
inline std::optional<double> vertex_enumeration(const StandardFormProblem& p, double tol = 1e-9) {
  const auto n = static_cast<Eigen::Index>(p.variable_order.size());
  auto hs = halfspaces(p);
  Eigen::VectorXd c(n);
  for (Eigen::Index j = 0; j < n; ++j) c(j) = p.objective.coefficient(p.variable_order[j]);
  std::optional<double> best;
  std::vector<std::size_t> pick(static_cast<std::size_t>(n));
  const std::size_t total = hs.size();
  if (static_cast<std::size_t>(n) > total) return best;
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      A.row(k) = hs[pick[k]].a.transpose();
      b(k) = hs[pick[k]].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() == n) {
      Eigen::VectorXd x = lu.solve(b);
      bool feasible = true;
      for (const auto& h : hs) {
        double lhs = h.a.dot(x);
        double scale = 1.0 + std::abs(h.b);
        if (lhs > h.b + tol * scale || (h.equality && lhs < h.b - tol * scale)) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        double v = c.dot(x) + p.objective.constant();
        if (!best || v < *best) best = v;
      }
    }
    // Next combination.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(pick.size()) - 1;
    while (i >= 0 && pick[i] == total - pick.size() + static_cast<std::size_t>(i)) --i;
    if (i < 0) break;
    ++pick[i];
    for (std::size_t k = static_cast<std::size_t>(i) + 1; k < pick.size(); ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

/// Exhaustive minimum over all 0/1 assignments (every column must be binary).
inline std::optional<double> binary_enumeration(const StandardFormProblem& p) {
  const std::size_t n = p.variable_order.size();
  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::map<VariableId, double> x;
    for (std::size_t j = 0; j < n; ++j) x[p.variable_order[j]] = (mask >> j) & 1u ? 1.0 : 0.0;
    auto at = [&](const VariableId& v) { return x.at(v); };
    bool ok = true;
    for (const auto& r : p.rows) {
      double lhs = r.body.evaluate(at);
      if ((r.sense == Sense::kLessEqual && lhs > r.rhs + 1e-9) ||
          (r.sense == Sense::kGreaterEqual && lhs < r.rhs - 1e-9) ||
          (r.sense == Sense::kEqual && std::abs(lhs - r.rhs) > 1e-9)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    double v = p.objective.evaluate(at);
    if (!best || v < *best) best = v;
  }
  return best;
}

/// Random bounded LP: n <= 6 columns with finite boxes, m <= 8 rows, small
/// integer data.
inline StandardFormProblem random_lp(std::mt19937& rng, int max_vars = 6, int max_rows = 8) {
  std::uniform_int_distribution<int> nv(1, max_vars), nr(1, max_rows), coef(-5, 5), rhs(-10, 12),
      lo(-5, 0), hi(1, 6), sense(0, 5);
  StandardFormProblem p;
  NodeId node = NodeId::generate();
  int n = nv(rng), m = nr(rng);
  for (int j = 0; j < n; ++j) {
    VariableId v{node, static_cast<std::uint32_t>(j)};
    p.add_variable(v, "x" + std::to_string(j), {static_cast<double>(lo(rng)), static_cast<double>(hi(rng))});
    p.objective.add_term(v, coef(rng));
  }
  for (int i = 0; i < m; ++i) {
    AffineExpr body;
    for (int j = 0; j < n; ++j) body.add_term({node, static_cast<std::uint32_t>(j)}, coef(rng));
    int s = sense(rng);
    Sense sn = s < 3 ? Sense::kLessEqual : (s < 5 ? Sense::kGreaterEqual : Sense::kEqual);
    p.add_row(Constraint{body, sn, static_cast<double>(rhs(rng))});
  }
  return p;
}

inline StandardFormProblem random_binary_ip(std::mt19937& rng, int max_vars = 12) {
  std::uniform_int_distribution<int> nv(1, max_vars), nr(1, 5), coef(-6, 6), weight(0, 9);
  StandardFormProblem p;
  NodeId node = NodeId::generate();
  int n = nv(rng), m = nr(rng);
  for (int j = 0; j < n; ++j) {
    VariableId v{node, static_cast<std::uint32_t>(j)};
    p.add_variable(v, "b" + std::to_string(j), {0, 1, Integrality::kInteger});
    p.objective.add_term(v, coef(rng));
  }
  for (int i = 0; i < m; ++i) {
    AffineExpr body;
    int sum = 0;
    for (int j = 0; j < n; ++j) {
      int w = weight(rng);
      sum += w;
      body.add_term({node, static_cast<std::uint32_t>(j)}, w);
    }
    std::uniform_int_distribution<int> cap(0, std::max(1, sum / 2));
    p.add_row(Constraint{body, i % 4 == 3 ? Sense::kGreaterEqual : Sense::kLessEqual,
                         static_cast<double>(i % 4 == 3 ? cap(rng) / 2 : cap(rng))});
  }
  return p;
}

}  // namespace optigraph::oracle
