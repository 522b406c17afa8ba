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

#include "optigraph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "optigraph/simplex.hpp"

namespace optigraph {

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(feas_tol > 0) || !(pivot_tol > 0) || !(mip_gap > 0) || !(integrality_tol > 0))
    throw ModelError("solver tolerances must be positive");
}

double SolveResult::value(const VariableId& v) const {
  auto it = primal.find(v);
  if (it == primal.end()) throw ModelError("no primal value for variable " + v.node.str());
  return it->second;
}

namespace {

using Lp = simplex::DenseLp<double>;

struct Compiled {
  Lp lp;
  std::unordered_map<VariableId, Eigen::Index> column;
  double objective_constant = 0.0;
  // Original column j = col_scale(j) * kernel column j; original row i =
  // kernel row i / row_scale(i).
  Eigen::VectorXd row_scale, col_scale;

  double unscale_x(Eigen::Index j, double x) const { return x * col_scale(j); }
};

double power_of_two_near(double v) { return std::exp2(std::round(std::log2(v))); }

// Geometric-mean equilibration with power-of-two factors. Integer columns
// keep scale 1 so branching sees the original values.
void equilibrate(Compiled& c, const std::vector<bool>& integer) {
  Lp& lp = c.lp;
  const auto m = lp.A.rows(), n = lp.A.cols();
  c.row_scale = Eigen::VectorXd::Ones(m);
  c.col_scale = Eigen::VectorXd::Ones(n);
  for (int pass = 0; pass < 4; ++pass) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double lo = kInf, hi = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        double a = std::abs(lp.A(i, j) * c.row_scale(i) * c.col_scale(j));
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      if (hi > 0.0) c.row_scale(i) *= power_of_two_near(1.0 / std::sqrt(lo * hi));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (integer[static_cast<std::size_t>(j)]) continue;
      double lo = kInf, hi = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        double a = std::abs(lp.A(i, j) * c.row_scale(i) * c.col_scale(j));
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      if (hi > 0.0) c.col_scale(j) *= power_of_two_near(1.0 / std::sqrt(lo * hi));
    }
  }
  lp.A = c.row_scale.asDiagonal() * lp.A * c.col_scale.asDiagonal();
  lp.b = c.row_scale.cwiseProduct(lp.b);
  lp.c = c.col_scale.cwiseProduct(lp.c);
  lp.lower = lp.lower.cwiseQuotient(c.col_scale);
  lp.upper = lp.upper.cwiseQuotient(c.col_scale);
}

Compiled compile(const StandardFormProblem& p) {
  Compiled out;
  const auto n = static_cast<Eigen::Index>(p.variable_order.size());
  const auto m = static_cast<Eigen::Index>(p.rows.size());
  out.column.reserve(p.variable_order.size());
  for (Eigen::Index j = 0; j < n; ++j) out.column.emplace(p.variable_order[j], j);
  auto col = [&](const VariableId& v) {
    auto it = out.column.find(v);
    if (it == out.column.end())
      throw ModelError("row or objective references variable " + v.node.str() + "#" +
                       std::to_string(v.index) + " that is not a column");
    return it->second;
  };
  Lp& lp = out.lp;
  lp.A = Eigen::MatrixXd::Zero(m, n);
  lp.b.resize(m);
  lp.c = Eigen::VectorXd::Zero(n);
  lp.lower.resize(n);
  lp.upper.resize(n);
  lp.sense.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& b = p.bounds.at(p.variable_order[j]);
    if (b.lower > b.upper) throw ModelError("inconsistent bounds on '" + p.name_of(p.variable_order[j]) + "'");
    lp.lower(j) = b.lower;
    lp.upper(j) = b.upper;
  }
  for (const auto& [v, c] : p.objective.terms()) {
    if (!std::isfinite(c)) throw ModelError("non-finite objective coefficient");
    lp.c(col(v)) += c;
  }
  out.objective_constant = p.objective.constant();
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = p.rows[static_cast<std::size_t>(i)];
    for (const auto& [v, c] : row.body.terms()) {
      if (!std::isfinite(c)) throw ModelError("non-finite row coefficient");
      lp.A(i, col(v)) += c;
    }
    lp.b(i) = row.rhs - row.body.constant();
    switch (row.sense) {
      case Sense::kLessEqual:
        lp.sense[i] = simplex::RowSense::kLessEqual;
        break;
      case Sense::kEqual:
        lp.sense[i] = simplex::RowSense::kEqual;
        break;
      case Sense::kGreaterEqual:
        lp.sense[i] = simplex::RowSense::kGreaterEqual;
        break;
    }
  }
  std::vector<bool> integer(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) integer[j] = p.bounds.at(p.variable_order[j]).is_integer();
  equilibrate(out, integer);
  return out;
}

simplex::Options kernel_options(const SolverConfig& cfg) {
  simplex::Options o;
  o.feas_tol = cfg.feas_tol;
  o.pivot_tol = cfg.pivot_tol;
  o.max_iterations = cfg.max_iterations;
  return o;
}

SolveStatus map_outcome(simplex::Outcome o) {
  switch (o) {
    case simplex::Outcome::kOptimal:
      return SolveStatus::kOptimal;
    case simplex::Outcome::kInfeasible:
      return SolveStatus::kInfeasible;
    case simplex::Outcome::kUnbounded:
      return SolveStatus::kUnbounded;
    default:
      return SolveStatus::kIterationLimit;
  }
}

void fill_result(const StandardFormProblem& p, const Compiled& c,
                 const simplex::Solution<double>& s, bool with_duals, SolveResult& r) {
  r.status = map_outcome(s.outcome);
  r.iterations += s.iterations;
  r.diagnostics = s.diagnostics;
  if (r.status != SolveStatus::kOptimal) return;
  r.objective = s.objective + c.objective_constant;
  r.bound = r.objective;
  r.primal.clear();
  for (std::size_t j = 0; j < p.variable_order.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    r.primal.emplace(p.variable_order[j], c.unscale_x(k, s.x(k)));
  }
  if (with_duals) {
    r.duals.resize(static_cast<std::size_t>(s.y.size()));
    for (Eigen::Index i = 0; i < s.y.size(); ++i) r.duals[static_cast<std::size_t>(i)] = s.y(i) * c.row_scale(i);
    r.reduced_costs.clear();
    for (std::size_t j = 0; j < p.variable_order.size(); ++j) {
      const auto k = static_cast<Eigen::Index>(j);
      r.reduced_costs.emplace(p.variable_order[j], s.reduced(k) / c.col_scale(k));
    }
  }
}

}  // namespace

SolveResult solve_lp(const StandardFormProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  Compiled c = compile(p);
  // Integrality is ignored here: this is also the relaxation solver.
  auto s = simplex::solve(c.lp, kernel_options(cfg));
  SolveResult r;
  fill_result(p, c, s, true, r);
  return r;
}

namespace {

struct BranchNode {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double bound = -kInf;  // parent relaxation value
  std::shared_ptr<const simplex::Basis> warm;
};

}  // namespace

namespace {

// Kernel-space copy of `start` if it satisfies every bound, row and
// integrality requirement of `p`.
std::optional<Eigen::VectorXd> feasible_start(const StandardFormProblem& p, const Compiled& c,
                                              const SolverConfig& cfg,
                                              const std::map<VariableId, double>& start) {
  std::map<VariableId, double> x;
  for (const auto& v : p.variable_order) {
    auto it = start.find(v);
    if (it == start.end() || !std::isfinite(it->second)) return std::nullopt;
    const auto& b = p.bounds.at(v);
    double value = b.is_integer() ? std::round(it->second) : it->second;
    if (b.is_integer() && std::abs(value - it->second) > cfg.integrality_tol) return std::nullopt;
    if (value < b.lower - cfg.feas_tol || value > b.upper + cfg.feas_tol) return std::nullopt;
    x[v] = value;
  }
  auto at = [&](const VariableId& v) { return x.at(v); };
  for (const auto& r : p.rows) {
    const double lhs = r.body.evaluate(at), tol = cfg.feas_tol * (1 + std::abs(r.rhs));
    if ((r.sense != Sense::kGreaterEqual && lhs > r.rhs + tol) ||
        (r.sense != Sense::kLessEqual && lhs < r.rhs - tol))
      return std::nullopt;
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(p.variable_order.size()));
  for (std::size_t j = 0; j < p.variable_order.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    out(k) = x.at(p.variable_order[j]) / c.col_scale(k);
  }
  return out;
}

}  // namespace

SolveResult solve_mip(const StandardFormProblem& p, const SolverConfig& cfg,
                      const std::map<VariableId, double>* start) {
  cfg.validate();
  Compiled c = compile(p);
  std::vector<Eigen::Index> integers;
  for (std::size_t j = 0; j < p.variable_order.size(); ++j) {
    const auto& b = p.bounds.at(p.variable_order[j]);
    if (!b.is_integer()) continue;
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper))
      throw ModelError("integer variable '" + p.name_of(p.variable_order[j]) +
                       "' needs finite bounds");
    integers.push_back(static_cast<Eigen::Index>(j));
  }
  if (integers.empty()) return solve_lp(p, cfg);

  SolveResult result;
  BranchNode root{c.lp.lower, c.lp.upper, -kInf, nullptr};
  for (auto j : integers) {
    root.lower(j) = std::ceil(root.lower(j) - cfg.integrality_tol);
    root.upper(j) = std::floor(root.upper(j) + cfg.integrality_tol);
    if (root.lower(j) > root.upper(j)) {
      result.status = SolveStatus::kInfeasible;
      return result;
    }
  }

  const auto options = kernel_options(cfg);
  std::vector<BranchNode> open;
  open.push_back(std::move(root));
  bool have_incumbent = false;
  double incumbent = kInf;
  Eigen::VectorXd best_x;
  if (start) {
    if (auto x = feasible_start(p, c, cfg, *start)) {
      have_incumbent = true;
      best_x = *x;
      incumbent = c.lp.c.dot(best_x) + c.objective_constant;
    }
  }
  double pruned_bound = kInf;  // min relaxation value among nodes cut off by bound
  bool unbounded = false;
  bool first = true;
  std::size_t processed = 0;
  Lp lp = c.lp;

  auto cutoff = [&] {
    return have_incumbent ? incumbent - cfg.mip_gap * std::max(1.0, std::abs(incumbent)) : kInf;
  };

  while (!open.empty()) {
    if (processed >= cfg.max_nodes) break;
    if (cfg.best_bound_restart && processed > 0 && processed % cfg.best_bound_restart == 0) {
      auto best = std::min_element(open.begin(), open.end(),
                                   [](const BranchNode& a, const BranchNode& b) { return a.bound < b.bound; });
      std::iter_swap(best, open.end() - 1);
    }
    BranchNode node = std::move(open.back());
    open.pop_back();
    ++processed;
    if (node.bound + c.objective_constant >= cutoff()) {
      pruned_bound = std::min(pruned_bound, node.bound + c.objective_constant);
      continue;
    }
    lp.lower = node.lower;
    lp.upper = node.upper;
    auto s = simplex::solve(lp, options, node.warm.get());
    result.iterations += s.iterations;
    if (first) {
      first = false;
      if (cfg.root_duals && s.outcome == simplex::Outcome::kOptimal) {
        SolveResult root_result;
        fill_result(p, c, s, true, root_result);
        result.duals = root_result.duals;
        result.reduced_costs = root_result.reduced_costs;
      }
    }
    if (s.outcome == simplex::Outcome::kInfeasible) continue;
    if (s.outcome == simplex::Outcome::kUnbounded) {
      unbounded = true;
      break;
    }
    if (s.outcome != simplex::Outcome::kOptimal) {
      // The subtree stays unexplored; keep its parent bound so the reported
      // bound remains valid.
      result.diagnostics = "node relaxation failed: " + s.diagnostics;
      pruned_bound = std::min(pruned_bound, node.bound + c.objective_constant);
      continue;
    }
    const double value = s.objective + c.objective_constant;
    if (value >= cutoff()) {
      pruned_bound = std::min(pruned_bound, value);
      continue;
    }
    Eigen::Index branch = -1;
    double most = 0.0;
    for (auto j : integers) {
      double frac = s.x(j) - std::floor(s.x(j));
      double dist = std::min(frac, 1.0 - frac);
      if (dist > cfg.integrality_tol && dist > most) {
        most = dist;
        branch = j;
      }
    }
    if (branch < 0) {
      have_incumbent = true;
      incumbent = value;
      best_x = s.x;
      for (auto j : integers) best_x(j) = std::round(best_x(j));
      continue;
    }
    auto warm = std::make_shared<const simplex::Basis>(std::move(s.basis));
    BranchNode down{node.lower, node.upper, s.objective, warm};
    BranchNode up{node.lower, node.upper, s.objective, warm};
    down.upper(branch) = std::floor(s.x(branch));
    up.lower(branch) = std::ceil(s.x(branch));
    // Depth first, diving toward the nearer rounding.
    if (s.x(branch) - std::floor(s.x(branch)) >= 0.5) {
      open.push_back(std::move(down));
      open.push_back(std::move(up));
    } else {
      open.push_back(std::move(up));
      open.push_back(std::move(down));
    }
  }

  result.nodes = processed;
  if (unbounded) {
    result.status = SolveStatus::kUnbounded;
    return result;
  }
  if (!have_incumbent) {
    result.status = open.empty() ? SolveStatus::kInfeasible : SolveStatus::kIterationLimit;
    return result;
  }
  double open_bound = kInf;
  for (const auto& n : open) open_bound = std::min(open_bound, n.bound + c.objective_constant);
  result.status = open.empty() ? SolveStatus::kOptimal : SolveStatus::kIterationLimit;
  result.objective = c.lp.c.dot(best_x) + c.objective_constant;
  result.bound = std::min({result.objective, pruned_bound, open_bound});
  for (std::size_t j = 0; j < p.variable_order.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    result.primal.emplace(p.variable_order[j], c.unscale_x(k, best_x(k)));
  }
  return result;
}

SolveResult solve(const StandardFormProblem& p, const SolverConfig& cfg,
                  const std::map<VariableId, double>* start) {
  return p.has_integers() ? solve_mip(p, cfg, start) : solve_lp(p, cfg);
}

StandardFormProblem fix_variables(const StandardFormProblem& p,
                                  const std::map<VariableId, double>& assignments) {
  StandardFormProblem out = p;
  for (const auto& [v, value] : assignments) {
    auto it = out.bounds.find(v);
    if (it == out.bounds.end())
      throw ModelError("cannot fix unknown variable " + v.node.str() + "#" + std::to_string(v.index));
    if (!std::isfinite(value)) throw ModelError("fixing value must be finite");
    it->second.lower = value;
    it->second.upper = value;
  }
  return out;
}

LpCertificate certify(const StandardFormProblem& p, const SolveResult& r) {
  LpCertificate cert;
  auto x = [&](const VariableId& v) { return r.value(v); };
  double cx = p.objective.evaluate(x);
  double dual_side = p.objective.constant();
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& row = p.rows[i];
    double rhs = row.rhs - row.body.constant();
    double lhs = row.body.evaluate(x) - row.body.constant();
    double slack = rhs - lhs;  // >= 0 means <= row satisfied
    double viol = 0.0;
    switch (row.sense) {
      case Sense::kLessEqual:
        viol = std::max(0.0, -slack);
        break;
      case Sense::kGreaterEqual:
        viol = std::max(0.0, slack);
        break;
      case Sense::kEqual:
        viol = std::abs(slack);
        break;
    }
    cert.primal_residual = std::max(cert.primal_residual, viol);
    if (i < r.duals.size()) {
      double y = r.duals[i];
      if (row.sense == Sense::kLessEqual)
        cert.dual_sign_violation = std::max(cert.dual_sign_violation, std::max(0.0, y));
      if (row.sense == Sense::kGreaterEqual)
        cert.dual_sign_violation = std::max(cert.dual_sign_violation, std::max(0.0, -y));
      if (row.sense != Sense::kEqual)
        cert.complementarity = std::max(cert.complementarity, std::abs(y * slack));
      dual_side += rhs * y;
    }
  }
  for (const auto& v : p.variable_order) {
    const auto& b = p.bounds.at(v);
    double xv = x(v);
    cert.primal_residual =
        std::max({cert.primal_residual, std::max(0.0, b.lower - xv), std::max(0.0, xv - b.upper)});
    auto it = r.reduced_costs.find(v);
    if (it == r.reduced_costs.end()) continue;
    double d = it->second;
    dual_side += d * xv;
    if (b.lower == b.upper) continue;
    // d > 0 requires x at lower, d < 0 requires x at upper.
    if (d > 0) {
      double dist = std::isfinite(b.lower) ? xv - b.lower : kInf;
      cert.complementarity = std::max(cert.complementarity, std::isfinite(dist) ? std::abs(d * dist) : std::abs(d));
    } else if (d < 0) {
      double dist = std::isfinite(b.upper) ? b.upper - xv : kInf;
      cert.complementarity = std::max(cert.complementarity, std::isfinite(dist) ? std::abs(d * dist) : std::abs(d));
    }
  }
  cert.duality_gap = std::abs(cx - dual_side) / (1.0 + std::abs(cx));
  return cert;
}

void write_problem(std::ostream& out, const StandardFormProblem& p) {
  auto namer = [&](const VariableId& v) { return p.name_of(v); };
  out << "OBJECTIVE MIN " << format_double(p.objective.constant()) << "\n";
  for (const auto& v : p.variable_order) {
    double c = p.objective.coefficient(v);
    if (c != 0.0) out << "  " << namer(v) << " " << format_double(c) << "\n";
  }
  out << "ROWS " << p.rows.size() << "\n";
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    out << "ROW " << i << " " << sense_symbol(r.sense) << " "
        << format_double(r.rhs - r.body.constant()) << "\n";
    for (const auto& v : p.variable_order) {
      double c = r.body.coefficient(v);
      if (c != 0.0) out << "  " << namer(v) << " " << format_double(c) << "\n";
    }
  }
  out << "BOUNDS " << p.variable_order.size() << "\n";
  for (const auto& v : p.variable_order) {
    const auto& b = p.bounds.at(v);
    out << "  " << namer(v) << " " << format_double(b.lower) << " " << format_double(b.upper)
        << (b.is_integer() ? " I" : " C") << "\n";
  }
  out << "END\n";
}

}  // namespace optigraph
