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

// Dense bounded-variable primal simplex on a full tableau.
//
// Problem form:  min c'x  s.t.  A x + s = b,  l <= x <= u,  s in S(sense)
// where the slack box S is [0, inf) for <= rows, (-inf, 0] for >= rows and
// {0} for equality rows. The slack basis is always a valid starting basis;
// phase 1 minimizes the sum of basic bound violations (composite objective)
// so the method can also start from any warm basis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace optigraph::simplex {

enum class RowSense : std::uint8_t { kLessEqual, kEqual, kGreaterEqual };

enum class ColumnStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree, kFixed };

enum class Outcome { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kSingular };

template <typename Scalar>
struct DenseLp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix A;  // m x n
  Vector b;  // m
  Vector c;  // n
  Vector lower;  // n, may hold -inf
  Vector upper;  // n, may hold +inf
  std::vector<RowSense> sense;  // m

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
};

struct Options {
  double feas_tol = 1e-7;
  double pivot_tol = 1e-9;
  double dual_tol = 1e-9;
  std::size_t max_iterations = 200000;
  // Consecutive degenerate pivots tolerated before switching to Bland's rule;
  // zero selects 5 * (m + n).
  std::size_t stall_threshold = 0;
  std::size_t refresh_interval = 50;
  std::size_t max_restarts = 3;
};

/// Basis over the n structural columns followed by the m slack columns.
struct Basis {
  std::vector<Eigen::Index> head;      // basic column per row
  std::vector<ColumnStatus> status;    // per column

  bool empty() const { return head.empty(); }
};

template <typename Scalar>
struct Solution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Outcome outcome = Outcome::kIterationLimit;
  Scalar objective = 0;
  Vector x;        // structural values
  Vector y;        // row duals, y = dObj/db
  Vector reduced;  // structural reduced costs c - A'y
  std::size_t iterations = 0;
  std::size_t bland_switches = 0;
  std::size_t restarts = 0;
  Basis basis;
  std::string diagnostics;
};

template <typename Scalar>
class BoundedSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Index = Eigen::Index;

  BoundedSimplex(const DenseLp<Scalar>& lp, Options options)
      : lp_(lp), opt_(options), m_(lp.rows()), n_(lp.cols()), N_(m_ + n_) {
    col_lower_.resize(N_);
    col_upper_.resize(N_);
    col_cost_ = Vector::Zero(N_);
    for (Index j = 0; j < n_; ++j) {
      col_lower_(j) = lp.lower(j);
      col_upper_(j) = lp.upper(j);
      col_cost_(j) = lp.c(j);
    }
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < m_; ++i) {
      switch (lp.sense[static_cast<std::size_t>(i)]) {
        case RowSense::kLessEqual:
          col_lower_(n_ + i) = 0;
          col_upper_(n_ + i) = inf;
          break;
        case RowSense::kGreaterEqual:
          col_lower_(n_ + i) = -inf;
          col_upper_(n_ + i) = 0;
          break;
        case RowSense::kEqual:
          col_lower_(n_ + i) = 0;
          col_upper_(n_ + i) = 0;
          break;
      }
    }
    Scalar cmax = 0;
    for (Index j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(lp.c(j)));
    cost_scale_ = 1 + cmax;
  }

  Solution<Scalar> solve(const Basis* warm = nullptr) {
    if (!(warm && !warm->empty() && install_basis(*warm))) install_slack_basis();
    Solution<Scalar> sol = iterate();
    return sol;
  }

 private:
  Matrix full_matrix() const {
    Matrix F(m_, N_);
    F.leftCols(n_) = lp_.A;
    F.rightCols(m_).setIdentity();
    return F;
  }

  ColumnStatus resting_status(Index j) const {
    const bool lo = std::isfinite(static_cast<double>(col_lower_(j)));
    const bool up = std::isfinite(static_cast<double>(col_upper_(j)));
    if (lo && up && col_lower_(j) == col_upper_(j)) return ColumnStatus::kFixed;
    if (lo) return ColumnStatus::kAtLower;
    if (up) return ColumnStatus::kAtUpper;
    return ColumnStatus::kFree;
  }

  Scalar resting_value(Index j, ColumnStatus s) const {
    switch (s) {
      case ColumnStatus::kAtLower:
      case ColumnStatus::kFixed:
        return col_lower_(j);
      case ColumnStatus::kAtUpper:
        return col_upper_(j);
      default:
        return 0;
    }
  }

  void install_slack_basis() {
    T_ = full_matrix();
    head_.resize(static_cast<std::size_t>(m_));
    status_.assign(static_cast<std::size_t>(N_), ColumnStatus::kAtLower);
    x_ = Vector::Zero(N_);
    for (Index j = 0; j < n_; ++j) {
      status_[j] = resting_status(j);
      x_(j) = resting_value(j, status_[j]);
    }
    for (Index i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      status_[n_ + i] = ColumnStatus::kBasic;
    }
    recompute_basics();
  }

  // Returns false (leaving state unspecified) if the basis is unusable.
  bool install_basis(const Basis& warm) {
    if (static_cast<Index>(warm.head.size()) != m_ || static_cast<Index>(warm.status.size()) != N_)
      return false;
    head_ = warm.head;
    status_.assign(static_cast<std::size_t>(N_), ColumnStatus::kAtLower);
    for (auto h : head_) {
      if (h < 0 || h >= N_ || status_[h] == ColumnStatus::kBasic) return false;
      status_[h] = ColumnStatus::kBasic;
    }
    x_ = Vector::Zero(N_);
    for (Index j = 0; j < N_; ++j) {
      if (status_[j] == ColumnStatus::kBasic) continue;
      ColumnStatus s = warm.status[j];
      // Keep the warm side when that bound still exists; otherwise rest.
      if (s == ColumnStatus::kAtUpper && std::isfinite(static_cast<double>(col_upper_(j))) &&
          col_lower_(j) != col_upper_(j)) {
        status_[j] = ColumnStatus::kAtUpper;
      } else {
        status_[j] = resting_status(j);
      }
      x_(j) = resting_value(j, status_[j]);
    }
    return refactor();
  }

  // Rows whose slack is basic reduce B to the square block A[K, J] of the
  // remaining rows K and basic structural columns J:
  //   Z_J = A[K,J]^{-1} M_K,   Z_slack(r) = M_r - A[r,J] Z_J   for M = [A I].
  bool refactor() {
    if (m_ == 0) {
      T_.resize(0, N_);
      return true;
    }
    std::vector<Index> slack_pos(static_cast<std::size_t>(m_), -1), struct_pos, struct_col, rest_rows, slack_rows;
    for (Index i = 0; i < m_; ++i) {
      const Index h = head_[i];
      if (h >= n_) {
        slack_pos[h - n_] = i;
      } else {
        struct_pos.push_back(i);
        struct_col.push_back(h);
      }
    }
    for (Index r = 0; r < m_; ++r) (slack_pos[r] < 0 ? rest_rows : slack_rows).push_back(r);
    const auto k = static_cast<Index>(struct_col.size());
    if (static_cast<Index>(rest_rows.size()) != k) return false;
    auto full_row = [&](Index r) {
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(N_);
      row.head(n_) = lp_.A.row(r);
      row(n_ + r) = 1;
      return row;
    };
    Matrix T(m_, N_);
    Matrix ZJ(k, N_);
    if (k > 0) {
      Matrix AKJ(k, k), MK(k, N_);
      for (Index a = 0; a < k; ++a) {
        for (Index b = 0; b < k; ++b) AKJ(a, b) = lp_.A(rest_rows[a], struct_col[b]);
        MK.row(a) = full_row(rest_rows[a]);
      }
      Eigen::PartialPivLU<Matrix> lu(AKJ);
      if (!(static_cast<double>(lu.rcond()) > 1e-13)) return false;
      ZJ = lu.solve(MK);
      if (!ZJ.allFinite()) return false;
      for (Index b = 0; b < k; ++b) T.row(struct_pos[b]) = ZJ.row(b);
    }
    const auto s = static_cast<Index>(slack_rows.size());
    if (s > 0) {
      Matrix MS(s, N_), ASJ(s, k);
      for (Index a = 0; a < s; ++a) {
        MS.row(a) = full_row(slack_rows[a]);
        for (Index b = 0; b < k; ++b) ASJ(a, b) = lp_.A(slack_rows[a], struct_col[b]);
      }
      if (k > 0) MS.noalias() -= ASJ * ZJ;
      for (Index a = 0; a < s; ++a) T.row(slack_pos[slack_rows[a]]) = MS.row(a);
    }
    if (!T.allFinite()) return false;
    T_ = std::move(T);
    recompute_basics();
    return x_.allFinite();
  }

  // x_B = B^{-1} (b - N x_N), with one refinement step against the original
  // columns to absorb drift in the running tableau.
  void recompute_basics() {
    if (m_ == 0) return;
    Vector rhs = lp_.b;
    for (Index j = 0; j < N_; ++j) {
      if (status_[j] == ColumnStatus::kBasic || x_(j) == Scalar(0)) continue;
      if (j < n_)
        rhs -= lp_.A.col(j) * x_(j);
      else
        rhs(j - n_) -= x_(j);
    }
    auto Binv = T_.rightCols(m_);
    Vector xb = Binv * rhs;
    for (int pass = 0; pass < 2; ++pass) {
      Vector resid = rhs;
      for (Index i = 0; i < m_; ++i) {
        Index h = head_[i];
        if (h < n_)
          resid -= lp_.A.col(h) * xb(i);
        else
          resid(h - n_) -= xb(i);
      }
      xb += Binv * resid;
    }
    for (Index i = 0; i < m_; ++i) x_(head_[i]) = xb(i);
  }

  Vector row_duals(const Vector& cB) const {
    if (m_ == 0) return Vector(0);
    auto Binv = T_.rightCols(m_);
    Vector y = Binv.transpose() * cB;
    // One refinement step: residual of B'y = cB.
    Vector resid = cB;
    for (Index i = 0; i < m_; ++i) {
      Index h = head_[i];
      if (h < n_)
        resid(i) -= lp_.A.col(h).dot(y);
      else
        resid(i) -= y(h - n_);
    }
    y += Binv.transpose() * resid;
    return y;
  }

  Scalar infeasibility(Index j) const {
    const Scalar tol = static_cast<Scalar>(opt_.feas_tol);
    if (x_(j) < col_lower_(j) - tol) return col_lower_(j) - x_(j);
    if (x_(j) > col_upper_(j) + tol) return x_(j) - col_upper_(j);
    return 0;
  }

  Solution<Scalar> iterate() {
    Solution<Scalar> sol;
    const Scalar tol = static_cast<Scalar>(opt_.feas_tol);
    const Scalar ptol = static_cast<Scalar>(opt_.pivot_tol);
    const std::size_t stall_limit =
        opt_.stall_threshold ? opt_.stall_threshold : static_cast<std::size_t>(5 * (m_ + n_) + 1);
    std::size_t degenerate = 0;
    bool bland = false;
    bool fresh = true;  // tableau state just recomputed
    std::size_t unbounded_phase1_retries = 0;
    Vector cB(m_);
    for (std::size_t it = 0;; ++it) {
      if (it >= opt_.max_iterations) {
        sol.outcome = Outcome::kIterationLimit;
        sol.diagnostics = "iteration limit reached";
        break;
      }
      if (it > 0 && it % opt_.refresh_interval == 0 && !refactor()) {
        // The running basis went singular: start over from the slacks.
        if (++sol.restarts > opt_.max_restarts) {
          sol.outcome = Outcome::kSingular;
          sol.diagnostics = "basis became singular";
          break;
        }
        install_slack_basis();
      }

      bool phase1 = false;
      for (Index i = 0; i < m_; ++i) {
        Index h = head_[i];
        if (x_(h) < col_lower_(h) - tol) {
          cB(i) = -1;
          phase1 = true;
        } else if (x_(h) > col_upper_(h) + tol) {
          cB(i) = 1;
          phase1 = true;
        } else {
          cB(i) = 0;
        }
      }
      if (!phase1)
        for (Index i = 0; i < m_; ++i) cB(i) = col_cost_(head_[i]);
      const Scalar dtol =
          static_cast<Scalar>(opt_.dual_tol) * (phase1 ? Scalar(1) : cost_scale_);

      Vector r = m_ ? Vector(T_.transpose() * cB) : Vector::Zero(N_);
      Index enter = -1;
      int dir = 0;
      Scalar best = 0;
      for (Index j = 0; j < N_; ++j) {
        ColumnStatus s = status_[j];
        if (s == ColumnStatus::kBasic || s == ColumnStatus::kFixed) continue;
        Scalar d = (phase1 ? Scalar(0) : col_cost_(j)) - r(j);
        int jdir = 0;
        if ((s == ColumnStatus::kAtLower || s == ColumnStatus::kFree) && d < -dtol) jdir = 1;
        if ((s == ColumnStatus::kAtUpper || s == ColumnStatus::kFree) && d > dtol) jdir = -1;
        if (!jdir) continue;
        if (bland) {
          enter = j;
          dir = jdir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          dir = jdir;
        }
      }

      if (enter < 0) {
        if (!fresh) {
          // Confirm against a fresh factorization before stopping.
          if (!refactor()) {
            if (++sol.restarts > opt_.max_restarts) {
              sol.outcome = Outcome::kSingular;
              sol.diagnostics = "basis became singular";
              break;
            }
            install_slack_basis();
          }
          fresh = true;
          continue;
        }
        sol.outcome = phase1 ? Outcome::kInfeasible : Outcome::kOptimal;
        break;
      }

      // Ratio test.
      Scalar theta = std::numeric_limits<Scalar>::infinity();
      Index leave_row = -1;
      bool leave_at_upper = false;
      Scalar leave_pivot = 0;
      const Scalar span = col_upper_(enter) - col_lower_(enter);
      if (std::isfinite(static_cast<double>(span))) theta = span;
      const Scalar tie = Scalar(1e-12);
      // Distance each basic can travel: exact and relaxed by the feasibility
      // tolerance (Harris). Rows with a negligible pivot are skipped.
      auto row_limit = [&](Index i, Scalar slack, bool& at_upper) {
        const Scalar a = T_(i, enter);
        at_upper = false;
        if (std::abs(a) <= ptol) return std::numeric_limits<Scalar>::infinity();
        const Scalar delta = -dir * a;
        const Index h = head_[i];
        const Scalar xi = x_(h), lo = col_lower_(h), up = col_upper_(h);
        if (phase1 && xi < lo - tol) return delta > 0 ? (lo - xi + slack) / delta : std::numeric_limits<Scalar>::infinity();
        if (phase1 && xi > up + tol) {
          at_upper = true;
          return delta < 0 ? (xi - up + slack) / -delta : std::numeric_limits<Scalar>::infinity();
        }
        if (delta < 0 && std::isfinite(static_cast<double>(lo))) return std::max(Scalar(0), (xi - lo + slack) / -delta);
        if (delta > 0 && std::isfinite(static_cast<double>(up))) {
          at_upper = true;
          return std::max(Scalar(0), (up - xi + slack) / delta);
        }
        return std::numeric_limits<Scalar>::infinity();
      };
      Scalar bound = theta;
      if (!bland)
        for (Index i = 0; i < m_; ++i) {
          bool unused;
          bound = std::min(bound, row_limit(i, tol, unused));
        }
      for (Index i = 0; i < m_; ++i) {
        bool at_upper;
        const Scalar limit = row_limit(i, 0, at_upper);
        if (!std::isfinite(static_cast<double>(limit))) continue;
        const Scalar a = T_(i, enter);
        bool take = false;
        if (bland) {
          take = limit < theta - tie ||
                 (limit <= theta + tie && (leave_row < 0 || head_[i] < head_[leave_row]));
        } else if (limit <= bound) {
          take = leave_row < 0 || std::abs(a) > std::abs(leave_pivot);
        }
        if (take) {
          if (bland) theta = std::min(theta, limit);
          leave_row = i;
          leave_at_upper = at_upper;
          leave_pivot = a;
        }
      }
      if (!bland && leave_row >= 0) {
        bool unused;
        const Scalar chosen = row_limit(leave_row, 0, unused);
        // A bound flip is preferred when the entering box is the tighter limit.
        if (std::isfinite(static_cast<double>(span)) && span <= chosen) {
          leave_row = -1;
          theta = span;
        } else {
          theta = chosen;
        }
      }

      if (!std::isfinite(static_cast<double>(theta))) {
        if (!phase1) {
          sol.outcome = Outcome::kUnbounded;
          break;
        }
        // Cannot happen in exact arithmetic; rebuild and retry a few times.
        if (++unbounded_phase1_retries > 3 || !refactor()) {
          sol.outcome = Outcome::kSingular;
          sol.diagnostics = "phase 1 ray with no blocking row";
          break;
        }
        fresh = true;
        continue;
      }

      sol.iterations = it + 1;
      fresh = false;
      if (theta <= tie) {
        if (++degenerate > stall_limit && !bland) {
          bland = true;
          ++sol.bland_switches;
        }
      } else {
        degenerate = 0;
        bland = false;
      }

      // Move along the edge.
      x_(enter) += dir * theta;
      for (Index i = 0; i < m_; ++i) {
        const Scalar a = T_(i, enter);
        if (a != Scalar(0)) x_(head_[i]) -= dir * a * theta;
      }

      if (leave_row < 0) {
        // Bound flip of the entering column.
        status_[enter] = dir > 0 ? ColumnStatus::kAtUpper : ColumnStatus::kAtLower;
        x_(enter) = dir > 0 ? col_upper_(enter) : col_lower_(enter);
        continue;
      }

      const Index leaving = head_[leave_row];
      status_[leaving] = leave_at_upper ? ColumnStatus::kAtUpper : ColumnStatus::kAtLower;
      if (col_lower_(leaving) == col_upper_(leaving)) status_[leaving] = ColumnStatus::kFixed;
      x_(leaving) = leave_at_upper ? col_upper_(leaving) : col_lower_(leaving);
      head_[leave_row] = enter;
      status_[enter] = ColumnStatus::kBasic;
      pivot(leave_row, enter);
    }

    // Final state.
    if (sol.outcome == Outcome::kOptimal && !x_.allFinite()) {
      sol.outcome = Outcome::kSingular;
      sol.diagnostics = "non-finite basic solution";
    }
    sol.x = x_.head(n_);
    Vector cBf(m_);
    for (Index i = 0; i < m_; ++i) cBf(i) = col_cost_(head_[i]);
    sol.y = row_duals(cBf);
    sol.reduced = lp_.c - (m_ ? Vector(lp_.A.transpose() * sol.y) : Vector::Zero(n_));
    sol.objective = lp_.c.dot(sol.x);
    sol.basis.head = head_;
    sol.basis.status = status_;
    return sol;
  }

  void pivot(Index row, Index col) {
    const Scalar p = T_(row, col);
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> prow = T_.row(row) / p;
    Vector pcol = T_.col(col);
    pcol(row) = 0;
    T_.noalias() -= pcol * prow;
    T_.row(row) = prow;
    T_(row, col) = 1;
    for (Index i = 0; i < m_; ++i)
      if (i != row) T_(i, col) = 0;
  }

  const DenseLp<Scalar>& lp_;
  Options opt_;
  Index m_, n_, N_;
  Vector col_lower_, col_upper_, col_cost_;
  Scalar cost_scale_ = 1;
  Matrix T_;
  Vector x_;
  std::vector<Index> head_;
  std::vector<ColumnStatus> status_;
};

template <typename Scalar>
Solution<Scalar> solve(const DenseLp<Scalar>& lp, const Options& options, const Basis* warm = nullptr) {
  BoundedSimplex<Scalar> s(lp, options);
  return s.solve(warm);
}

}  // namespace optigraph::simplex
