// Copyright 2026 The ismd Authors
//
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

// Dense two-phase primal simplex on a full tableau with Bland's rule.
// Sized for L-shaped masters and small test problems.

#ifndef ISMD_LP_HPP_
#define ISMD_LP_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ismd/error.hpp"
#include "ismd/numkit.hpp"

namespace ismd {

// min c^T x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
// Empty lower/upper mean 0 and +inf; bounds may be infinite.
struct LpProblem {
  Vector cost;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_ub;
  Vector b_ub;
  Vector lower;
  Vector upper;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double value = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

namespace internal {

class Tableau {
 public:
  Tableau(Matrix rows, std::vector<int> basis)
      : t_(std::move(rows)), basis_(std::move(basis)) {}

  Matrix& t() { return t_; }
  std::vector<int>& basis() { return basis_; }
  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int rhs_col() const { return static_cast<int>(t_.cols()) - 1; }

  void Pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int r = 0; r < t_.rows(); ++r) {
      if (r != row && t_(r, col) != 0.0) {
        t_.row(r) -= t_(r, col) * t_.row(row);
      }
    }
    basis_[row] = col;
  }

  // Minimizes the objective row (last row holds reduced costs, its rhs the
  // negated objective) over columns < allowed_cols. Returns false when
  // unbounded.
  bool Optimize(int allowed_cols, int& iterations, int max_iterations) {
    constexpr double kTol = 1e-10;
    const int obj = rows();
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t_(obj, j) < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < obj; ++r) {
        const double a = t_(r, enter);
        if (a > kTol) {
          const double ratio = t_(r, rhs_col()) / a;
          if (ratio < best_ratio - kTol ||
              (ratio <= best_ratio + kTol && leave >= 0 &&
               basis_[r] < basis_[leave])) {
            if (ratio < best_ratio) best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
      if (++iterations > max_iterations) {
        throw NumericalFailure("DenseLpSolve: iteration limit reached (stalled "
                               "pivoting, check conditioning)");
      }
    }
  }

 private:
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace internal

inline LpResult DenseLpSolve(const LpProblem& lp) {
  const int n = static_cast<int>(lp.cost.size());
  internal::Require(n >= 1, "DenseLpSolve: no variables");
  const int m_eq = static_cast<int>(lp.a_eq.rows());
  const int m_ub = static_cast<int>(lp.a_ub.rows());
  internal::Require(m_eq == 0 || (lp.a_eq.cols() == n && lp.b_eq.size() == m_eq),
                    "DenseLpSolve: equality block shape mismatch");
  internal::Require(m_ub == 0 || (lp.a_ub.cols() == n && lp.b_ub.size() == m_ub),
                    "DenseLpSolve: inequality block shape mismatch");
  const Vector lower = lp.lower.size() == 0 ? Vector::Zero(n) : lp.lower;
  const Vector upper =
      lp.upper.size() == 0
          ? Vector::Constant(n, std::numeric_limits<double>::infinity())
          : lp.upper;
  internal::Require(lower.size() == n && upper.size() == n,
                    "DenseLpSolve: bounds shape mismatch");
  internal::Require(lp.cost.allFinite(), "DenseLpSolve: non-finite cost");

  // x_j = offset_j + sign_j * u_j (- u_neg_j when free), all u >= 0.
  struct Column { int var; double sign; };
  std::vector<Column> columns;
  Vector offset = Vector::Zero(n);
  std::vector<std::pair<int, double>> upper_rows;  // (column, u bound)
  for (int j = 0; j < n; ++j) {
    const bool has_lo = std::isfinite(lower(j));
    const bool has_up = std::isfinite(upper(j));
    internal::Require(!(has_lo && has_up) || lower(j) <= upper(j),
                      "DenseLpSolve: lower bound exceeds upper bound");
    if (has_lo) {
      offset(j) = lower(j);
      columns.push_back({j, 1.0});
      if (has_up) upper_rows.emplace_back(static_cast<int>(columns.size()) - 1,
                                          upper(j) - lower(j));
    } else if (has_up) {
      offset(j) = upper(j);
      columns.push_back({j, -1.0});
    } else {
      columns.push_back({j, 1.0});
      columns.push_back({j, -1.0});
    }
  }
  const int nu = static_cast<int>(columns.size());
  const int m_bound = static_cast<int>(upper_rows.size());
  const int m = m_eq + m_ub + m_bound;
  const int n_slack = m_ub + m_bound;
  // Columns: u (nu), slacks (n_slack), artificials (m), rhs.
  const int total = nu + n_slack + m;
  Matrix t = Matrix::Zero(m + 1, total + 1);
  auto fill_row = [&](int r, const Eigen::RowVectorXd& a, double b) {
    for (int k = 0; k < nu; ++k) t(r, k) = a(columns[k].var) * columns[k].sign;
    t(r, total) = b - a.dot(offset);
  };
  for (int i = 0; i < m_eq; ++i) fill_row(i, lp.a_eq.row(i), lp.b_eq(i));
  for (int i = 0; i < m_ub; ++i) {
    fill_row(m_eq + i, lp.a_ub.row(i), lp.b_ub(i));
    t(m_eq + i, nu + i) = 1.0;
  }
  for (int i = 0; i < m_bound; ++i) {
    const int r = m_eq + m_ub + i;
    t(r, upper_rows[i].first) = 1.0;
    t(r, total) = upper_rows[i].second;
    t(r, nu + m_ub + i) = 1.0;
  }
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    if (t(r, total) < 0.0) t.row(r) *= -1.0;
    t(r, nu + n_slack + r) = 1.0;
    basis[r] = nu + n_slack + r;
  }
  internal::Require(t.allFinite(), "DenseLpSolve: non-finite constraint data");

  // Phase 1: minimize the sum of artificials.
  for (int r = 0; r < m; ++r) t.row(m) -= t.row(r);
  for (int r = 0; r < m; ++r) t(m, nu + n_slack + r) = 0.0;
  internal::Tableau tab(std::move(t), std::move(basis));
  LpResult result;
  const int max_iterations = 50 * (total + m + 10);
  tab.Optimize(total, result.iterations, max_iterations);
  double scale = 1.0;
  for (int r = 0; r < m; ++r) scale = std::max(scale, std::abs(tab.t()(r, total)));
  if (-tab.t()(m, total) > 1e-9 * scale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  // Drive zero-level artificials out of the basis; rows where that is
  // impossible are redundant and get zeroed.
  const int first_art = nu + n_slack;
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < first_art) continue;
    int col = -1;
    for (int j = 0; j < first_art; ++j) {
      if (std::abs(tab.t()(r, j)) > 1e-9) { col = j; break; }
    }
    if (col >= 0) {
      tab.Pivot(r, col);
    } else {
      tab.t().row(r).setZero();
    }
  }

  // Phase 2 objective row: reduced costs of the original cost.
  Matrix& tt = tab.t();
  tt.row(m).setZero();
  for (int k = 0; k < nu; ++k) tt(m, k) = lp.cost(columns[k].var) * columns[k].sign;
  for (int r = 0; r < m; ++r) {
    const int b = tab.basis()[r];
    if (b < first_art && tt(m, b) != 0.0) tt.row(m) -= tt(m, b) * tt.row(r);
  }
  if (!tab.Optimize(first_art, result.iterations, max_iterations)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  Vector u = Vector::Zero(total);
  for (int r = 0; r < m; ++r) u(tab.basis()[r]) = tt(r, total);
  result.x = offset;
  for (int k = 0; k < nu; ++k) result.x(columns[k].var) += columns[k].sign * u(k);
  result.value = lp.cost.dot(result.x);
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace ismd

#endif  // ISMD_LP_HPP_
