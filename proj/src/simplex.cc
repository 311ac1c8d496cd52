// Copyright 2026 The rrbins Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rrbins/simplex.h"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace rrbins {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kFeasibilityTol = 1e-9;

// Row-major tableau. The last column holds the right-hand side; row `m_`
// holds reduced costs with the negated objective value in its last entry.
class Tableau {
 public:
  Tableau(size_t rows, size_t cols)
      : m_(rows), n_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(size_t r, size_t c) { return a_[r * (n_ + 1) + c]; }
  double& rhs(size_t r) { return at(r, n_); }
  double& cost(size_t c) { return at(m_, c); }
  size_t rows() const { return m_; }
  size_t cols() const { return n_; }
  std::vector<size_t>& basis() { return basis_; }

  void Pivot(size_t row, size_t col) {
    const double inv = 1.0 / at(row, col);
    for (size_t c = 0; c <= n_; ++c) at(row, c) *= inv;
    at(row, col) = 1.0;
    for (size_t r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(row, c);
      at(r, col) = 0.0;
    }
    basis_[row] = col;
  }

  // Loads `c` (length <= n_) as the objective and prices out the basis.
  void SetObjective(const std::vector<double>& c) {
    for (size_t j = 0; j <= n_; ++j) cost(j) = j < c.size() ? c[j] : 0.0;
    for (size_t r = 0; r < m_; ++r) {
      const double f = cost(basis_[r]);
      if (f == 0.0) continue;
      for (size_t j = 0; j <= n_; ++j) cost(j) -= f * at(r, j);
    }
  }

  // Bland's rule over columns [0, allowed). Returns kOptimal, kUnbounded or
  // kIterationLimit.
  LpStatus Run(size_t allowed, size_t max_iterations, size_t& iterations) {
    for (;;) {
      std::optional<size_t> enter;
      for (size_t j = 0; j < allowed; ++j) {
        if (cost(j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (!enter.has_value()) return LpStatus::kOptimal;
      if (iterations >= max_iterations) return LpStatus::kIterationLimit;

      std::optional<size_t> leave;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (size_t r = 0; r < m_; ++r) {
        const double coef = at(r, *enter);
        if (coef <= kPivotTol) continue;
        const double ratio = rhs(r) / coef;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave.has_value() &&
             basis_[r] < basis_[*leave])) {
          if (ratio < best_ratio) best_ratio = ratio;
          leave = r;
        }
      }
      if (!leave.has_value()) return LpStatus::kUnbounded;
      Pivot(*leave, *enter);
      ++iterations;
    }
  }

 private:
  size_t m_;
  size_t n_;
  std::vector<double> a_;
  std::vector<size_t> basis_;
};

}  // namespace

const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

LpResult SolveDenseSimplex(const LinearProgram& lp, size_t max_iterations) {
  const size_t n = lp.num_vars;
  const size_t num_eq = lp.equalities.size();
  const size_t num_ub = lp.upper_bounds.size();
  const size_t m = num_eq + num_ub;

  // Columns: original variables, one slack per inequality, then one
  // artificial per row that lacks an obvious starting basic variable.
  std::vector<bool> needs_artificial(m, false);
  size_t num_art = 0;
  for (size_t r = 0; r < m; ++r) {
    const bool is_eq = r < num_eq;
    const double b =
        is_eq ? lp.equalities[r].rhs : lp.upper_bounds[r - num_eq].rhs;
    needs_artificial[r] = is_eq || b < 0.0;
    if (needs_artificial[r]) ++num_art;
  }
  const size_t slack0 = n;
  const size_t art0 = n + num_ub;
  Tableau t(m, art0 + num_art);

  size_t next_art = art0;
  for (size_t r = 0; r < m; ++r) {
    const bool is_eq = r < num_eq;
    const LinearProgram::Row& row =
        is_eq ? lp.equalities[r] : lp.upper_bounds[r - num_eq];
    const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    for (size_t j = 0; j < row.coeffs.size() && j < n; ++j) {
      t.at(r, j) = sign * row.coeffs[j];
    }
    t.rhs(r) = sign * row.rhs;
    if (!is_eq) t.at(r, slack0 + (r - num_eq)) = sign;
    if (needs_artificial[r]) {
      t.at(r, next_art) = 1.0;
      t.basis()[r] = next_art++;
    } else {
      t.basis()[r] = slack0 + (r - num_eq);
    }
  }

  LpResult result;
  // Phase 1: minimize the sum of artificials.
  if (num_art > 0) {
    std::vector<double> phase1(art0 + num_art, 0.0);
    for (size_t j = art0; j < art0 + num_art; ++j) phase1[j] = 1.0;
    t.SetObjective(phase1);
    result.status = t.Run(art0 + num_art, max_iterations, result.iterations);
    if (result.status == LpStatus::kIterationLimit) return result;
    if (-t.cost(t.cols()) > kFeasibilityTol) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art0) continue;
      for (size_t j = 0; j < art0; ++j) {
        if (std::abs(t.at(r, j)) > 1e-9) {
          t.Pivot(r, j);
          break;
        }
      }
    }
    // Artificial columns are never re-entered: clear them.
    for (size_t r = 0; r <= m; ++r) {
      for (size_t j = art0; j < art0 + num_art; ++j) t.at(r, j) = 0.0;
    }
  }

  // Phase 2 over the original and slack columns.
  t.SetObjective(lp.objective);
  result.status = t.Run(art0, max_iterations, result.iterations);
  if (result.status != LpStatus::kOptimal) return result;

  result.x.assign(n, 0.0);
  for (size_t r = 0; r < m; ++r) {
    const size_t j = t.basis()[r];
    if (j < n) result.x[j] = t.rhs(r);
  }
  result.objective = 0.0;
  for (size_t j = 0; j < n && j < lp.objective.size(); ++j) {
    result.objective += lp.objective[j] * result.x[j];
  }
  return result;
}

}  // namespace rrbins
