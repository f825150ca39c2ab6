#include "infosell/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace infosell {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Standard-form tableau: rows = constraints, columns = structural variables +
// slacks + artificials, plus an RHS column and an objective row.
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double& obj(int c) { return at(rows_, c); }
  double& obj_rhs() { return at(rows_, cols_); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void pivot(int prow, int pcol) {
    const double p = at(prow, pcol);
    const double inv = 1.0 / p;
    for (int c = 0; c <= cols_; ++c) at(prow, c) *= inv;
    at(prow, pcol) = 1.0;
    for (int r = 0; r <= rows_; ++r) {
      if (r == prow) continue;
      const double factor = at(r, pcol);
      if (factor == 0.0) continue;
      double* row = &a_[static_cast<std::size_t>(r) * (cols_ + 1)];
      const double* prow_data = &a_[static_cast<std::size_t>(prow) * (cols_ + 1)];
      for (int c = 0; c <= cols_; ++c) row[c] -= factor * prow_data[c];
      at(r, pcol) = 0.0;
    }
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> a_;
};

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

// Minimizes the objective row (which stores reduced costs of a maximization as
// negated coefficients, i.e. we pivot while some obj(c) < -kCostTol).
PhaseResult run_simplex(Tableau& t, std::vector<int>& basis, int active_cols) {
  const long long hard_limit =
      2000LL + 40LL * (static_cast<long long>(t.rows()) + active_cols);
  long long iterations = 0;
  long long stall = 0;
  double last_obj = t.obj_rhs();
  bool bland = false;

  while (true) {
    if (++iterations > hard_limit) return PhaseResult::kIterationLimit;

    int pcol = -1;
    if (!bland) {
      double best = -kCostTol;
      for (int c = 0; c < active_cols; ++c) {
        if (t.obj(c) < best) {
          best = t.obj(c);
          pcol = c;
        }
      }
    } else {
      for (int c = 0; c < active_cols; ++c) {
        if (t.obj(c) < -kCostTol) {
          pcol = c;
          break;
        }
      }
    }
    if (pcol < 0) return PhaseResult::kOptimal;

    int prow = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t.rows(); ++r) {
      const double coef = t.at(r, pcol);
      if (coef <= kPivotTol) continue;
      const double ratio = t.rhs(r) / coef;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && (prow < 0 || basis[r] < basis[prow]))) {
        best_ratio = ratio;
        prow = r;
      }
    }
    if (prow < 0) return PhaseResult::kUnbounded;

    t.pivot(prow, pcol);
    basis[prow] = pcol;

    // Anti-cycling: switch to Bland's rule permanently after a long stall.
    if (t.obj_rhs() > last_obj + 1e-12) {
      last_obj = t.obj_rhs();
      stall = 0;
    } else if (++stall > 200 + 2LL * t.rows()) {
      bland = true;
    }
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  const int n = lp.num_vars;
  const int n_eq = static_cast<int>(lp.eq_rows.size());
  const int n_le = static_cast<int>(lp.le_rows.size());
  const int rows = n_eq + n_le;

  // Column layout: [structural | slacks for <= rows | artificials].
  const int slack0 = n;
  const int art0 = n + n_le;
  const int cols = n + n_le + rows;

  Tableau t(rows, cols);
  std::vector<int> basis(rows, -1);

  int r = 0;
  auto load_row = [&](const std::vector<double>& coeffs, double rhs, bool is_le) {
    if (static_cast<int>(coeffs.size()) != n) throw Error("LP row has wrong dimension");
    double sign = rhs < 0.0 ? -1.0 : 1.0;
    for (int c = 0; c < n; ++c) t.at(r, c) = sign * coeffs[c];
    if (is_le) t.at(r, slack0 + (r - n_eq)) = sign;
    t.rhs(r) = sign * rhs;
    for (double c : coeffs)
      if (!std::isfinite(c)) throw Error("LP row has non-finite coefficient");
    ++r;
  };
  for (int i = 0; i < n_eq; ++i) load_row(lp.eq_rows[i], lp.eq_rhs[i], false);
  for (int i = 0; i < n_le; ++i) load_row(lp.le_rows[i], lp.le_rhs[i], true);

  // A slack column with coefficient +1 can serve as the initial basis for its
  // row; everything else gets an artificial variable.
  int used_arts = 0;
  for (int i = 0; i < rows; ++i) {
    if (i >= n_eq && t.at(i, slack0 + (i - n_eq)) > 0.5) {
      basis[i] = slack0 + (i - n_eq);
    } else {
      const int art = art0 + used_arts++;
      t.at(i, art) = 1.0;
      basis[i] = art;
    }
  }
  const int active_cols_phase1 = art0 + used_arts;

  LpSolution sol;

  // Phase 1: minimize the sum of artificials.
  if (used_arts > 0) {
    for (int c = 0; c <= cols; ++c) t.obj(c) = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (basis[i] >= art0) {
        for (int c = 0; c <= t.cols(); ++c) t.obj(c) -= t.at(i, c);
      }
    }
    for (int i = 0; i < used_arts; ++i) t.obj(art0 + i) = 0.0;

    const PhaseResult res = run_simplex(t, basis, active_cols_phase1);
    if (res == PhaseResult::kIterationLimit) throw NumericalFailure("simplex phase 1 stalled");
    if (-t.obj_rhs() > tol::kLpFeas) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive artificials out of the basis where possible; rows that stay on an
    // artificial at level zero are redundant constraints.
    for (int i = 0; i < rows; ++i) {
      if (basis[i] < art0) continue;
      int enter = -1;
      for (int c = 0; c < art0; ++c) {
        if (std::abs(t.at(i, c)) > 1e-7) {
          enter = c;
          break;
        }
      }
      if (enter >= 0) {
        t.pivot(i, enter);
        basis[i] = enter;
      }
    }
  }

  // Phase 2: maximize the real objective (stored negated: we minimize -c x).
  for (int c = 0; c <= cols; ++c) t.obj(c) = 0.0;
  for (int c = 0; c < n; ++c) t.obj(c) = -lp.objective[c];
  for (int i = 0; i < rows; ++i) {
    const double coef = t.obj(basis[i]);
    if (coef == 0.0) continue;
    for (int c = 0; c <= cols; ++c) t.obj(c) -= coef * t.at(i, c);
  }
  // Artificial columns are frozen out of phase 2.
  const PhaseResult res = run_simplex(t, basis, art0);
  if (res == PhaseResult::kIterationLimit) throw NumericalFailure("simplex phase 2 stalled");
  if (res == PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t.rhs(i);
  }
  for (double& v : sol.x) {
    if (v < 0.0 && v > -1e-9) v = 0.0;
  }
  sol.objective = 0.0;
  for (int c = 0; c < n; ++c) sol.objective += lp.objective[c] * sol.x[c];
  return sol;
}

}  // namespace infosell
