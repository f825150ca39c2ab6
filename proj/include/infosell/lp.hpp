#pragma once

#include <string>
#include <vector>

#include "infosell/common.hpp"

namespace infosell {

// Maximization LP over nonnegative variables with dense equality and <=
// rows. >= rows are stored negated. Small and medium problems only; the
// largest instances in this artifact are consistency LPs with a handful of
// rows and up to a few million columns.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::string> var_names;

  int add_var(std::string name, double obj_coeff = 0.0) {
    var_names.push_back(std::move(name));
    objective.push_back(obj_coeff);
    return num_vars++;
  }

  void add_eq(std::vector<double> row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }

  void add_le(std::vector<double> row, double rhs) {
    le_rows.push_back(std::move(row));
    le_rhs.push_back(rhs);
  }

  void add_ge(std::vector<double> row, double rhs) {
    for (double& c : row) c = -c;
    add_le(std::move(row), -rhs);
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Two-phase primal simplex. Entering column by steepest reduced cost with
// lowest-index tie-break; falls back to Bland's rule after a stall so the
// pivot sequence is deterministic and terminating. Throws NumericalFailure
// when no status can be certified within the iteration budget.
LpSolution solve(const LinearProgram& lp);

}  // namespace infosell
