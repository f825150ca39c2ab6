#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace infosell {

// Tolerances used across the library. All utilities live in [0,1], so
// absolute tolerances are meaningful everywhere.
namespace tol {
inline constexpr double kProb = 1e-12;       // prior / type distribution normalization
inline constexpr double kPosterior = 1e-9;   // posterior normalization & consistency
inline constexpr double kLpFeas = 1e-7;      // LP feasibility
inline constexpr double kEval = 1e-9;        // best-response / IC / IR slack
inline constexpr double kValue = 1e-6;       // utility comparisons across solvers
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A signal with zero marginal probability cannot induce a posterior.
struct ZeroMassSignal : Error {
  using Error::Error;
};

// An enumeration (vertices, q-uniform grids, signal tuples) would exceed its cap.
struct ExplosionGuard : Error {
  using Error::Error;
};

// Solver requires all budgets to be zero.
struct NotLimitedLiability : Error {
  using Error::Error;
};

// The local decomposition target lies outside the hull of its grid neighborhood.
struct InfeasibleDecomposition : Error {
  using Error::Error;
};

// l-mass on a type that recommends nothing; impossible for feasible LP solutions.
struct DegenerateSolution : Error {
  using Error::Error;
};

// The LP backend could not certify a status.
struct NumericalFailure : Error {
  using Error::Error;
};

// Malformed or version-mismatched input file.
struct SchemaError : Error {
  using Error::Error;
};

// Enumeration caps surfaced on the CLI as --vertex-cap / --quniform-cap.
struct Caps {
  std::size_t vertex = 2'000'000;     // candidate vertices in payment optimization
  std::size_t quniform = 5'000'000;   // |Xi_q| grid size
  std::size_t signals = 100'000;      // m^n generalized-direct signal tuples
};

// Dense row-major matrix. Small sizes only (d x m utility tables and the like).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Deterministic uniform generator. mt19937_64's output sequence is fixed by the
// standard; std::uniform_real_distribution is not, so we map bits ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

  // Uniform point of the probability simplex (normalized exponentials).
  std::vector<double> simplex(int dim) {
    std::vector<double> v(dim);
    double sum = 0.0;
    for (double& x : v) {
      double u = uniform();
      if (u <= 0.0) u = 0x1.0p-53;
      x = -std::log(u);
      sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

// Binomial coefficient in double precision; saturates instead of overflowing.
// Used only for cap checks and cardinality assertions.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / i;
    if (r > 1e18) return 1e18;
  }
  return r;
}

inline double round_to(double x, int decimals) {
  const double p = std::pow(10.0, decimals);
  return std::round(x * p) / p;
}

}  // namespace infosell
