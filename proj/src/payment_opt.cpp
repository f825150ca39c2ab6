#include "infosell/payment_opt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "infosell/belief.hpp"

namespace infosell {

namespace {

// Hyperplane pi(lhs) - pi(rhs_action) = rhs, or pi(lhs) = 0 when rhs_action < 0.
struct Hyperplane {
  int lhs_action;
  int rhs_action;
  double rhs;
};

// Gaussian elimination with partial pivoting on the m x m system cut out by
// the chosen hyperplanes. Near-singular systems (pivot spread above 1e10) are
// skipped; degenerate vertices are limit points of enumerated ones.
bool solve_square(std::vector<double>& a, std::vector<double>& b, int m,
                  std::vector<double>& out) {
  double max_pivot = 0.0, min_pivot = std::numeric_limits<double>::infinity();
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[r * m + col]) > std::abs(a[pivot * m + col])) pivot = r;
    if (std::abs(a[pivot * m + col]) < 1e-12) return false;
    if (pivot != col) {
      for (int c = 0; c < m; ++c) std::swap(a[col * m + c], a[pivot * m + c]);
      std::swap(b[col], b[pivot]);
    }
    const double p = std::abs(a[col * m + col]);
    max_pivot = std::max(max_pivot, p);
    min_pivot = std::min(min_pivot, p);
    for (int r = col + 1; r < m; ++r) {
      const double f = a[r * m + col] / a[col * m + col];
      if (f == 0.0) continue;
      for (int c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
      b[r] -= f * b[col];
    }
  }
  if (max_pivot / min_pivot > 1e10) return false;
  out.resize(m);
  for (int r = m - 1; r >= 0; --r) {
    double v = b[r];
    for (int c = r + 1; c < m; ++c) v -= a[r * m + c] * out[c];
    out[r] = v / a[r * m + r];
  }
  return true;
}

}  // namespace

PosteriorPayment evaluate_payments(const Instance& inst, const Posterior& xi,
                                   std::vector<double> payments) {
  PosteriorPayment pp;
  pp.payments = std::move(payments);
  pp.induced.resize(inst.n());
  pp.value = 0.0;
  for (int k = 0; k < inst.n(); ++k) {
    const int br = best_response(inst, xi, pp.payments, k, 0.0);
    pp.induced[k] = br;
    double sv = -pp.payments[br];
    for (int theta = 0; theta < inst.d(); ++theta) sv += xi[theta] * inst.us(theta, br);
    pp.value += inst.type_dist[k] * sv;
  }
  return pp;
}

PosteriorPayment optimal_payment_in_posterior(const Instance& inst, const Posterior& xi,
                                              std::size_t cap) {
  const int m = inst.m(), n = inst.n(), d = inst.d();

  // Posterior-expected utilities per action: eu (buyer, per type) and es (seller).
  std::vector<double> eu(static_cast<std::size_t>(n) * m), es(m);
  for (int a = 0; a < m; ++a) {
    double s = 0.0;
    for (int theta = 0; theta < d; ++theta) s += xi[theta] * inst.us(theta, a);
    es[a] = s;
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int theta = 0; theta < d; ++theta) v += xi[theta] * inst.ub(k, theta, a);
      eu[k * m + a] = v;
    }
  }

  // Indifference hyperplanes per type and unordered action pair, deduplicated,
  // plus the nonnegativity facets.
  std::vector<Hyperplane> planes;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const double rhs = eu[k * m + b] - eu[k * m + a];
        bool dup = false;
        for (const Hyperplane& pl : planes)
          if (pl.rhs_action == b && pl.lhs_action == a && std::abs(pl.rhs - rhs) < 1e-12) {
            dup = true;
            break;
          }
        if (!dup) planes.push_back({a, b, rhs});
      }
  for (int a = 0; a < m; ++a) planes.push_back({a, -1, 0.0});

  const int h = static_cast<int>(planes.size());
  if (binomial(h, m) > static_cast<double>(cap))
    throw ExplosionGuard("vertex enumeration would exceed cap");

  // Mirrors belief::best_response exactly (same tolerances and tie order) so
  // that re-running it on the output reproduces the induced actions.
  std::vector<int> scratch_ind(n);
  auto eval = [&](const std::vector<double>& pay, std::vector<int>& ind) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      double best_bv = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) best_bv = std::max(best_bv, eu[k * m + a] + pay[a]);
      int chosen = -1;
      double chosen_sv = 0.0;
      for (int a = 0; a < m; ++a) {
        if (eu[k * m + a] + pay[a] < best_bv - tol::kEval) continue;
        const double sv = es[a] - pay[a];
        if (chosen < 0 || sv > chosen_sv + tol::kEval) {
          chosen = a;
          chosen_sv = sv;
        }
      }
      ind[k] = chosen;
      total += inst.type_dist[k] * chosen_sv;
    }
    return total;
  };

  PosteriorPayment best;
  best.payments.assign(m, 0.0);
  best.induced.resize(n);
  best.value = eval(best.payments, best.induced);

  const double pay_cap = static_cast<double>(m);
  std::vector<double> sys_a(static_cast<std::size_t>(m) * m), sys_b(m), vertex;
  std::vector<int> subset(m);

  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == m) {
      std::fill(sys_a.begin(), sys_a.end(), 0.0);
      for (int i = 0; i < m; ++i) {
        const Hyperplane& pl = planes[subset[i]];
        sys_a[i * m + pl.lhs_action] = 1.0;
        if (pl.rhs_action >= 0) sys_a[i * m + pl.rhs_action] = -1.0;
        sys_b[i] = pl.rhs;
      }
      if (!solve_square(sys_a, sys_b, m, vertex)) return;
      for (double& p : vertex) {
        if (p < 0.0) {
          if (p < -tol::kEval) return;
          p = 0.0;
        }
        if (p > pay_cap + tol::kEval) return;
      }
      const double value = eval(vertex, scratch_ind);
      if (value > best.value + 1e-12) {
        best.payments = vertex;
        best.induced = scratch_ind;
        best.value = value;
      }
      return;
    }
    for (int i = start; i <= h - (m - pos); ++i) {
      subset[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return best;
}

PosteriorPayment linear_payment(const Instance& inst, const Posterior& xi, double beta) {
  std::vector<double> payments(inst.m(), 0.0);
  for (int a = 0; a < inst.m(); ++a) {
    double r = 0.0;
    for (int theta = 0; theta < inst.d(); ++theta) r += xi[theta] * inst.us(theta, a);
    payments[a] = beta * r;
  }
  return evaluate_payments(inst, xi, std::move(payments));
}

std::vector<double> beta_grid(double rho) {
  if (rho <= 0.0 || rho > 0.5) throw Error("beta_grid: rho must lie in (0, 1/2]");
  const int count = static_cast<int>(std::floor(1.0 / (2.0 * rho)));
  std::vector<double> grid;
  for (int i = 1; i <= count; ++i) grid.push_back(1.0 - std::pow(2.0, -i));
  return grid;
}

LinearPaymentChoice best_linear_payment(const Instance& inst, const Posterior& xi, double rho) {
  LinearPaymentChoice choice;
  bool first = true;
  for (double beta : beta_grid(rho)) {
    PosteriorPayment pp = linear_payment(inst, xi, beta);
    if (first || pp.value > choice.payment.value + 1e-12) {
      choice.beta = beta;
      choice.payment = std::move(pp);
      first = false;
    }
  }
  return choice;
}

PosteriorPayment robustify(const Instance& inst, const Posterior& xi,
                           const PosteriorPayment& payment, double eps) {
  if (eps < 0.0) throw Error("robustify: eps must be >= 0");
  const double root = std::sqrt(eps);
  std::vector<double> payments(inst.m(), 0.0);
  for (int a = 0; a < inst.m(); ++a) {
    double r = 0.0;
    for (int theta = 0; theta < inst.d(); ++theta) r += xi[theta] * inst.us(theta, a);
    payments[a] = (1.0 - root) * payment.payments[a] + root * r;
  }
  return evaluate_payments(inst, xi, std::move(payments));
}

}  // namespace infosell
