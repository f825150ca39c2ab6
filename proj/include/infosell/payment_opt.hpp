#pragma once

#include <vector>

#include "infosell/common.hpp"
#include "infosell/instance.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

// A payment row inside a fixed posterior together with the actions it induces
// (seller-favoring best responses) and the seller's value
// sum_k lambda_k [ sum_theta xi_theta u^s_theta(b_k) - pi(b_k) ].
struct PosteriorPayment {
  std::vector<double> payments;   // per action, >= 0
  std::vector<int> induced;       // per type
  double value = 0.0;
};

// Recomputes induced actions and seller value for a given payment row.
PosteriorPayment evaluate_payments(const Instance& inst, const Posterior& xi,
                                   std::vector<double> payments);

// Exact optimum by vertex enumeration: the feasible payment region of every
// induced-action tuple is cut out by type indifference hyperplanes and the
// nonnegativity facets, so every candidate vertex solves an m x m system built
// from m of those hyperplanes. Evaluates the seller objective at each vertex
// and keeps the best; the zero row is always a candidate. Payments are capped
// at m (no optimum pays more than the utility range times the action count).
// Throws ExplosionGuard when the subset count exceeds `cap`.
PosteriorPayment optimal_payment_in_posterior(const Instance& inst, const Posterior& xi,
                                              std::size_t cap = Caps{}.vertex);

// Linear payment pi(xi, a) = beta * sum_theta xi_theta u^s_theta(a).
PosteriorPayment linear_payment(const Instance& inst, const Posterior& xi, double beta);

// The dyadic grid {1 - 2^-i : i = 1..floor(1/(2 rho))} for rho in (0, 1/2].
std::vector<double> beta_grid(double rho);

struct LinearPaymentChoice {
  double beta = 0.0;
  PosteriorPayment payment;
};

// Best linear payment over the dyadic grid, by evaluated seller value.
LinearPaymentChoice best_linear_payment(const Instance& inst, const Posterior& xi, double rho);

// eps-best-response robustification: pi'(xi, a) = (1 - sqrt(eps)) pi(xi, a)
// + sqrt(eps) * sum_theta xi_theta u^s_theta(a). Under exact best responses
// the new row loses at most 2 sqrt(eps) against pi under eps-best responses.
PosteriorPayment robustify(const Instance& inst, const Posterior& xi,
                           const PosteriorPayment& payment, double eps);

}  // namespace infosell
