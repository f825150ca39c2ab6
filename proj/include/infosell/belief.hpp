#pragma once

#include <vector>

#include "infosell/common.hpp"
#include "infosell/instance.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

// A signaling scheme as a table: rows over states, columns over signals; each
// row is a distribution over signals.
using SignalTable = Matrix;

// Bayes update for one signal: xi_theta proportional to mu_theta * phi_theta(s).
// Throws ZeroMassSignal when the signal has zero marginal probability.
Posterior bayes_posterior(const SignalTable& phi, const std::vector<double>& mu, int signal);

// Distribution over posteriors induced by a scheme; signals with zero marginal
// are dropped.
PosteriorDistribution induced_distribution(const SignalTable& phi, const std::vector<double>& mu);

// eps-best response of type k in posterior xi given a per-action payment row.
// Ties inside the eps-best-response set break in favor of the seller (largest
// posterior-expected seller utility net of payment), then by action index.
int best_response(const Instance& inst, const Posterior& xi, const std::vector<double>& payments,
                  int k, double eps);

// Zero-payment exact best response b^k_xi.
int best_response_no_payment(const Instance& inst, const Posterior& xi, int k);

// Buyer's value of the best response (max over actions of expected utility
// plus payment).
double best_response_value(const Instance& inst, const Posterior& xi,
                           const std::vector<double>& payments, int k);

struct NoMenuEval {
  double utility = 0.0;
  std::vector<int> ir_set;                 // participating types, ascending
  std::vector<double> buyer_values;        // per type: in-protocol value minus price
  std::vector<double> outside_values;      // per type: max_a E_mu u^k(a)
};

// Evaluates a protocol without menus. A type participates iff it can afford
// the price and the IR inequality holds; exact indifference resolves to the
// branch with the larger seller utility.
NoMenuEval eval_nomenu(const Instance& inst, const NoMenuProtocol& proto);

struct MenuEval {
  double utility = 0.0;
  bool ic_ok = true;
  bool ir_ok = true;
  double worst_ic_slack = 0.0;   // min over pairs of (LHS - RHS); negative = violated
  double worst_ir_slack = 0.0;
};

// Evaluates a protocol with menus under truthful selection, and reports
// whether the IC and IR inequalities hold within 1e-9.
MenuEval eval_menu(const Instance& inst, const MenuProtocol& proto);

// Seller's utility when nobody buys information: sum_k lambda_k E_mu u^s(b^k_mu).
double no_info_baseline(const Instance& inst);

// No-information, zero-price, zero-payment protocol (single signal at the prior).
NoMenuProtocol no_info_protocol(const Instance& inst);

}  // namespace infosell
