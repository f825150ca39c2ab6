#pragma once

#include <string>
#include <vector>

#include "infosell/common.hpp"
#include "infosell/instance.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

struct CandidateInfo {
  std::string name;
  double value = 0.0;
};

// Result of a protocols-without-menus solver. `value` is always re-derived
// from eval_nomenu on the returned protocol, never copied from an LP
// objective.
struct SolveReport {
  NoMenuProtocol protocol;
  double value = 0.0;
  std::string method;
  double alpha = 0.0, eps = 0.0, rho = 0.0;
  int q = 0;
  std::vector<CandidateInfo> candidates;   // three-way algorithm breakdown
};

std::string solve_report_to_json_text(const SolveReport& report);

// PTAS for limited liability with few actions: support restricted to the
// q-uniform grid with q = ceil(2 log(2m/alpha) / eps^2), exact per-posterior
// payments by vertex enumeration, then one consistency LP.
SolveReport solve_ptas_fixed_actions(const Instance& inst, double alpha, double eps,
                                     const Caps& caps = {});

// Quasi-polynomial bi-criteria variant: same skeleton, but per-posterior
// payments are the best robustified linear payment over the dyadic beta grid.
SolveReport solve_quasipoly(const Instance& inst, double alpha, double eps, double rho,
                            const Caps& caps = {});

// Fixed-states bi-criteria variant: q = ceil(18 d / alpha^2) (the constant the
// proofs verify), per-posterior payments from the best linear payment.
SolveReport solve_bicriteria_fixed_states(const Instance& inst, double alpha, double rho,
                                          const Caps& caps = {});

// General bi-criteria algorithm for rho in (0, 1/6]: evaluates three
// candidates and keeps the best -- (P1) no information at zero price, (P2) a
// limited-liability subroutine on the budget-zeroed instance, (P3) full
// revelation priced on the dyadic grid P_zeta against the full-information
// premiums delta_k.
SolveReport solve_general_bicriteria(const Instance& inst, double alpha, double rho,
                                     const Caps& caps = {});

// Exact solver for few types: enumerate prices in {b_k} and participation
// sets, solve the generalized-direct relaxation for each, recover payments by
// mass shifting, and keep the best evaluated protocol.
SolveReport solve_fixed_types_exact(const Instance& inst, const Caps& caps = {});

// Full-information premium delta_k = E_mu u^k(b^k_theta) - E_mu u^k(b^k_mu).
std::vector<double> full_info_premiums(const Instance& inst);

// Merges signals that induce the same best-response vector (weight-averaged
// payments) and shifts the price to the smallest participating budget with a
// compensating uniform payment increase. Value-preserving.
NoMenuProtocol normalize_generalized_direct(const Instance& inst, const NoMenuProtocol& proto);

}  // namespace infosell
