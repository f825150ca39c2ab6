#pragma once

#include "infosell/common.hpp"
#include "infosell/instance.hpp"
#include "infosell/lp.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

// Variable layout of the menu relaxation: phi^k_theta(a) first, then the
// payment-mass variables l_k(a) encoding sum_theta mu_theta phi^k_theta(a)
// pi_k(a), then the IC envelope variables y_{k,k',a}.
struct MenuLpLayout {
  int n = 0, d = 0, m = 0;

  int phi(int k, int theta, int a) const { return (k * d + theta) * m + a; }
  int l(int k, int a) const { return n * d * m + k * m + a; }
  int y(int k, int kp, int a) const { return n * d * m + n * m + (k * n + kp) * m + a; }
  int num_vars() const { return n * d * m + n * m + n * n * m; }
};

// Builds the linear relaxation of the menu problem: objective
// sum_k lambda_k [ sum_a ( sum_theta mu phi u^s - l_k(a) ) + b_k ] with the
// constant budget term kept outside the LP; constraints are the aggregated IC
// rows, the y-envelope rows, IR, persuasiveness, and row-stochasticity.
LinearProgram build_menu_lp(const Instance& inst, MenuLpLayout* layout = nullptr);

// Recovers a protocol from a feasible relaxation point. Payment mass sitting
// on a never-recommended action is first shifted onto the recommendation with
// the largest marginal (adjusting the y variables), then pi_k(a) =
// l_k(a) / sum_theta mu_theta phi^k_theta(a) and p_k = b_k.
MenuProtocol recover_protocol(const Instance& inst, const MenuLpLayout& layout,
                              std::vector<double> x);

struct MenuSolve {
  MenuProtocol protocol;
  double value = 0.0;   // LP optimum plus the constant budget term
};

// Exact seller-optimal protocol with menus: solve the relaxation, recover.
MenuSolve solve_menu(const Instance& inst);

}  // namespace infosell
