#include "infosell/menu_solver.hpp"

#include <algorithm>
#include <cmath>

namespace infosell {

LinearProgram build_menu_lp(const Instance& inst, MenuLpLayout* layout_out) {
  const int n = inst.n(), d = inst.d(), m = inst.m();
  MenuLpLayout lay{n, d, m};

  LinearProgram lp;
  for (int k = 0; k < n; ++k)
    for (int theta = 0; theta < d; ++theta)
      for (int a = 0; a < m; ++a)
        lp.add_var("phi_" + std::to_string(k) + "_" + std::to_string(theta) + "_" +
                       std::to_string(a),
                   inst.type_dist[k] * inst.prior[theta] * inst.us(theta, a));
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < m; ++a)
      lp.add_var("l_" + std::to_string(k) + "_" + std::to_string(a), -inst.type_dist[k]);
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp)
      for (int a = 0; a < m; ++a)
        lp.add_var("y_" + std::to_string(k) + "_" + std::to_string(kp) + "_" + std::to_string(a),
                   0.0);

  auto zero_row = [&] { return std::vector<double>(lp.num_vars, 0.0); };

  // Buyer's obedient value from their own item, price excluded:
  // sum_a [ sum_theta mu phi^k u^k(a) + l_k(a) ].
  auto add_own_value = [&](std::vector<double>& row, int k, double sign) {
    for (int a = 0; a < m; ++a) {
      for (int theta = 0; theta < d; ++theta)
        row[lay.phi(k, theta, a)] += sign * inst.prior[theta] * inst.ub(k, theta, a);
      row[lay.l(k, a)] += sign;
    }
  };

  // Aggregated IC: own value - b_k >= sum_a y_{k,k',a} - b_{k'}.
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp) {
      auto row = zero_row();
      add_own_value(row, k, 1.0);
      for (int a = 0; a < m; ++a) row[lay.y(k, kp, a)] -= 1.0;
      lp.add_ge(std::move(row), inst.budgets[k] - inst.budgets[kp]);
    }

  // Envelope rows: y_{k,k',a} >= value of obeying recommendation a of item k'
  // and >= value of deviating to any a'.
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp)
      for (int a = 0; a < m; ++a) {
        {
          auto row = zero_row();
          row[lay.y(k, kp, a)] = 1.0;
          for (int theta = 0; theta < d; ++theta)
            row[lay.phi(kp, theta, a)] -= inst.prior[theta] * inst.ub(k, theta, a);
          row[lay.l(kp, a)] -= 1.0;
          lp.add_ge(std::move(row), 0.0);
        }
        for (int ap = 0; ap < m; ++ap) {
          if (ap == a) continue;
          auto row = zero_row();
          row[lay.y(k, kp, a)] = 1.0;
          for (int theta = 0; theta < d; ++theta)
            row[lay.phi(kp, theta, a)] -= inst.prior[theta] * inst.ub(k, theta, ap);
          lp.add_ge(std::move(row), 0.0);
        }
      }

  // IR: own value - b_k >= E_mu u^k(a') for every a'.
  for (int k = 0; k < n; ++k)
    for (int ap = 0; ap < m; ++ap) {
      auto row = zero_row();
      add_own_value(row, k, 1.0);
      double outside = 0.0;
      for (int theta = 0; theta < d; ++theta) outside += inst.prior[theta] * inst.ub(k, theta, ap);
      lp.add_ge(std::move(row), outside + inst.budgets[k]);
    }

  // Persuasiveness: obeying recommendation a beats playing a'.
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < m; ++a)
      for (int ap = 0; ap < m; ++ap) {
        if (ap == a) continue;
        auto row = zero_row();
        for (int theta = 0; theta < d; ++theta)
          row[lay.phi(k, theta, a)] +=
              inst.prior[theta] * (inst.ub(k, theta, a) - inst.ub(k, theta, ap));
        row[lay.l(k, a)] += 1.0;
        lp.add_ge(std::move(row), 0.0);
      }

  // Row-stochastic schemes.
  for (int k = 0; k < n; ++k)
    for (int theta = 0; theta < d; ++theta) {
      auto row = zero_row();
      for (int a = 0; a < m; ++a) row[lay.phi(k, theta, a)] = 1.0;
      lp.add_eq(std::move(row), 1.0);
    }

  if (layout_out) *layout_out = lay;
  return lp;
}

MenuProtocol recover_protocol(const Instance& inst, const MenuLpLayout& lay,
                              std::vector<double> x) {
  const int n = inst.n(), d = inst.d(), m = inst.m();

  auto marginal = [&](int k, int a) {
    double mass = 0.0;
    for (int theta = 0; theta < d; ++theta) mass += inst.prior[theta] * x[lay.phi(k, theta, a)];
    return mass;
  };

  // Shift l-mass away from never-recommended actions onto the recommendation
  // with the largest marginal; the y variables absorb the move so the IC rows
  // stay feasible.
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < m; ++a) {
      if (marginal(k, a) > tol::kEval || x[lay.l(k, a)] <= tol::kEval) continue;
      int target = -1;
      double target_mass = 0.0;
      for (int ap = 0; ap < m; ++ap) {
        const double mass = marginal(k, ap);
        if (mass > target_mass) {
          target_mass = mass;
          target = ap;
        }
      }
      if (target < 0 || target_mass <= tol::kEval)
        throw DegenerateSolution("type recommends no action with positive marginal");
      const double moved = x[lay.l(k, a)];
      x[lay.l(k, a)] = 0.0;
      x[lay.l(k, target)] += moved;
      for (int kp = 0; kp < n; ++kp) {
        x[lay.y(kp, k, a)] = 0.0;
        x[lay.y(kp, k, target)] += moved;
      }
    }
  }

  MenuProtocol proto;
  for (int k = 0; k < n; ++k) {
    Matrix scheme(d, m);
    for (int theta = 0; theta < d; ++theta)
      for (int a = 0; a < m; ++a)
        scheme(theta, a) = std::max(0.0, x[lay.phi(k, theta, a)]);
    proto.schemes.push_back(std::move(scheme));
    proto.prices.push_back(inst.budgets[k]);
    std::vector<double> pay(m, 0.0);
    for (int a = 0; a < m; ++a) {
      const double mass = marginal(k, a);
      if (mass > tol::kEval) pay[a] = std::max(0.0, x[lay.l(k, a)]) / mass;
    }
    proto.payments.push_back(std::move(pay));
  }
  return proto;
}

MenuSolve solve_menu(const Instance& inst) {
  MenuLpLayout lay;
  const LinearProgram lp = build_menu_lp(inst, &lay);
  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::kOptimal)
    throw NumericalFailure("menu relaxation did not solve to optimality");

  double budget_term = 0.0;
  for (int k = 0; k < inst.n(); ++k) budget_term += inst.type_dist[k] * inst.budgets[k];

  MenuSolve out;
  out.value = sol.objective + budget_term;
  out.protocol = recover_protocol(inst, lay, sol.x);
  return out;
}

}  // namespace infosell
