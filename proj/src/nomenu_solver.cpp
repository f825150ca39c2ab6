#include "infosell/nomenu_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include <json.hpp>

#include "infosell/belief.hpp"
#include "infosell/lp.hpp"
#include "infosell/payment_opt.hpp"
#include "infosell/quniform.hpp"

namespace infosell {

using nlohmann::json;

std::string solve_report_to_json_text(const SolveReport& report) {
  json j;
  j["schema_version"] = "1";
  j["method"] = report.method;
  j["value"] = report.value;
  json params;
  params["alpha"] = report.alpha;
  params["eps"] = report.eps;
  params["rho"] = report.rho;
  params["q"] = report.q;
  j["parameters"] = std::move(params);
  if (!report.candidates.empty()) {
    json cands = json::array();
    for (const CandidateInfo& c : report.candidates)
      cands.push_back({{"name", c.name}, {"value", c.value}});
    j["candidates"] = std::move(cands);
  }
  j["protocol"] = json::parse(nomenu_protocol_to_json_text(report.protocol));
  return j.dump(2);
}

namespace {

void require_limited_liability(const Instance& inst, const char* method) {
  if (!inst.limited_liability())
    throw NotLimitedLiability(std::string(method) + " requires all budgets to be zero");
}

// Zero-price protocol supported on the q-uniform grid: per-posterior payment
// rows come from `payment_for`, the consistency LP picks the weights.
NoMenuProtocol solve_on_quniform_grid(
    const Instance& inst, const QUniformSet& grid,
    const std::function<PosteriorPayment(const Posterior&)>& payment_for) {
  const int size = grid.size();
  std::vector<PosteriorPayment> payments;
  payments.reserve(size);
  for (const Posterior& xi : grid.posteriors) payments.push_back(payment_for(xi));

  LinearProgram lp;
  lp.num_vars = size;
  lp.objective.resize(size);
  lp.var_names.resize(size);
  for (int i = 0; i < size; ++i) lp.objective[i] = payments[i].value;
  for (int theta = 0; theta < inst.d(); ++theta) {
    std::vector<double> row(size);
    for (int i = 0; i < size; ++i) row[i] = grid.posteriors[i][theta];
    lp.add_eq(std::move(row), inst.prior[theta]);
  }

  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::kOptimal)
    throw NumericalFailure("q-uniform consistency LP did not solve");

  NoMenuProtocol proto;
  proto.price = 0.0;
  for (int i = 0; i < size; ++i) {
    if (sol.x[i] <= 0.0) continue;
    NoMenuSignal s;
    s.weight = sol.x[i];
    s.posterior = grid.posteriors[i];
    s.payments = payments[i].payments;
    proto.signals.push_back(std::move(s));
  }
  return proto;
}

int ptas_q(const Instance& inst, double alpha, double eps) {
  const double raw = 2.0 * std::log(2.0 * inst.m() / alpha) / (eps * eps);
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

}  // namespace

SolveReport solve_ptas_fixed_actions(const Instance& inst, double alpha, double eps,
                                     const Caps& caps) {
  require_limited_liability(inst, "solve_ptas_fixed_actions");
  if (alpha <= 0.0 || eps <= 0.0) throw Error("solve_ptas_fixed_actions: alpha, eps > 0 required");
  SolveReport report;
  report.method = "ptas";
  report.alpha = alpha;
  report.eps = eps;
  report.q = ptas_q(inst, alpha, eps);

  const QUniformSet grid = enumerate_quniform(inst.d(), report.q, caps.quniform);
  report.protocol = solve_on_quniform_grid(inst, grid, [&](const Posterior& xi) {
    return optimal_payment_in_posterior(inst, xi, caps.vertex);
  });
  report.value = eval_nomenu(inst, report.protocol).utility;
  return report;
}

SolveReport solve_quasipoly(const Instance& inst, double alpha, double eps, double rho,
                            const Caps& caps) {
  require_limited_liability(inst, "solve_quasipoly");
  if (alpha <= 0.0 || eps <= 0.0) throw Error("solve_quasipoly: alpha, eps > 0 required");
  if (rho <= 0.0 || rho > 0.5) throw Error("solve_quasipoly: rho must lie in (0, 1/2]");
  SolveReport report;
  report.method = "qptas";
  report.alpha = alpha;
  report.eps = eps;
  report.rho = rho;
  report.q = ptas_q(inst, alpha, eps);

  const std::vector<double> grid_betas = beta_grid(rho);
  const QUniformSet grid = enumerate_quniform(inst.d(), report.q, caps.quniform);
  report.protocol = solve_on_quniform_grid(inst, grid, [&](const Posterior& xi) {
    // Robustifying each grid beta keeps the eps-best-response guarantee for
    // whichever beta the optimal linear protocol uses; the raw grid payments
    // stay in the candidate set since they sometimes dominate.
    PosteriorPayment best;
    bool first = true;
    for (double beta : grid_betas) {
      PosteriorPayment raw = linear_payment(inst, xi, beta);
      PosteriorPayment robust = robustify(inst, xi, raw, eps);
      for (PosteriorPayment* candidate : {&raw, &robust}) {
        if (first || candidate->value > best.value + 1e-12) {
          best = std::move(*candidate);
          first = false;
        }
      }
    }
    return best;
  });
  report.value = eval_nomenu(inst, report.protocol).utility;
  return report;
}

SolveReport solve_bicriteria_fixed_states(const Instance& inst, double alpha, double rho,
                                          const Caps& caps) {
  require_limited_liability(inst, "solve_bicriteria_fixed_states");
  if (alpha <= 0.0) throw Error("solve_bicriteria_fixed_states: alpha > 0 required");
  if (rho <= 0.0 || rho > 0.5)
    throw Error("solve_bicriteria_fixed_states: rho must lie in (0, 1/2]");
  SolveReport report;
  report.method = "fixed-states";
  report.alpha = alpha;
  report.rho = rho;
  report.q = std::max(1, static_cast<int>(std::ceil(18.0 * inst.d() / (alpha * alpha))));

  const QUniformSet grid = enumerate_quniform(inst.d(), report.q, caps.quniform);
  report.protocol = solve_on_quniform_grid(inst, grid, [&](const Posterior& xi) {
    return best_linear_payment(inst, xi, rho).payment;
  });
  report.value = eval_nomenu(inst, report.protocol).utility;
  return report;
}

std::vector<double> full_info_premiums(const Instance& inst) {
  const Posterior mu{inst.prior};
  std::vector<double> delta(inst.n(), 0.0);
  for (int k = 0; k < inst.n(); ++k) {
    double full = 0.0;
    for (int theta = 0; theta < inst.d(); ++theta) {
      std::vector<double> point(inst.d(), 0.0);
      point[theta] = 1.0;
      const int br = best_response_no_payment(inst, Posterior{point}, k);
      full += inst.prior[theta] * inst.ub(k, theta, br);
    }
    const int br_mu = best_response_no_payment(inst, mu, k);
    double flat = 0.0;
    for (int theta = 0; theta < inst.d(); ++theta) flat += inst.prior[theta] * inst.ub(k, theta, br_mu);
    delta[k] = full - flat;
  }
  return delta;
}

namespace {

// Full revelation over states with positive prior, zero payments.
NoMenuProtocol full_revelation_protocol(const Instance& inst, double price) {
  NoMenuProtocol proto;
  proto.price = price;
  for (int theta = 0; theta < inst.d(); ++theta) {
    if (inst.prior[theta] <= 1e-15) continue;
    NoMenuSignal s;
    s.weight = inst.prior[theta];
    std::vector<double> point(inst.d(), 0.0);
    point[theta] = 1.0;
    s.posterior = Posterior{std::move(point)};
    s.payments.assign(inst.m(), 0.0);
    proto.signals.push_back(std::move(s));
  }
  return proto;
}

}  // namespace

SolveReport solve_general_bicriteria(const Instance& inst, double alpha, double rho,
                                     const Caps& caps) {
  if (alpha <= 0.0) throw Error("solve_general_bicriteria: alpha > 0 required");
  if (rho <= 0.0 || rho > 1.0 / 6.0)
    throw Error("solve_general_bicriteria: rho must lie in (0, 1/6]");

  // The proof's substitutions: the subroutine runs at rho_int = 3 rho and the
  // price grid uses zeta = 2 rho_int.
  const double rho_int = 3.0 * rho;
  const double zeta = 2.0 * rho_int;

  SolveReport report;
  report.method = "general";
  report.alpha = alpha;
  report.rho = rho;

  // P1: no information, zero price, zero payments.
  NoMenuProtocol p1 = no_info_protocol(inst);
  const double v1 = eval_nomenu(inst, p1).utility;

  // P2: limited-liability subroutine on the budget-zeroed copy. Fixed-states
  // when its grid fits the cap, else the quasi-polynomial variant.
  Instance zeroed = inst;
  zeroed.budgets.assign(inst.n(), 0.0);
  const int q_fs = std::max(1, static_cast<int>(std::ceil(18.0 * inst.d() / (alpha * alpha))));
  SolveReport sub;
  if (binomial(q_fs + inst.d() - 1, inst.d() - 1) <= static_cast<double>(caps.quniform)) {
    sub = solve_bicriteria_fixed_states(zeroed, alpha, rho_int, caps);
  } else {
    const double sub_alpha = alpha / 2.0;
    const double sub_eps = (alpha / 4.0) * (alpha / 4.0);
    sub = solve_quasipoly(zeroed, sub_alpha, sub_eps, rho_int, caps);
  }
  report.q = sub.q;
  NoMenuProtocol p2 = sub.protocol;
  const double v2 = eval_nomenu(inst, p2).utility;

  // P3: full revelation priced on the dyadic grid against the premiums
  // delta_k; p* maximizes p times the mass of types whose rounded-down grid
  // price is exactly p.
  std::vector<double> price_grid = {0.0};
  const int grid_len = static_cast<int>(std::floor(1.0 / zeta));
  for (int i = 1; i <= grid_len; ++i) price_grid.push_back(std::pow(2.0, -i));
  const std::vector<double> delta = full_info_premiums(inst);
  std::vector<double> pk(inst.n(), 0.0);
  for (int k = 0; k < inst.n(); ++k) {
    double best = 0.0;
    for (double p : price_grid)
      if (p <= delta[k] + tol::kProb) best = std::max(best, p);
    pk[k] = best;
  }
  double p_star = 0.0, p_star_score = -1.0;
  for (double p : price_grid) {
    double mass = 0.0;
    for (int k = 0; k < inst.n(); ++k)
      if (std::abs(pk[k] - p) < tol::kProb) mass += inst.type_dist[k];
    const double score = p * mass;
    if (score > p_star_score + 1e-15) {
      p_star_score = score;
      p_star = p;
    }
  }
  NoMenuProtocol p3 = full_revelation_protocol(inst, p_star);
  const double v3 = eval_nomenu(inst, p3).utility;

  report.candidates = {{"no-info", v1}, {"limited-liability", v2}, {"full-revelation", v3}};
  if (v1 >= v2 && v1 >= v3) {
    report.protocol = std::move(p1);
    report.value = v1;
  } else if (v2 >= v3) {
    report.protocol = std::move(p2);
    report.value = v2;
  } else {
    report.protocol = std::move(p3);
    report.value = v3;
  }
  return report;
}

namespace {

// Variable layout for the generalized-direct relaxation: phi_theta(tuple),
// then l(tuple, a), then the participation-envelope variables w_{k,tuple} for
// excluded-but-affording types.
struct FixedTypesLayout {
  int d = 0, m = 0, tuples = 0;
  std::vector<int> excluded;   // types the anti-IR rows apply to

  int phi(int theta, int t) const { return theta * tuples + t; }
  int l(int t, int a) const { return d * tuples + t * m + a; }
  int w(int idx, int t) const { return d * tuples + tuples * m + idx * tuples + t; }
  int num_vars() const {
    return d * tuples + tuples * m + static_cast<int>(excluded.size()) * tuples;
  }
};

int tuple_component(int tuple, int k, int m) {
  for (int i = 0; i < k; ++i) tuple /= m;
  return tuple % m;
}

}  // namespace

SolveReport solve_fixed_types_exact(const Instance& inst, const Caps& caps) {
  const int n = inst.n(), m = inst.m(), d = inst.d();
  double tuple_count = 1.0;
  for (int i = 0; i < n; ++i) tuple_count *= m;
  if (tuple_count > static_cast<double>(caps.signals))
    throw ExplosionGuard("m^n signal tuples exceed cap");
  const int tuples = static_cast<int>(tuple_count);

  const Posterior mu{inst.prior};
  std::vector<double> outside(n);
  for (int k = 0; k < n; ++k) {
    const int br = best_response_no_payment(inst, mu, k);
    double v = 0.0;
    for (int theta = 0; theta < d; ++theta) v += inst.prior[theta] * inst.ub(k, theta, br);
    outside[k] = v;
  }

  std::vector<double> prices = inst.budgets;
  std::sort(prices.begin(), prices.end());
  prices.erase(std::unique(prices.begin(), prices.end()), prices.end());

  SolveReport best;
  best.method = "fixed-types";
  bool have_best = false;

  for (double price : prices) {
    std::vector<int> eligible;
    for (int k = 0; k < n; ++k)
      if (inst.budgets[k] >= price - tol::kProb) eligible.push_back(k);
    const int e = static_cast<int>(eligible.size());

    for (int mask = 0; mask < (1 << e); ++mask) {
      std::vector<int> in_set, out_set;
      for (int i = 0; i < e; ++i)
        ((mask >> i) & 1) ? in_set.push_back(eligible[i]) : out_set.push_back(eligible[i]);

      FixedTypesLayout lay;
      lay.d = d;
      lay.m = m;
      lay.tuples = tuples;
      lay.excluded = out_set;

      LinearProgram lp;
      lp.num_vars = lay.num_vars();
      lp.objective.assign(lp.num_vars, 0.0);
      lp.var_names.resize(lp.num_vars);
      for (int k : in_set) {
        for (int t = 0; t < tuples; ++t) {
          const int ak = tuple_component(t, k, m);
          for (int theta = 0; theta < d; ++theta)
            lp.objective[lay.phi(theta, t)] +=
                inst.type_dist[k] * inst.prior[theta] * inst.us(theta, ak);
          lp.objective[lay.l(t, ak)] -= inst.type_dist[k];
        }
      }

      auto zero_row = [&] { return std::vector<double>(lp.num_vars, 0.0); };

      // Generalized persuasiveness for participating types.
      for (int k : in_set)
        for (int t = 0; t < tuples; ++t) {
          const int ak = tuple_component(t, k, m);
          for (int ap = 0; ap < m; ++ap) {
            if (ap == ak) continue;
            auto row = zero_row();
            for (int theta = 0; theta < d; ++theta)
              row[lay.phi(theta, t)] =
                  inst.prior[theta] * (inst.ub(k, theta, ak) - inst.ub(k, theta, ap));
            row[lay.l(t, ak)] += 1.0;
            row[lay.l(t, ap)] -= 1.0;
            lp.add_ge(std::move(row), 0.0);
          }
        }

      // IR for participating types: obedient value - price >= outside option.
      for (int k : in_set) {
        auto row = zero_row();
        for (int t = 0; t < tuples; ++t) {
          const int ak = tuple_component(t, k, m);
          for (int theta = 0; theta < d; ++theta)
            row[lay.phi(theta, t)] += inst.prior[theta] * inst.ub(k, theta, ak);
          row[lay.l(t, ak)] += 1.0;
        }
        lp.add_ge(std::move(row), outside[k] + price);
      }

      // Anti-IR for excluded affording types, with per-signal envelopes: the
      // buyer's optimal participation value may not beat the outside option.
      for (int idx = 0; idx < static_cast<int>(out_set.size()); ++idx) {
        const int k = out_set[idx];
        for (int t = 0; t < tuples; ++t)
          for (int ap = 0; ap < m; ++ap) {
            auto row = zero_row();
            row[lay.w(idx, t)] = 1.0;
            for (int theta = 0; theta < d; ++theta)
              row[lay.phi(theta, t)] -= inst.prior[theta] * inst.ub(k, theta, ap);
            row[lay.l(t, ap)] -= 1.0;
            lp.add_ge(std::move(row), 0.0);
          }
        auto row = zero_row();
        for (int t = 0; t < tuples; ++t) row[lay.w(idx, t)] = 1.0;
        lp.add_le(std::move(row), outside[k] + price);
      }

      // Row-stochastic signaling scheme.
      for (int theta = 0; theta < d; ++theta) {
        auto row = zero_row();
        for (int t = 0; t < tuples; ++t) row[lay.phi(theta, t)] = 1.0;
        lp.add_eq(std::move(row), 1.0);
      }

      const LpSolution sol = solve(lp);
      if (sol.status != LpStatus::kOptimal) continue;

      std::vector<double> x = sol.x;
      auto tuple_marginal = [&](int t) {
        double mass = 0.0;
        for (int theta = 0; theta < d; ++theta) mass += inst.prior[theta] * x[lay.phi(theta, t)];
        return mass;
      };

      // Mass shift: payment mass on never-sent tuples moves uniformly onto the
      // tuple with the largest marginal.
      int target = 0;
      double target_mass = -1.0;
      for (int t = 0; t < tuples; ++t) {
        const double mass = tuple_marginal(t);
        if (mass > target_mass) {
          target_mass = mass;
          target = t;
        }
      }
      for (int t = 0; t < tuples; ++t) {
        if (t == target || tuple_marginal(t) > tol::kEval) continue;
        double moved = 0.0;
        for (int a = 0; a < m; ++a) moved = std::max(moved, x[lay.l(t, a)]);
        if (moved <= tol::kEval) continue;
        for (int a = 0; a < m; ++a) {
          x[lay.l(t, a)] = 0.0;
          x[lay.l(target, a)] += moved;
        }
      }

      NoMenuProtocol proto;
      proto.price = price;
      for (int t = 0; t < tuples; ++t) {
        const double mass = tuple_marginal(t);
        if (mass <= tol::kEval) continue;
        SignalTable phi(d, 1);
        std::vector<double> probs(d);
        for (int theta = 0; theta < d; ++theta)
          probs[theta] = inst.prior[theta] * std::max(0.0, x[lay.phi(theta, t)]) / mass;
        NoMenuSignal s;
        s.weight = mass;
        s.posterior = make_posterior(std::move(probs));
        s.payments.resize(m);
        for (int a = 0; a < m; ++a) s.payments[a] = std::max(0.0, x[lay.l(t, a)]) / mass;
        // Label with the realized best responses; the LP's tuple components
        // are only pinned down for participating types.
        s.label.resize(n);
        for (int k = 0; k < n; ++k)
          s.label[k] = best_response(inst, s.posterior, s.payments, k, 0.0);
        proto.signals.push_back(std::move(s));
      }

      const double value = eval_nomenu(inst, proto).utility;
      if (!have_best || value > best.value + 1e-12) {
        best.protocol = std::move(proto);
        best.value = value;
        have_best = true;
      }
    }
  }

  if (!have_best) throw NumericalFailure("no (price, participation set) subproblem solved");
  return best;
}

NoMenuProtocol normalize_generalized_direct(const Instance& inst, const NoMenuProtocol& proto) {
  const int n = inst.n();

  // Merge signals with identical best-response vectors; the merged payment row
  // is the marginal-weighted average, which preserves every type's value and
  // best-response set.
  std::map<std::vector<int>, NoMenuSignal> merged;
  for (const NoMenuSignal& s : proto.signals) {
    if (s.weight <= 1e-15) continue;
    std::vector<int> key(n);
    for (int k = 0; k < n; ++k) key[k] = best_response(inst, s.posterior, s.payments, k, 0.0);
    auto it = merged.find(key);
    if (it == merged.end()) {
      NoMenuSignal copy = s;
      copy.label = key;
      for (double& p : copy.payments) p *= s.weight;
      for (double& p : copy.posterior.probs) p *= s.weight;
      merged.emplace(std::move(key), std::move(copy));
    } else {
      NoMenuSignal& acc = it->second;
      acc.weight += s.weight;
      for (std::size_t i = 0; i < acc.payments.size(); ++i)
        acc.payments[i] += s.weight * s.payments[i];
      for (std::size_t i = 0; i < acc.posterior.probs.size(); ++i)
        acc.posterior.probs[i] += s.weight * s.posterior.probs[i];
    }
  }

  NoMenuProtocol out;
  out.price = proto.price;
  for (auto& [key, acc] : merged) {
    NoMenuSignal s = acc;
    for (double& p : s.payments) p /= s.weight;
    for (double& p : s.posterior.probs) p /= s.weight;
    s.posterior = make_posterior(std::move(s.posterior.probs));
    out.signals.push_back(std::move(s));
  }

  // Price shift to the smallest participating budget, compensating uniformly
  // through the payments; with no participants the protocol collapses to the
  // no-information baseline at the largest budget.
  const NoMenuEval eval = eval_nomenu(inst, out);
  if (!eval.ir_set.empty()) {
    double smallest = std::numeric_limits<double>::infinity();
    for (int k : eval.ir_set) smallest = std::min(smallest, inst.budgets[k]);
    const double shift = smallest - out.price;
    if (std::abs(shift) > 0.0) {
      out.price = smallest;
      for (NoMenuSignal& s : out.signals)
        for (double& p : s.payments) p = std::max(0.0, p + shift);
    }
  } else {
    double top = 0.0;
    for (double b : inst.budgets) top = std::max(top, b);
    NoMenuProtocol collapsed = no_info_protocol(inst);
    collapsed.price = top;
    std::vector<int> key(n);
    for (int k = 0; k < n; ++k)
      key[k] = best_response(inst, collapsed.signals[0].posterior, collapsed.signals[0].payments,
                             k, 0.0);
    collapsed.signals[0].label = key;
    return collapsed;
  }
  return out;
}

}  // namespace infosell
