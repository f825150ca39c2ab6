#include "infosell/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace infosell {

Posterior make_posterior(std::vector<double> probs) {
  double sum = 0.0;
  for (double& p : probs) {
    if (p < 0.0) {
      if (p < -tol::kProb) throw Error("posterior entry below -1e-12");
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::kPosterior) throw Error("posterior not normalized");
  return Posterior{std::move(probs)};
}

double consistency_gap(const PosteriorDistribution& dist, const std::vector<double>& mu) {
  double gap = 0.0;
  for (std::size_t theta = 0; theta < mu.size(); ++theta) {
    double mass = 0.0;
    for (int i = 0; i < dist.size(); ++i) mass += dist.weights[i] * dist.support[i].probs[theta];
    gap = std::max(gap, std::abs(mass - mu[theta]));
  }
  double total = std::accumulate(dist.weights.begin(), dist.weights.end(), 0.0);
  gap = std::max(gap, std::abs(total - 1.0));
  return gap;
}

Posterior bayes_posterior(const SignalTable& phi, const std::vector<double>& mu, int signal) {
  const int d = phi.rows();
  double marginal = 0.0;
  for (int theta = 0; theta < d; ++theta) marginal += mu[theta] * phi(theta, signal);
  if (marginal <= 0.0) throw ZeroMassSignal("signal " + std::to_string(signal) + " has zero marginal");
  std::vector<double> probs(d);
  for (int theta = 0; theta < d; ++theta) probs[theta] = mu[theta] * phi(theta, signal) / marginal;
  return make_posterior(std::move(probs));
}

PosteriorDistribution induced_distribution(const SignalTable& phi, const std::vector<double>& mu) {
  PosteriorDistribution dist;
  for (int s = 0; s < phi.cols(); ++s) {
    double marginal = 0.0;
    for (int theta = 0; theta < phi.rows(); ++theta) marginal += mu[theta] * phi(theta, s);
    if (marginal <= 1e-15) continue;  // degenerate signals are dropped
    dist.support.push_back(bayes_posterior(phi, mu, s));
    dist.weights.push_back(marginal);
  }
  return dist;
}

namespace {

double buyer_value(const Instance& inst, const Posterior& xi, const std::vector<double>& payments,
                   int k, int a) {
  double v = payments.empty() ? 0.0 : payments[a];
  for (int theta = 0; theta < inst.d(); ++theta) v += xi[theta] * inst.ub(k, theta, a);
  return v;
}

double seller_value(const Instance& inst, const Posterior& xi, const std::vector<double>& payments,
                    int a) {
  double v = payments.empty() ? 0.0 : -payments[a];
  for (int theta = 0; theta < inst.d(); ++theta) v += xi[theta] * inst.us(theta, a);
  return v;
}

}  // namespace

int best_response(const Instance& inst, const Posterior& xi, const std::vector<double>& payments,
                  int k, double eps) {
  const int m = inst.m();
  double best = -1.0;
  std::vector<double> values(m);
  for (int a = 0; a < m; ++a) {
    values[a] = buyer_value(inst, xi, payments, k, a);
    best = std::max(best, values[a]);
  }
  int chosen = -1;
  double chosen_seller = 0.0;
  for (int a = 0; a < m; ++a) {
    if (values[a] < best - eps - tol::kEval) continue;
    const double sv = seller_value(inst, xi, payments, a);
    if (chosen < 0 || sv > chosen_seller + tol::kEval) {
      chosen = a;
      chosen_seller = sv;
    }
  }
  return chosen;
}

int best_response_no_payment(const Instance& inst, const Posterior& xi, int k) {
  return best_response(inst, xi, {}, k, 0.0);
}

double best_response_value(const Instance& inst, const Posterior& xi,
                           const std::vector<double>& payments, int k) {
  double best = -1.0;
  for (int a = 0; a < inst.m(); ++a) best = std::max(best, buyer_value(inst, xi, payments, k, a));
  return best;
}

double no_info_baseline(const Instance& inst) {
  const Posterior mu{inst.prior};
  double total = 0.0;
  for (int k = 0; k < inst.n(); ++k) {
    const int br = best_response_no_payment(inst, mu, k);
    total += inst.type_dist[k] * seller_value(inst, mu, {}, br);
  }
  return total;
}

NoMenuProtocol no_info_protocol(const Instance& inst) {
  NoMenuProtocol proto;
  proto.price = 0.0;
  NoMenuSignal s;
  s.weight = 1.0;
  s.posterior = Posterior{inst.prior};
  s.payments.assign(inst.m(), 0.0);
  proto.signals.push_back(std::move(s));
  return proto;
}

NoMenuEval eval_nomenu(const Instance& inst, const NoMenuProtocol& proto) {
  const int n = inst.n();
  const Posterior mu{inst.prior};
  NoMenuEval out;
  out.buyer_values.resize(n);
  out.outside_values.resize(n);

  for (int k = 0; k < n; ++k) {
    // Outside option: best response to the prior, no payments, no price.
    const int br_mu = best_response_no_payment(inst, mu, k);
    const double outside_buyer = buyer_value(inst, mu, {}, k, br_mu);
    const double outside_seller = seller_value(inst, mu, {}, br_mu);

    double in_buyer = -proto.price;
    double in_seller = proto.price;
    for (const NoMenuSignal& s : proto.signals) {
      const int br = best_response(inst, s.posterior, s.payments, k, 0.0);
      in_buyer += s.weight * buyer_value(inst, s.posterior, s.payments, k, br);
      in_seller += s.weight * seller_value(inst, s.posterior, s.payments, br);
    }

    out.buyer_values[k] = in_buyer;
    out.outside_values[k] = outside_buyer;

    bool participates = false;
    if (inst.budgets[k] >= proto.price - tol::kProb) {
      if (in_buyer > outside_buyer + tol::kEval) {
        participates = true;
      } else if (in_buyer >= outside_buyer - tol::kEval) {
        // Indifferent: take the branch maximizing the seller's expected utility.
        participates = in_seller >= outside_seller;
      }
    }
    if (participates) {
      out.ir_set.push_back(k);
      out.utility += inst.type_dist[k] * in_seller;
    } else {
      out.utility += inst.type_dist[k] * outside_seller;
    }
  }
  return out;
}

MenuEval eval_menu(const Instance& inst, const MenuProtocol& proto) {
  const int n = inst.n(), m = inst.m(), d = inst.d();
  MenuEval out;
  out.worst_ic_slack = 1e30;
  out.worst_ir_slack = 1e30;

  // value[k][j]: type k's optimal expected value from item j (scheme + diagonal
  // payments), price excluded. Equal to the truthful LHS when k == j.
  Matrix value(n, n, 0.0);
  std::vector<double> seller_term(n, 0.0);  // seller's expected term when k uses its own item

  for (int j = 0; j < n; ++j) {
    const Matrix& phi = proto.schemes[j];
    for (int rec = 0; rec < m; ++rec) {
      double marginal = 0.0;
      for (int theta = 0; theta < d; ++theta) marginal += inst.prior[theta] * phi(theta, rec);
      if (marginal <= 1e-15) continue;
      const Posterior xi = bayes_posterior(phi, inst.prior, rec);
      std::vector<double> payrow(m, 0.0);
      payrow[rec] = proto.payments[j][rec];  // diagonal payments only
      for (int k = 0; k < n; ++k) {
        value(k, j) += marginal * best_response_value(inst, xi, payrow, k);
        if (k == j) {
          const int br = best_response(inst, xi, payrow, k, 0.0);
          seller_term[k] += marginal * seller_value(inst, xi, payrow, br);
        }
      }
    }
  }

  for (int k = 0; k < n; ++k) {
    const double lhs = value(k, k) - proto.prices[k];
    for (int j = 0; j < n; ++j) {
      const double slack = lhs - (value(k, j) - proto.prices[j]);
      out.worst_ic_slack = std::min(out.worst_ic_slack, slack);
    }
    double outside = 0.0;
    for (int a = 0; a < m; ++a) {
      double v = 0.0;
      for (int theta = 0; theta < d; ++theta) v += inst.prior[theta] * inst.ub(k, theta, a);
      outside = std::max(outside, v);
    }
    out.worst_ir_slack = std::min(out.worst_ir_slack, lhs - outside);
    out.utility += inst.type_dist[k] * (seller_term[k] + proto.prices[k]);
  }

  out.ic_ok = out.worst_ic_slack >= -tol::kEval;
  out.ir_ok = out.worst_ir_slack >= -tol::kEval;
  return out;
}

}  // namespace infosell
