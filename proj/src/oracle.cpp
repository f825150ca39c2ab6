#include "infosell/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include <json.hpp>

#include "infosell/belief.hpp"
#include "infosell/payment_opt.hpp"

namespace infosell {

using nlohmann::json;

namespace {

// All count vectors over `parts` bins summing to `total`.
void for_each_composition(int total, int parts,
                          const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> counts(parts, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == parts - 1) {
      counts[pos] = remaining;
      fn(counts);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      rec(pos + 1, remaining - c);
    }
  };
  rec(0, total);
}

int tuple_component(int tuple, int k, int m) {
  for (int i = 0; i < k; ++i) tuple /= m;
  return tuple % m;
}

}  // namespace

NoMenuOracleResult brute_force_nomenu(const Instance& inst, const GridSpec& grid) {
  const int n = inst.n(), m = inst.m(), d = inst.d();
  double tuple_count = 1.0;
  for (int i = 0; i < n; ++i) tuple_count *= m;
  const int tuples = static_cast<int>(tuple_count);

  const int steps = std::max(1, static_cast<int>(std::llround(1.0 / grid.scheme_step)));
  const double rows_per_state = binomial(steps + tuples - 1, tuples - 1);
  const double scheme_count = std::pow(rows_per_state, d);
  if (tuple_count > 512.0 || scheme_count > static_cast<double>(grid.max_enumeration))
    throw ExplosionGuard("no-menu oracle grid of " + std::to_string(scheme_count) +
                         " schemes exceeds cap");

  // Row candidates per state.
  std::vector<std::vector<double>> rows;
  for_each_composition(steps, tuples, [&](const std::vector<int>& counts) {
    std::vector<double> row(tuples);
    for (int t = 0; t < tuples; ++t) row[t] = static_cast<double>(counts[t]) / steps;
    rows.push_back(std::move(row));
  });

  std::vector<double> prices = {0.0};
  for (double b : inst.budgets) prices.push_back(b);
  std::sort(prices.begin(), prices.end());
  prices.erase(std::unique(prices.begin(), prices.end()), prices.end());

  // Optimal payments are memoized per quantized posterior; grid schemes repeat
  // the same posteriors constantly.
  std::map<std::vector<long long>, PosteriorPayment> payment_cache;
  auto optimal_payments_for = [&](const Posterior& xi) -> const PosteriorPayment& {
    std::vector<long long> key(xi.dim());
    for (int i = 0; i < xi.dim(); ++i) key[i] = std::llround(xi[i] * 1e12);
    auto it = payment_cache.find(key);
    if (it == payment_cache.end())
      it = payment_cache.emplace(std::move(key), optimal_payment_in_posterior(inst, xi)).first;
    return it->second;
  };

  NoMenuOracleResult best;
  best.value = -std::numeric_limits<double>::infinity();

  std::vector<int> choice(d, 0);
  std::function<void(int)> rec = [&](int state) {
    if (state < d) {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        choice[state] = static_cast<int>(r);
        rec(state + 1);
      }
      return;
    }

    NoMenuProtocol zero_pay, opt_pay;
    for (int t = 0; t < tuples; ++t) {
      double marginal = 0.0;
      for (int theta = 0; theta < d; ++theta)
        marginal += inst.prior[theta] * rows[choice[theta]][t];
      if (marginal <= 1e-15) continue;
      std::vector<double> probs(d);
      for (int theta = 0; theta < d; ++theta)
        probs[theta] = inst.prior[theta] * rows[choice[theta]][t] / marginal;
      NoMenuSignal s;
      s.weight = marginal;
      s.posterior = make_posterior(std::move(probs));
      s.label.resize(n);
      for (int k = 0; k < n; ++k) s.label[k] = tuple_component(t, k, m);
      s.payments.assign(m, 0.0);
      zero_pay.signals.push_back(s);
      s.payments = optimal_payments_for(s.posterior).payments;
      opt_pay.signals.push_back(std::move(s));
    }

    for (double price : prices) {
      for (NoMenuProtocol* proto : {&zero_pay, &opt_pay}) {
        proto->price = price;
        const double value = eval_nomenu(inst, *proto).utility;
        if (value > best.value + 1e-12) {
          best.value = value;
          best.protocol = *proto;
        }
      }
    }
  };
  rec(0);
  return best;
}

MenuOracleResult brute_force_menu(const Instance& inst, const GridSpec& grid) {
  const int n = inst.n(), m = inst.m(), d = inst.d();

  const int steps = std::max(1, static_cast<int>(std::llround(1.0 / grid.scheme_step)));
  std::vector<std::vector<double>> rows;
  for_each_composition(steps, m, [&](const std::vector<int>& counts) {
    std::vector<double> row(m);
    for (int a = 0; a < m; ++a) row[a] = static_cast<double>(counts[a]) / steps;
    rows.push_back(std::move(row));
  });

  const int pay_levels = static_cast<int>(std::llround(1.0 / grid.payment_step)) + 1;
  std::vector<std::vector<double>> payvecs;
  {
    std::vector<int> levels(m, 0);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == m) {
        std::vector<double> pay(m);
        for (int a = 0; a < m; ++a) pay[a] = levels[a] * grid.payment_step;
        payvecs.push_back(std::move(pay));
        return;
      }
      for (int v = 0; v < pay_levels; ++v) {
        levels[pos] = v;
        rec(pos + 1);
      }
    };
    rec(0);
  }

  const double schemes_per_type = std::pow(static_cast<double>(rows.size()), d);
  const double items = schemes_per_type * static_cast<double>(payvecs.size());
  if (std::pow(items + n, n) > static_cast<double>(grid.max_enumeration))
    throw ExplosionGuard("menu oracle grid of " + std::to_string(std::pow(items, n)) +
                         " assignments exceeds cap");

  // Materialize all items (scheme + diagonal payments).
  struct Item {
    Matrix scheme;
    std::vector<double> payments;
  };
  std::vector<Item> item_list;
  {
    std::vector<int> choice(d, 0);
    std::function<void(int)> rec = [&](int state) {
      if (state < d) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
          choice[state] = static_cast<int>(r);
          rec(state + 1);
        }
        return;
      }
      Matrix scheme(d, m);
      for (int theta = 0; theta < d; ++theta)
        for (int a = 0; a < m; ++a) scheme(theta, a) = rows[choice[theta]][a];
      for (const std::vector<double>& pay : payvecs) item_list.push_back({scheme, pay});
    };
    rec(0);
  }
  // Fallback items keep the grid IC+IR-feasible for any budgets: recommend the
  // type's prior best response everywhere and refund its budget on it.
  {
    const Posterior mu{inst.prior};
    for (int k = 0; k < n; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      int br = 0;
      for (int a = 0; a < m; ++a) {
        double v = 0.0;
        for (int theta = 0; theta < d; ++theta) v += inst.prior[theta] * inst.ub(k, theta, a);
        if (v > best + 1e-15) {
          best = v;
          br = a;
        }
      }
      Matrix scheme(d, m, 0.0);
      for (int theta = 0; theta < d; ++theta) scheme(theta, br) = 1.0;
      std::vector<double> pay(m, 0.0);
      pay[br] = inst.budgets[k];
      item_list.push_back({std::move(scheme), std::move(pay)});
    }
  }
  const int t = static_cast<int>(item_list.size());

  // U[k][j]: type k's optimal value from item j (price excluded).
  // V[k][j]: seller's term when type k uses item j, ties broken for the seller.
  Matrix value_u(n, t, 0.0), value_v(n, t, 0.0);
  for (int j = 0; j < t; ++j) {
    const Item& item = item_list[j];
    for (int rec_a = 0; rec_a < m; ++rec_a) {
      double marginal = 0.0;
      for (int theta = 0; theta < d; ++theta) marginal += inst.prior[theta] * item.scheme(theta, rec_a);
      if (marginal <= 1e-15) continue;
      for (int k = 0; k < n; ++k) {
        double best_bv = -std::numeric_limits<double>::infinity();
        for (int ap = 0; ap < m; ++ap) {
          double bv = ap == rec_a ? marginal * item.payments[rec_a] : 0.0;
          for (int theta = 0; theta < d; ++theta)
            bv += inst.prior[theta] * item.scheme(theta, rec_a) * inst.ub(k, theta, ap);
          best_bv = std::max(best_bv, bv);
        }
        int chosen = -1;
        double chosen_sv = 0.0;
        for (int ap = 0; ap < m; ++ap) {
          double bv = ap == rec_a ? marginal * item.payments[rec_a] : 0.0;
          double sv = ap == rec_a ? -marginal * item.payments[rec_a] : 0.0;
          for (int theta = 0; theta < d; ++theta) {
            bv += inst.prior[theta] * item.scheme(theta, rec_a) * inst.ub(k, theta, ap);
            sv += inst.prior[theta] * item.scheme(theta, rec_a) * inst.us(theta, ap);
          }
          if (bv < best_bv - tol::kEval * marginal) continue;
          if (chosen < 0 || sv > chosen_sv + tol::kEval * marginal) {
            chosen = ap;
            chosen_sv = sv;
          }
        }
        value_u(k, j) += best_bv;
        value_v(k, j) += chosen_sv;
      }
    }
  }

  std::vector<double> outside(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < m; ++a) {
      double v = 0.0;
      for (int theta = 0; theta < d; ++theta) v += inst.prior[theta] * inst.ub(k, theta, a);
      outside[k] = std::max(outside[k], v);
    }

  MenuOracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<int> assign(n, 0);
  std::function<void(int)> rec = [&](int k) {
    if (k < n) {
      for (int j = 0; j < t; ++j) {
        assign[k] = j;
        rec(k + 1);
      }
      return;
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double lhs = value_u(i, assign[i]) - inst.budgets[i];
      if (lhs < outside[i] - tol::kEval) return;   // IR
      for (int ip = 0; ip < n; ++ip)
        if (lhs < value_u(i, assign[ip]) - inst.budgets[ip] - tol::kEval) return;   // IC
      total += inst.type_dist[i] * (value_v(i, assign[i]) + inst.budgets[i]);
    }
    if (total > best.value + 1e-12) {
      best.value = total;
      best.protocol.schemes.clear();
      best.protocol.prices.clear();
      best.protocol.payments.clear();
      for (int i = 0; i < n; ++i) {
        best.protocol.schemes.push_back(item_list[assign[i]].scheme);
        best.protocol.prices.push_back(inst.budgets[i]);
        best.protocol.payments.push_back(item_list[assign[i]].payments);
      }
    }
  };
  rec(0);

  if (!std::isfinite(best.value)) throw NumericalFailure("menu oracle found no feasible assignment");
  return best;
}

// ---------------------------------------------------------------------------
// Certification. Deliberately re-implements the evaluation from the raw
// definitions instead of calling into the belief module.

namespace {

void push_item(CertReport& report, const std::string& name, double slack) {
  const bool pass = slack >= -tol::kEval;
  report.items.push_back({name, pass, slack});
  report.ok = report.ok && pass;
}

}  // namespace

CertReport certify_menu(const Instance& inst, const MenuProtocol& proto) {
  const int n = inst.n(), m = inst.m(), d = inst.d();
  CertReport report;

  double min_pay = std::numeric_limits<double>::infinity();
  for (const auto& pay : proto.payments)
    for (double p : pay) min_pay = std::min(min_pay, p);
  push_item(report, "payments_nonnegative", min_pay);

  double min_price = std::numeric_limits<double>::infinity();
  for (double p : proto.prices) min_price = std::min(min_price, p);
  push_item(report, "prices_nonnegative", min_price);

  double row_gap = 0.0;
  for (const Matrix& scheme : proto.schemes)
    for (int theta = 0; theta < d; ++theta) {
      double sum = 0.0;
      for (int a = 0; a < m; ++a) sum += scheme(theta, a);
      row_gap = std::max(row_gap, std::abs(sum - 1.0));
    }
  push_item(report, "schemes_row_stochastic", tol::kPosterior - row_gap);

  // Type k's optimal aggregated value from item j, and the seller's term when
  // k follows its own item with seller-favoring ties.
  auto item_value = [&](int k, int j) {
    double total = 0.0;
    for (int rec = 0; rec < m; ++rec) {
      double best_bv = -std::numeric_limits<double>::infinity();
      for (int ap = 0; ap < m; ++ap) {
        double bv = 0.0;
        for (int theta = 0; theta < d; ++theta)
          bv += inst.prior[theta] * proto.schemes[j](theta, rec) * inst.ub(k, theta, ap);
        if (ap == rec) {
          double marginal = 0.0;
          for (int theta = 0; theta < d; ++theta)
            marginal += inst.prior[theta] * proto.schemes[j](theta, rec);
          bv += marginal * proto.payments[j][rec];
        }
        best_bv = std::max(best_bv, bv);
      }
      total += best_bv;
    }
    return total;
  };

  double ic_slack = std::numeric_limits<double>::infinity();
  double ir_slack = std::numeric_limits<double>::infinity();
  double utility = 0.0;
  for (int k = 0; k < n; ++k) {
    const double lhs = item_value(k, k) - proto.prices[k];
    for (int j = 0; j < n; ++j)
      ic_slack = std::min(ic_slack, lhs - (item_value(k, j) - proto.prices[j]));
    double outside = 0.0;
    for (int a = 0; a < m; ++a) {
      double v = 0.0;
      for (int theta = 0; theta < d; ++theta) v += inst.prior[theta] * inst.ub(k, theta, a);
      outside = std::max(outside, v);
    }
    ir_slack = std::min(ir_slack, lhs - outside);

    double seller_term = proto.prices[k];
    for (int rec = 0; rec < m; ++rec) {
      double marginal = 0.0;
      for (int theta = 0; theta < d; ++theta)
        marginal += inst.prior[theta] * proto.schemes[k](theta, rec);
      if (marginal <= 1e-15) continue;
      double best_bv = -std::numeric_limits<double>::infinity();
      for (int ap = 0; ap < m; ++ap) {
        double bv = ap == rec ? marginal * proto.payments[k][rec] : 0.0;
        for (int theta = 0; theta < d; ++theta)
          bv += inst.prior[theta] * proto.schemes[k](theta, rec) * inst.ub(k, theta, ap);
        best_bv = std::max(best_bv, bv);
      }
      int chosen = -1;
      double chosen_sv = 0.0;
      for (int ap = 0; ap < m; ++ap) {
        double bv = ap == rec ? marginal * proto.payments[k][rec] : 0.0;
        double sv = ap == rec ? -marginal * proto.payments[k][rec] : 0.0;
        for (int theta = 0; theta < d; ++theta) {
          bv += inst.prior[theta] * proto.schemes[k](theta, rec) * inst.ub(k, theta, ap);
          sv += inst.prior[theta] * proto.schemes[k](theta, rec) * inst.us(theta, ap);
        }
        if (bv < best_bv - tol::kEval * std::max(marginal, 1e-12)) continue;
        if (chosen < 0 || sv > chosen_sv + tol::kEval * std::max(marginal, 1e-12)) {
          chosen = ap;
          chosen_sv = sv;
        }
      }
      seller_term += chosen_sv;
    }
    utility += inst.type_dist[k] * seller_term;
  }
  push_item(report, "ic", ic_slack);
  push_item(report, "ir", ir_slack);

  // Persuasiveness of the stated recommendations (normal-form invariant).
  double pers_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    for (int rec = 0; rec < m; ++rec) {
      double marginal = 0.0;
      for (int theta = 0; theta < d; ++theta)
        marginal += inst.prior[theta] * proto.schemes[k](theta, rec);
      if (marginal <= tol::kEval) continue;
      double obey = marginal * proto.payments[k][rec];
      for (int theta = 0; theta < d; ++theta)
        obey += inst.prior[theta] * proto.schemes[k](theta, rec) * inst.ub(k, theta, rec);
      for (int ap = 0; ap < m; ++ap) {
        if (ap == rec) continue;
        double dev = 0.0;
        for (int theta = 0; theta < d; ++theta)
          dev += inst.prior[theta] * proto.schemes[k](theta, rec) * inst.ub(k, theta, ap);
        pers_slack = std::min(pers_slack, obey - dev);
      }
    }
  if (!std::isfinite(pers_slack)) pers_slack = 0.0;
  report.items.push_back({"persuasiveness", pers_slack >= -tol::kLpFeas, pers_slack});
  report.ok = report.ok && pers_slack >= -tol::kLpFeas;

  report.utility = utility;
  return report;
}

CertReport certify_nomenu(const Instance& inst, const NoMenuProtocol& proto) {
  const int n = inst.n(), m = inst.m(), d = inst.d();
  CertReport report;

  double min_pay = std::numeric_limits<double>::infinity();
  double min_weight = std::numeric_limits<double>::infinity();
  double norm_gap = 0.0;
  for (const NoMenuSignal& s : proto.signals) {
    for (double p : s.payments) min_pay = std::min(min_pay, p);
    min_weight = std::min(min_weight, s.weight);
    double sum = 0.0;
    for (double p : s.posterior.probs) sum += p;
    norm_gap = std::max(norm_gap, std::abs(sum - 1.0));
  }
  if (proto.signals.empty()) min_pay = min_weight = 0.0;
  push_item(report, "payments_nonnegative", min_pay);
  push_item(report, "weights_nonnegative", min_weight);
  push_item(report, "price_nonnegative", proto.price);
  push_item(report, "posteriors_normalized", tol::kPosterior - norm_gap);

  double consistency = 0.0;
  for (int theta = 0; theta < d; ++theta) {
    double mass = 0.0;
    for (const NoMenuSignal& s : proto.signals) mass += s.weight * s.posterior[theta];
    consistency = std::max(consistency, std::abs(mass - inst.prior[theta]));
  }
  push_item(report, "consistency_with_prior", tol::kPosterior - consistency);

  // IR set and utility from the raw definitions.
  double ir_slack = std::numeric_limits<double>::infinity();
  double utility = 0.0;
  for (int k = 0; k < n; ++k) {
    double outside_bv = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a) {
      double v = 0.0;
      for (int theta = 0; theta < d; ++theta) v += inst.prior[theta] * inst.ub(k, theta, a);
      outside_bv = std::max(outside_bv, v);
    }
    int outside_a = -1;
    double outside_sv = 0.0;
    for (int a = 0; a < m; ++a) {
      double bv = 0.0, sv = 0.0;
      for (int theta = 0; theta < d; ++theta) {
        bv += inst.prior[theta] * inst.ub(k, theta, a);
        sv += inst.prior[theta] * inst.us(theta, a);
      }
      if (bv < outside_bv - tol::kEval) continue;
      if (outside_a < 0 || sv > outside_sv + tol::kEval) {
        outside_a = a;
        outside_sv = sv;
      }
    }

    double in_bv = -proto.price;
    double in_sv = proto.price;
    for (const NoMenuSignal& s : proto.signals) {
      double best_bv = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) {
        double bv = s.payments[a];
        for (int theta = 0; theta < d; ++theta) bv += s.posterior[theta] * inst.ub(k, theta, a);
        best_bv = std::max(best_bv, bv);
      }
      int chosen = -1;
      double chosen_sv = 0.0;
      for (int a = 0; a < m; ++a) {
        double bv = s.payments[a];
        double sv = -s.payments[a];
        for (int theta = 0; theta < d; ++theta) {
          bv += s.posterior[theta] * inst.ub(k, theta, a);
          sv += s.posterior[theta] * inst.us(theta, a);
        }
        if (bv < best_bv - tol::kEval) continue;
        if (chosen < 0 || sv > chosen_sv + tol::kEval) {
          chosen = a;
          chosen_sv = sv;
        }
      }
      in_bv += s.weight * best_bv;
      in_sv += s.weight * chosen_sv;
    }

    bool participates = false;
    if (inst.budgets[k] >= proto.price - tol::kProb) {
      if (in_bv > outside_bv + tol::kEval)
        participates = true;
      else if (in_bv >= outside_bv - tol::kEval)
        participates = in_sv >= outside_sv;
    }
    if (participates) {
      ir_slack = std::min(ir_slack, in_bv - outside_bv);
      utility += inst.type_dist[k] * in_sv;
    } else {
      utility += inst.type_dist[k] * outside_sv;
    }
  }
  if (!std::isfinite(ir_slack)) ir_slack = 0.0;
  report.items.push_back({"ir_members", ir_slack >= -tol::kEval, ir_slack});
  report.ok = report.ok && ir_slack >= -tol::kEval;
  report.utility = utility;
  return report;
}

std::string cert_report_to_json_text(const CertReport& report) {
  json j;
  j["schema_version"] = "1";
  j["ok"] = report.ok;
  j["utility"] = report.utility;
  json items = json::array();
  for (const CertItem& item : report.items)
    items.push_back({{"name", item.name}, {"pass", item.pass}, {"slack", item.slack}});
  j["items"] = std::move(items);
  return j.dump(2);
}

}  // namespace infosell
