#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "infosell/belief.hpp"
#include "infosell/payment_opt.hpp"
#include "infosell/principal_agent.hpp"
#include "testutil.hpp"

using namespace infosell;

namespace {

double contract_grid_oracle(const PAInstance& pa, double step) {
  const int m = pa.m();
  const int levels = static_cast<int>(std::llround(1.0 / step)) + 1;
  std::vector<int> idx(m, 0);
  double best = -1e30;
  while (true) {
    Contract c;
    c.payments.resize(m);
    for (int a = 0; a < m; ++a) c.payments[a] = idx[a] * step;
    best = std::max(best, evaluate_contract(pa, c).value);
    int pos = 0;
    while (pos < m && ++idx[pos] == levels) idx[pos++] = 0;
    if (pos == m) break;
  }
  return best;
}

}  // namespace

TEST_CASE("to_pa on the illustrative posterior") {
  const Instance inst = testutil::illustrative_single_type();
  const PAInstance pa = to_pa(inst, Posterior{{0.5, 0.5}});
  CHECK(pa.costs(0, 0) == doctest::Approx(0.0));
  CHECK(pa.costs(0, 1) == doctest::Approx(0.5));
  CHECK(pa.rewards[0] == doctest::Approx(0.0));
  CHECK(pa.rewards[1] == doctest::Approx(1.0));
}

TEST_CASE("to_pa: indifferent buyer has zero costs, null seller zero rewards") {
  Instance inst = testutil::illustrative_single_type();
  inst.buyer_utility[0] = testutil::constant_rows(2, {0.4, 0.4});
  inst.seller_utility = testutil::constant_rows(2, {0.0, 0.0});
  const PAInstance pa = to_pa(inst, Posterior{{0.25, 0.75}});
  for (int a = 0; a < pa.m(); ++a) {
    CHECK(pa.costs(0, a) == doctest::Approx(0.0));
    CHECK(pa.rewards[a] == doctest::Approx(0.0));
  }
}

TEST_CASE("from_pa shape: one state, zero budgets") {
  PAInstance pa;
  pa.types = {"k1"};
  pa.actions = {"a1", "a2"};
  pa.type_dist = {1.0};
  pa.costs = testutil::constant_rows(1, {0.0, 0.5});
  pa.rewards = {0.0, 1.0};
  const Instance inst = from_pa(pa);
  CHECK(inst.d() == 1);
  CHECK(inst.limited_liability());
  CHECK(inst.ub(0, 0, 0) == doctest::Approx(1.0));
  CHECK(inst.ub(0, 0, 1) == doctest::Approx(0.5));
  CHECK(validate(inst).ok());
}

TEST_CASE("round trip: to_pa(from_pa(pa)) at the point mass reproduces pa") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + rng.uniform_int(3), m = 2 + rng.uniform_int(3);
    PAInstance pa;
    for (int k = 0; k < n; ++k) pa.types.push_back("k" + std::to_string(k));
    for (int a = 0; a < m; ++a) pa.actions.push_back("a" + std::to_string(a));
    pa.type_dist = rng.simplex(n);
    pa.costs = Matrix(n, m);
    pa.rewards.resize(m);
    for (int a = 0; a < m; ++a) pa.rewards[a] = rng.uniform();
    for (int k = 0; k < n; ++k) {
      const int free = rng.uniform_int(m);   // keep one zero-cost action per type
      for (int a = 0; a < m; ++a) pa.costs(k, a) = a == free ? 0.0 : rng.uniform();
    }
    const PAInstance back = to_pa(from_pa(pa), Posterior{{1.0}});
    for (int a = 0; a < m; ++a) CHECK(back.rewards[a] == doctest::Approx(pa.rewards[a]));
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < m; ++a) CHECK(back.costs(k, a) == doctest::Approx(pa.costs(k, a)));
  }
}

TEST_CASE("optimal contract on the illustrative reduction") {
  PAInstance pa;
  pa.types = {"k1"};
  pa.actions = {"a1", "a2"};
  pa.type_dist = {1.0};
  pa.costs = testutil::constant_rows(1, {0.0, 0.5});
  pa.rewards = {0.0, 1.0};
  const ContractSolve solved = optimal_contract(pa);
  CHECK(solved.value == doctest::Approx(0.5));
  CHECK(solved.contract.payments[1] == doctest::Approx(0.5));
  CHECK(solved.induced[0] == 1);
}

TEST_CASE("zero rewards admit the zero contract") {
  PAInstance pa;
  pa.types = {"k1", "k2"};
  pa.actions = {"a1", "a2"};
  pa.type_dist = {0.5, 0.5};
  pa.costs = testutil::constant_rows(2, {0.0, 0.3});
  pa.rewards = {0.0, 0.0};
  const ContractSolve solved = optimal_contract(pa);
  CHECK(solved.value == doctest::Approx(0.0));
}

TEST_CASE("optimal contract matches the 0.01 contract grid within 0.03") {
  Rng rng(410);
  for (int trial = 0; trial < 10; ++trial) {
    PAInstance pa;
    pa.types = {"k1", "k2"};
    pa.actions = {"a1", "a2", "a3"};
    pa.type_dist = rng.simplex(2);
    pa.costs = Matrix(2, 3);
    pa.rewards.resize(3);
    for (int a = 0; a < 3; ++a) pa.rewards[a] = rng.uniform();
    for (int k = 0; k < 2; ++k) {
      const int free = rng.uniform_int(3);
      for (int a = 0; a < 3; ++a) pa.costs(k, a) = a == free ? 0.0 : rng.uniform();
    }
    const ContractSolve solved = optimal_contract(pa);
    const double grid = contract_grid_oracle(pa, 0.01);
    CHECK(solved.value >= grid - 1e-9);
    CHECK(std::abs(solved.value - grid) < 0.03);
  }
}

TEST_CASE("linear contracts: boundaries and the rho = 1/4 bound") {
  Rng rng(888);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + rng.uniform_int(2), m = 2 + rng.uniform_int(2);
    PAInstance pa;
    for (int k = 0; k < n; ++k) pa.types.push_back("k");
    for (int a = 0; a < m; ++a) pa.actions.push_back("a");
    pa.type_dist = rng.simplex(n);
    pa.costs = Matrix(n, m);
    pa.rewards.resize(m);
    for (int a = 0; a < m; ++a) pa.rewards[a] = rng.uniform();
    for (int k = 0; k < n; ++k) {
      const int free = rng.uniform_int(m);
      for (int a = 0; a < m; ++a) pa.costs(k, a) = a == free ? 0.0 : rng.uniform();
    }

    CHECK(linear_contract(pa, 0.0).contract.payments == std::vector<double>(m, 0.0));
    CHECK(linear_contract(pa, 1.0).value == doctest::Approx(0.0).epsilon(1e-9));

    const double opt = optimal_contract(pa).value;
    double best_grid = -1e30;
    for (double beta : beta_grid(0.25))
      best_grid = std::max(best_grid, linear_contract(pa, beta).value);
    CHECK(best_grid >= 0.25 * opt - 0.25 - 1e-9);
  }
}

TEST_CASE("best-response sets coincide across the reduction") {
  Rng rng(3131);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + rng.uniform_int(3);
    const Instance inst =
        random_instance(d, 2 + rng.uniform_int(2), 1 + rng.uniform_int(2), 900 + trial, true);
    const Posterior xi{rng.simplex(d)};
    const PAInstance pa = to_pa(inst, xi);
    std::vector<double> pay(inst.m());
    for (double& p : pay) p = rng.uniform();
    for (int k = 0; k < inst.n(); ++k) {
      // Selling side: argmax of E_xi u^k + pi; PA side: argmax of pi - c.
      std::vector<int> sell, agent;
      double best_sell = -1e30, best_agent = -1e30;
      std::vector<double> sv(inst.m()), av(inst.m());
      for (int a = 0; a < inst.m(); ++a) {
        double v = pay[a];
        for (int theta = 0; theta < d; ++theta) v += xi[theta] * inst.ub(k, theta, a);
        sv[a] = v;
        av[a] = pay[a] - pa.costs(k, a);
        best_sell = std::max(best_sell, sv[a]);
        best_agent = std::max(best_agent, av[a]);
      }
      for (int a = 0; a < inst.m(); ++a) {
        if (sv[a] >= best_sell - 1e-9) sell.push_back(a);
        if (av[a] >= best_agent - 1e-9) agent.push_back(a);
      }
      CHECK(sell == agent);
    }
  }
}

TEST_CASE("principal-agent JSON round trip") {
  PAInstance pa;
  pa.types = {"k1", "k2"};
  pa.actions = {"a1", "a2"};
  pa.type_dist = {0.25, 0.75};
  pa.costs = testutil::constant_rows(2, {0.0, 0.125});
  pa.rewards = {0.5, 1.0};
  const PAInstance back = pa_from_json_text(pa_to_json_text(pa));
  CHECK(back.types == pa.types);
  CHECK(back.type_dist == pa.type_dist);
  CHECK(back.costs == pa.costs);
  CHECK(back.rewards == pa.rewards);
}
