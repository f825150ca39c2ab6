#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "infosell/belief.hpp"
#include "infosell/instance.hpp"
#include "testutil.hpp"

using namespace infosell;

TEST_CASE("bayes posterior: full revelation and uninformative schemes") {
  const std::vector<double> uniform = {0.5, 0.5};
  const Posterior revealed = bayes_posterior(testutil::full_revelation(2), uniform, 0);
  CHECK(revealed[0] == doctest::Approx(1.0));
  CHECK(revealed[1] == doctest::Approx(0.0));

  const std::vector<double> mu = {0.3, 0.7};
  const Posterior same = bayes_posterior(testutil::uninformative(2), mu, 0);
  CHECK(same[0] == doctest::Approx(0.3));
  CHECK(same[1] == doctest::Approx(0.7));
}

TEST_CASE("bayes posterior matches hand computation and a frequency simulation") {
  // phi_theta1(s1) = 0.5, phi_theta2(s1) = 0.25, uniform prior: xi = (2/3, 1/3).
  Matrix phi(2, 2);
  phi(0, 0) = 0.5;
  phi(0, 1) = 0.5;
  phi(1, 0) = 0.25;
  phi(1, 1) = 0.75;
  const std::vector<double> mu = {0.5, 0.5};
  const Posterior xi = bayes_posterior(phi, mu, 0);
  CHECK(xi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(xi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Monte Carlo cross-check: draw (theta, signal) pairs and condition on s1.
  Rng rng(12345);
  long long hits_theta1 = 0, hits_total = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const int theta = rng.uniform() < 0.5 ? 0 : 1;
    const double p_signal = theta == 0 ? 0.5 : 0.25;
    if (rng.uniform() < p_signal) {
      ++hits_total;
      if (theta == 0) ++hits_theta1;
    }
  }
  const double freq = static_cast<double>(hits_theta1) / hits_total;
  CHECK(std::abs(freq - xi[0]) < 3e-3);

  // Signal marginals for the same table: (0.375, 0.625).
  const PosteriorDistribution dist = induced_distribution(phi, mu);
  REQUIRE(dist.size() == 2);
  CHECK(dist.weights[0] == doctest::Approx(0.375));
  CHECK(dist.weights[1] == doctest::Approx(0.625));
  CHECK(consistency_gap(dist, mu) < 1e-12);
}

TEST_CASE("zero-mass signal raises") {
  Matrix phi(2, 2, 0.0);
  phi(0, 0) = 1.0;
  phi(1, 0) = 1.0;
  const std::vector<double> mu = {0.5, 0.5};
  CHECK_THROWS_AS(bayes_posterior(phi, mu, 1), ZeroMassSignal);
  // induced_distribution drops the degenerate signal instead.
  CHECK(induced_distribution(phi, mu).size() == 1);
}

TEST_CASE("induced distribution: revelation and identity") {
  const std::vector<double> uniform = {0.5, 0.5};
  const PosteriorDistribution rev = induced_distribution(testutil::full_revelation(2), uniform);
  REQUIRE(rev.size() == 2);
  CHECK(rev.weights[0] == doctest::Approx(0.5));
  CHECK(rev.support[0][0] == doctest::Approx(1.0));

  const PosteriorDistribution none = induced_distribution(testutil::uninformative(2), uniform);
  REQUIRE(none.size() == 1);
  CHECK(none.weights[0] == doctest::Approx(1.0));
  CHECK(none.support[0][0] == doctest::Approx(0.5));
}

TEST_CASE("best response: seller-favoring tie on the illustrative example") {
  const Instance inst = testutil::illustrative_single_type();
  const Posterior point{{1.0, 0.0}};
  // Payment 0.5 on a2 makes the buyer indifferent; the seller nets 0.5 there.
  const std::vector<double> payments = {0.0, 0.5};
  CHECK(best_response(inst, point, payments, 0, 0.0) == 1);
  // Without payments the dominant action a1 wins for any posterior.
  CHECK(best_response(inst, point, {}, 0, 0.0) == 0);
  CHECK(best_response_no_payment(inst, Posterior{{0.5, 0.5}}, 0) == 0);
}

TEST_CASE("best response: full relaxation returns the seller-best action") {
  const Instance inst = testutil::illustrative_single_type();
  const Posterior mu{{0.5, 0.5}};
  // eps = 1 makes every action eligible; a2 maximizes the seller's utility.
  CHECK(best_response(inst, mu, std::vector<double>(2, 0.0), 0, 1.0) == 1);
}

TEST_CASE("best response: seller-favoring tie between equal-value actions") {
  Instance inst = testutil::illustrative_single_type();
  inst.buyer_utility[0] = testutil::constant_rows(2, {0.5, 0.5});
  const Posterior mu{{0.5, 0.5}};
  CHECK(best_response_no_payment(inst, mu, 0) == 1);   // u^s prefers a2
}

TEST_CASE("single-action instance returns that action") {
  Instance inst;
  inst.states = {"t"};
  inst.actions = {"a"};
  inst.types = {"k"};
  inst.prior = {1.0};
  inst.type_dist = {1.0};
  inst.seller_utility = Matrix(1, 1, 0.7);
  inst.buyer_utility = {Matrix(1, 1, 0.2)};
  inst.budgets = {0.0};
  CHECK(best_response_no_payment(inst, Posterior{{1.0}}, 0) == 0);
}

TEST_CASE("epsilon monotonicity: the 0-best-response set stays eligible") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_instance(2, 3, 2, 1000 + trial, false);
    std::vector<double> probs = rng.simplex(2);
    const Posterior xi{probs};
    std::vector<double> pay(3);
    for (double& p : pay) p = rng.uniform();
    for (int k = 0; k < inst.n(); ++k) {
      // Collect the eps-best-response sets by enumeration.
      auto eligible = [&](double eps) {
        std::vector<int> set;
        double best = -1.0;
        std::vector<double> vals(inst.m());
        for (int a = 0; a < inst.m(); ++a) {
          double v = pay[a];
          for (int theta = 0; theta < inst.d(); ++theta) v += xi[theta] * inst.ub(k, theta, a);
          vals[a] = v;
          best = std::max(best, v);
        }
        for (int a = 0; a < inst.m(); ++a)
          if (vals[a] >= best - eps - 1e-9) set.push_back(a);
        return set;
      };
      const auto exact = eligible(0.0);
      const auto relaxed = eligible(0.25);
      for (int a : exact) CHECK(std::count(relaxed.begin(), relaxed.end(), a) == 1);
      // The chosen response is always eligible at its own eps.
      const int chosen = best_response(inst, xi, pay, k, 0.25);
      CHECK(std::count(relaxed.begin(), relaxed.end(), chosen) == 1);
    }
  }
}

TEST_CASE("eval_nomenu: illustrative protocol is worth 0.5") {
  const Instance inst = testutil::illustrative_single_type();
  NoMenuProtocol proto;
  proto.price = 0.0;
  for (int theta = 0; theta < 2; ++theta) {
    NoMenuSignal s;
    s.weight = 0.5;
    std::vector<double> point(2, 0.0);
    point[theta] = 1.0;
    s.posterior = Posterior{point};
    s.payments = {0.0, 0.5};
    proto.signals.push_back(std::move(s));
  }
  const NoMenuEval ev = eval_nomenu(inst, proto);
  CHECK(ev.utility == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ev.ir_set == std::vector<int>{0});
}

TEST_CASE("eval_nomenu: no-information protocol collapses to the baseline") {
  const Instance inst = testutil::illustrative_two_type();
  const NoMenuEval ev = eval_nomenu(inst, no_info_protocol(inst));
  CHECK(ev.utility == doctest::Approx(no_info_baseline(inst)).epsilon(1e-12));
  // Both buyer types play a1, worth 0 to the seller.
  CHECK(ev.utility == doctest::Approx(0.0));
}

TEST_CASE("eval_nomenu: price above all budgets empties the IR set") {
  Instance inst = testutil::illustrative_single_type();
  inst.budgets = {0.3};
  NoMenuProtocol proto = no_info_protocol(inst);
  proto.price = 0.9;
  const NoMenuEval ev = eval_nomenu(inst, proto);
  CHECK(ev.ir_set.empty());
  CHECK(ev.utility == doctest::Approx(no_info_baseline(inst)));
}

TEST_CASE("eval_menu: the two-type menu with a paid a2 recommendation is IC and IR") {
  const Instance inst = testutil::illustrative_two_type();
  // Normal form of the paper's protocol: payments are diagonal, so paying 0.5
  // on a2 at every signal becomes the always-recommend-a2 scheme for k1.
  Matrix recommend_a2(2, 2, 0.0);
  recommend_a2(0, 1) = 1.0;
  recommend_a2(1, 1) = 1.0;
  Matrix recommend_a1(2, 2, 0.0);
  recommend_a1(0, 0) = 1.0;
  recommend_a1(1, 0) = 1.0;
  MenuProtocol proto;
  proto.schemes = {recommend_a2, recommend_a1};
  proto.prices = {0.0, 0.0};
  proto.payments = {{0.0, 0.5}, {0.0, 0.0}};
  const MenuEval ev = eval_menu(inst, proto);
  CHECK(ev.ic_ok);
  CHECK(ev.ir_ok);
  // k1 is paid to play a2 (0.5 to the seller), k2 keeps playing a1.
  CHECK(ev.utility == doctest::Approx(0.25));
}

TEST_CASE("eval_menu: constructed IC violation is detected") {
  const Instance inst = testutil::illustrative_two_type();
  MenuProtocol proto;
  proto.schemes = {testutil::full_revelation(2), testutil::full_revelation(2)};
  proto.prices = {0.5, 0.0};   // k1 pays for the same scheme k2 gets free
  proto.payments = {{0.0, 0.0}, {0.0, 0.0}};
  const MenuEval ev = eval_menu(inst, proto);
  CHECK_FALSE(ev.ic_ok);
}

TEST_CASE("eval_menu: uninformative zero-price menu sits on the IR boundary") {
  const Instance inst = testutil::illustrative_two_type();
  MenuProtocol proto;
  Matrix scheme(2, 2, 0.0);
  scheme(0, 0) = 1.0;
  scheme(1, 0) = 1.0;   // always recommend a1
  proto.schemes = {scheme, scheme};
  proto.prices = {0.0, 0.0};
  proto.payments = {{0.0, 0.0}, {0.0, 0.0}};
  const MenuEval ev = eval_menu(inst, proto);
  CHECK(ev.ir_ok);
  CHECK(ev.worst_ir_slack == doctest::Approx(0.0));
}
