#pragma once

#include <string>
#include <vector>

#include "infosell/common.hpp"
#include "infosell/instance.hpp"

namespace infosell {

// Point of the belief simplex over states.
struct Posterior {
  std::vector<double> probs;

  int dim() const { return static_cast<int>(probs.size()); }
  double operator[](int theta) const { return probs[theta]; }
};

// Clamps tiny negatives to zero and checks normalization within 1e-9.
Posterior make_posterior(std::vector<double> probs);

// Finite distribution over posteriors. Consistency with a prior mu means
// sum_xi gamma_xi * xi_theta = mu_theta for every state.
struct PosteriorDistribution {
  std::vector<Posterior> support;
  std::vector<double> weights;

  int size() const { return static_cast<int>(support.size()); }
};

// Worst absolute deviation from the consistency condition against mu.
double consistency_gap(const PosteriorDistribution& dist, const std::vector<double>& mu);

// Protocol with menus in normal form: per type a direct scheme phi^k (rows
// over states, columns over recommended actions), the price p_k, and the
// diagonal payments pi_k(a) for obeying recommendation a (off-recommendation
// payments are identically zero).
struct MenuProtocol {
  std::vector<Matrix> schemes;                 // n entries, each d x m
  std::vector<double> prices;                  // n
  std::vector<std::vector<double>> payments;   // n entries, each size m
};

// One support atom of a protocol without menus: a posterior reached with
// probability `weight` and the payment row applied there. `label` optionally
// records the generalized-direct action tuple (one recommendation per type).
struct NoMenuSignal {
  double weight = 0.0;
  Posterior posterior;
  std::vector<double> payments;   // size m
  std::vector<int> label;         // size n when generalized-direct, else empty
};

struct NoMenuProtocol {
  std::vector<NoMenuSignal> signals;
  double price = 0.0;

  PosteriorDistribution distribution() const {
    PosteriorDistribution dist;
    for (const NoMenuSignal& s : signals) {
      dist.support.push_back(s.posterior);
      dist.weights.push_back(s.weight);
    }
    return dist;
  }
};

// Protocol JSON, shared between the solvers and the CLI. Menu protocols are
// keyed by type id; no-menu protocols list their support.
std::string menu_protocol_to_json_text(const Instance& inst, const MenuProtocol& proto);
MenuProtocol menu_protocol_from_json_text(const Instance& inst, const std::string& text);
std::string nomenu_protocol_to_json_text(const NoMenuProtocol& proto);
NoMenuProtocol nomenu_protocol_from_json_text(const std::string& text);

}  // namespace infosell
