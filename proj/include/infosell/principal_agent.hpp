#pragma once

#include <string>
#include <vector>

#include "infosell/common.hpp"
#include "infosell/instance.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

// Observable-action principal-agent problem: typed agent with action costs in
// [0,1], principal rewards in [0,1], contract = per-action payment.
struct PAInstance {
  std::vector<std::string> types;
  std::vector<std::string> actions;
  std::vector<double> type_dist;
  Matrix costs;                  // n x m
  std::vector<double> rewards;   // m

  int n() const { return static_cast<int>(types.size()); }
  int m() const { return static_cast<int>(actions.size()); }
};

struct Contract {
  std::vector<double> payments;
};

struct ContractSolve {
  Contract contract;
  std::vector<int> induced;   // agent best responses, ties favor the principal
  double value = 0.0;         // sum_k lambda_k [ r(b_k) - pi(b_k) ]
};

// Reduction from a posterior of a selling instance: costs are the buyer's
// posterior regret against the zero-payment best response, rewards the
// seller's posterior-expected utility.
PAInstance to_pa(const Instance& inst, const Posterior& xi);

// Reverse reduction: a one-state limited-liability selling instance with
// u^s = r and u^k = 1 - c^k.
Instance from_pa(const PAInstance& pa);

// Agent best response under a contract; ties favor the principal, then the
// lowest action index.
int pa_best_response(const PAInstance& pa, const Contract& contract, int k);

// Evaluates a contract (induced actions and principal value).
ContractSolve evaluate_contract(const PAInstance& pa, Contract contract);

// Optimal contract via the selling-side vertex enumeration through from_pa;
// one enumeration code path serves both problems.
ContractSolve optimal_contract(const PAInstance& pa, std::size_t cap = Caps{}.vertex);

// Linear contract pi(a) = beta * r_a.
ContractSolve linear_contract(const PAInstance& pa, double beta);

// JSON schema mirroring the selling instance; used by the CLI convert command.
std::string pa_to_json_text(const PAInstance& pa);
PAInstance pa_from_json_text(const std::string& text);
PAInstance load_pa(const std::string& path);
void save_pa(const PAInstance& pa, const std::string& path);

}  // namespace infosell
