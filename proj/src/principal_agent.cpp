#include "infosell/principal_agent.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "infosell/belief.hpp"
#include "infosell/payment_opt.hpp"

namespace infosell {

using nlohmann::json;

PAInstance to_pa(const Instance& inst, const Posterior& xi) {
  PAInstance pa;
  pa.types = inst.types;
  pa.actions = inst.actions;
  pa.type_dist = inst.type_dist;
  pa.costs = Matrix(inst.n(), inst.m());
  pa.rewards.assign(inst.m(), 0.0);
  for (int a = 0; a < inst.m(); ++a)
    for (int theta = 0; theta < inst.d(); ++theta)
      pa.rewards[a] += xi[theta] * inst.us(theta, a);
  for (int k = 0; k < inst.n(); ++k) {
    const int br = best_response_no_payment(inst, xi, k);
    double br_value = 0.0;
    for (int theta = 0; theta < inst.d(); ++theta) br_value += xi[theta] * inst.ub(k, theta, br);
    for (int a = 0; a < inst.m(); ++a) {
      double v = 0.0;
      for (int theta = 0; theta < inst.d(); ++theta) v += xi[theta] * inst.ub(k, theta, a);
      pa.costs(k, a) = br_value - v;
    }
  }
  return pa;
}

Instance from_pa(const PAInstance& pa) {
  Instance inst;
  inst.states = {"theta1"};
  inst.actions = pa.actions;
  inst.types = pa.types;
  inst.prior = {1.0};
  inst.type_dist = pa.type_dist;
  inst.seller_utility = Matrix(1, pa.m());
  for (int a = 0; a < pa.m(); ++a) inst.seller_utility(0, a) = pa.rewards[a];
  for (int k = 0; k < pa.n(); ++k) {
    Matrix u(1, pa.m());
    for (int a = 0; a < pa.m(); ++a) u(0, a) = 1.0 - pa.costs(k, a);
    inst.buyer_utility.push_back(std::move(u));
  }
  inst.budgets.assign(pa.n(), 0.0);
  return inst;
}

int pa_best_response(const PAInstance& pa, const Contract& contract, int k) {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < pa.m(); ++a)
    best = std::max(best, contract.payments[a] - pa.costs(k, a));
  int chosen = -1;
  double chosen_pv = 0.0;
  for (int a = 0; a < pa.m(); ++a) {
    if (contract.payments[a] - pa.costs(k, a) < best - tol::kEval) continue;
    const double pv = pa.rewards[a] - contract.payments[a];
    if (chosen < 0 || pv > chosen_pv + tol::kEval) {
      chosen = a;
      chosen_pv = pv;
    }
  }
  return chosen;
}

ContractSolve evaluate_contract(const PAInstance& pa, Contract contract) {
  ContractSolve out;
  out.contract = std::move(contract);
  out.induced.resize(pa.n());
  for (int k = 0; k < pa.n(); ++k) {
    const int br = pa_best_response(pa, out.contract, k);
    out.induced[k] = br;
    out.value += pa.type_dist[k] * (pa.rewards[br] - out.contract.payments[br]);
  }
  return out;
}

ContractSolve optimal_contract(const PAInstance& pa, std::size_t cap) {
  const Instance inst = from_pa(pa);
  const Posterior xi{{1.0}};
  const PosteriorPayment pp = optimal_payment_in_posterior(inst, xi, cap);
  return evaluate_contract(pa, Contract{pp.payments});
}

ContractSolve linear_contract(const PAInstance& pa, double beta) {
  Contract contract;
  contract.payments.resize(pa.m());
  for (int a = 0; a < pa.m(); ++a) contract.payments[a] = beta * pa.rewards[a];
  return evaluate_contract(pa, std::move(contract));
}

std::string pa_to_json_text(const PAInstance& pa) {
  json j;
  j["schema_version"] = "1";
  j["kind"] = "principal_agent";
  j["types"] = pa.types;
  j["actions"] = pa.actions;
  j["type_dist"] = pa.type_dist;
  json costs = json::array();
  for (int k = 0; k < pa.n(); ++k) {
    json row = json::array();
    for (int a = 0; a < pa.m(); ++a) row.push_back(pa.costs(k, a));
    costs.push_back(std::move(row));
  }
  j["costs"] = std::move(costs);
  j["rewards"] = pa.rewards;
  return j.dump(2);
}

PAInstance pa_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("principal-agent parse error: ") + e.what());
  }
  auto require = [&](const char* name) -> const json& {
    auto it = j.find(name);
    if (it == j.end()) throw SchemaError(std::string("missing field: ") + name);
    return *it;
  };
  if (require("schema_version").get<std::string>() != "1")
    throw SchemaError("unsupported schema_version");
  PAInstance pa;
  pa.types = require("types").get<std::vector<std::string>>();
  pa.actions = require("actions").get<std::vector<std::string>>();
  pa.type_dist = require("type_dist").get<std::vector<double>>();
  const json& costs = require("costs");
  pa.costs = Matrix(static_cast<int>(costs.size()),
                    costs.empty() ? 0 : static_cast<int>(costs[0].size()));
  for (int k = 0; k < pa.costs.rows(); ++k)
    for (int a = 0; a < pa.costs.cols(); ++a) pa.costs(k, a) = costs[k][a].get<double>();
  pa.rewards = require("rewards").get<std::vector<double>>();
  return pa;
}

PAInstance load_pa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open principal-agent file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return pa_from_json_text(buffer.str());
}

void save_pa(const PAInstance& pa, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write principal-agent file: " + path);
  out << pa_to_json_text(pa) << '\n';
}

}  // namespace infosell
