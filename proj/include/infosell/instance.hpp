#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infosell/common.hpp"

namespace infosell {

// A selling-information instance: states Theta (size d), buyer actions A
// (size m), buyer types K (size n) with prior mu over states, distribution
// lambda over types, utilities in [0,1] and per-type budgets.
//
// Instances are immutable after construction; algorithms index by position.
struct Instance {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> types;
  std::vector<double> prior;              // size d
  std::vector<double> type_dist;          // size n
  Matrix seller_utility;                  // d x m
  std::vector<Matrix> buyer_utility;      // n entries, each d x m
  std::vector<double> budgets;            // size n

  int d() const { return static_cast<int>(states.size()); }
  int m() const { return static_cast<int>(actions.size()); }
  int n() const { return static_cast<int>(types.size()); }

  double us(int theta, int a) const { return seller_utility(theta, a); }
  double ub(int k, int theta, int a) const { return buyer_utility[k](theta, a); }

  // True iff every budget is zero, so the seller cannot charge upfront.
  bool limited_liability() const {
    for (double b : budgets)
      if (b > 0.0) return false;
    return true;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks all instance invariants; never mutates, never throws.
ValidationReport validate(const Instance& instance);

// JSON (de)serialization. The schema mirrors the field names above and carries
// a mandatory schema_version (currently "1"). Round-trips bit-exactly.
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);
Instance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const Instance& instance);

// Deterministic random instance: utilities uniform in [0,1] rounded to six
// decimals, prior and lambda from the simplex, budgets zero under limited
// liability and uniform in [0,1] otherwise.
Instance random_instance(int d, int m, int n, std::uint64_t seed, bool limited_liability);

}  // namespace infosell
