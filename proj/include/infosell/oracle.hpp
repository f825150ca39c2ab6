#pragma once

#include <string>
#include <vector>

#include "infosell/common.hpp"
#include "infosell/instance.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

// Grid resolution for the brute-force oracles. The documented slack of an
// oracle value is m * payment_step + d * m * n * scheme_step, from the
// Lipschitz constants of the utility expressions on [0,1] data.
struct GridSpec {
  double scheme_step = 0.25;
  double payment_step = 0.05;
  std::size_t max_enumeration = 2'000'000;

  double nomenu_slack(const Instance& inst) const {
    return inst.m() * payment_step + inst.d() * inst.m() * inst.n() * scheme_step;
  }
};

struct NoMenuOracleResult {
  double value = 0.0;
  NoMenuProtocol protocol;
};

// Enumerates generalized-direct schemes on the grid (rows over the m^n action
// tuples), prices in budgets plus zero, and per-signal payments that are
// either zero or posterior-optimal; returns the best evaluated protocol. The
// value is a certified lower bound on the no-menu optimum.
NoMenuOracleResult brute_force_nomenu(const Instance& inst, const GridSpec& grid);

struct MenuOracleResult {
  double value = 0.0;
  MenuProtocol protocol;
};

// Enumerates per-type direct schemes and diagonal payment vectors on the grid
// and keeps the best assignment that passes the IC and IR checks. Lower bound
// on the menu optimum.
MenuOracleResult brute_force_menu(const Instance& inst, const GridSpec& grid);

struct CertItem {
  std::string name;
  bool pass = true;
  double slack = 0.0;   // worst margin; negative means violated
};

struct CertReport {
  std::vector<CertItem> items;
  double utility = 0.0;   // independently recomputed seller utility
  bool ok = true;
};

// Re-evaluates every constraint of a protocol from scratch. This code shares
// no helpers with the belief module; its purpose is to catch solver-side bugs,
// and shared code would mask them.
CertReport certify_menu(const Instance& inst, const MenuProtocol& proto);
CertReport certify_nomenu(const Instance& inst, const NoMenuProtocol& proto);

std::string cert_report_to_json_text(const CertReport& report);

}  // namespace infosell
