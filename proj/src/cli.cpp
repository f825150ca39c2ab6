#include "infosell/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "infosell/belief.hpp"
#include "infosell/instance.hpp"
#include "infosell/menu_solver.hpp"
#include "infosell/nomenu_solver.hpp"
#include "infosell/oracle.hpp"
#include "infosell/principal_agent.hpp"

namespace infosell::cli {

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInvalid = 2;
constexpr int kSolverError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit(const json& report, const std::string& out_path, bool pretty, std::ostream& out) {
  const std::string text = report.dump(2);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write output file: " + out_path);
    f << text << '\n';
  }
  if (pretty) {
    out << "command : " << report.value("command", "") << '\n';
    if (report.contains("method")) out << "method  : " << report["method"].get<std::string>() << '\n';
    if (report.contains("value"))
      out << "value   : " << std::setprecision(12) << report["value"].get<double>() << '\n';
    if (report.contains("candidates"))
      for (const auto& c : report["candidates"])
        out << "  " << std::left << std::setw(18) << c["name"].get<std::string>() << ' '
            << std::setprecision(12) << c["value"].get<double>() << '\n';
    if (report.contains("rows")) {
      for (const auto& r : report["rows"]) {
        out << "  " << std::left << std::setw(14) << r["method"].get<std::string>() << " #"
            << r["index"].get<int>() << "  " << std::setprecision(12) << r["value"].get<double>();
        if (r.contains("runtime_ms")) out << "  " << r["runtime_ms"].get<double>() << " ms";
        out << '\n';
      }
    }
    if (report.contains("ok")) out << "ok      : " << (report["ok"].get<bool>() ? "yes" : "no") << '\n';
  } else if (out_path.empty()) {
    out << text << '\n';
  }
}

Instance load_valid_instance(const std::string& path) {
  Instance inst = load_instance(path);
  const ValidationReport report = validate(inst);
  if (!report.ok()) {
    std::string msg = "instance failed validation:";
    for (const std::string& v : report.violations) msg += "\n  - " + v;
    throw SchemaError(msg);
  }
  return inst;
}

struct SolveOutcome {
  json report;
  double value = 0.0;
};

SolveOutcome run_solver(const Instance& inst, const std::string& method, double alpha, double eps,
                        double rho, const Caps& caps) {
  SolveOutcome out;
  if (method == "menu") {
    const MenuSolve solved = solve_menu(inst);
    const CertReport cert = certify_menu(inst, solved.protocol);
    if (!cert.ok || std::abs(cert.utility - solved.value) > tol::kValue)
      throw NumericalFailure("menu certification failed");
    out.value = solved.value;
    out.report["method"] = "menu";
    out.report["value"] = solved.value;
    out.report["protocol"] = json::parse(menu_protocol_to_json_text(inst, solved.protocol));
    out.report["certified"] = true;
    return out;
  }

  SolveReport report;
  if (method == "fixed-types") {
    report = solve_fixed_types_exact(inst, caps);
  } else if (method == "ptas") {
    report = solve_ptas_fixed_actions(inst, alpha, eps, caps);
  } else if (method == "qptas") {
    report = solve_quasipoly(inst, alpha, eps, rho, caps);
  } else if (method == "fixed-states") {
    report = solve_bicriteria_fixed_states(inst, alpha, rho, caps);
  } else if (method == "general") {
    report = solve_general_bicriteria(inst, alpha, rho, caps);
  } else {
    throw Error("unknown method: " + method);
  }
  const CertReport cert = certify_nomenu(inst, report.protocol);
  if (!cert.ok || std::abs(cert.utility - report.value) > tol::kValue)
    throw NumericalFailure("no-menu certification failed");
  out.value = report.value;
  out.report = json::parse(solve_report_to_json_text(report));
  out.report["certified"] = true;
  return out;
}

int cmd_validate(const std::string& instance_path, const std::string& out_path, bool pretty,
                 std::ostream& out) {
  const Instance inst = load_instance(instance_path);
  const ValidationReport report = validate(inst);
  json j;
  j["schema_version"] = "1";
  j["command"] = "validate";
  j["valid"] = report.ok();
  j["violations"] = report.violations;
  j["ok"] = report.ok();
  emit(j, out_path, pretty, out);
  return report.ok() ? kOk : kInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solvers for seller-optimal information-selling protocols"};
  app.require_subcommand(1);

  std::string instance_path, protocol_path, pa_path, out_path, method, methods_csv, posterior_csv;
  std::string dims_csv = "2,2,2";
  double alpha = std::nan(""), eps = std::nan(""), rho = std::nan("");
  std::uint64_t seed = 0;
  int gen_d = 2, gen_m = 2, gen_n = 1, count = 10, jobs = 1;
  bool limited_liability = false, pretty = false, timings = false, to_pa_flag = false;
  Caps caps;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--pretty", pretty, "Render an aligned text summary instead of JSON on stdout");
    cmd->add_option("--out", out_path, "Write the JSON report to this path");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check instance invariants");
  validate_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  add_common(validate_cmd);

  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--states", gen_d, "Number of states");
  gen_cmd->add_option("--actions", gen_m, "Number of actions");
  gen_cmd->add_option("--types", gen_n, "Number of types");
  gen_cmd->add_option("--seed", seed, "RNG seed");
  gen_cmd->add_flag("--limited-liability", limited_liability, "All budgets zero");
  gen_cmd->add_option("--out", out_path, "Output path")->required();

  CLI::App* solve_cmd = app.add_subcommand("solve", "Run a solver");
  solve_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  solve_cmd
      ->add_option("--method", method,
                   "menu | fixed-types | ptas | qptas | fixed-states | general")
      ->required();
  solve_cmd->add_option("--alpha", alpha, "Additive approximation parameter");
  solve_cmd->add_option("--eps", eps, "Best-response relaxation parameter");
  solve_cmd->add_option("--rho", rho, "Multiplicative approximation parameter");
  solve_cmd->add_option("--vertex-cap", caps.vertex, "Vertex enumeration cap");
  solve_cmd->add_option("--quniform-cap", caps.quniform, "q-uniform grid cap");
  add_common(solve_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a protocol file");
  eval_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  eval_cmd->add_option("--protocol", protocol_path, "Protocol JSON")->required();
  add_common(eval_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "Certify a protocol file");
  verify_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  verify_cmd->add_option("--protocol", protocol_path, "Protocol JSON")->required();
  add_common(verify_cmd);

  CLI::App* convert_cmd =
      app.add_subcommand("convert", "Convert between selling and principal-agent instances");
  convert_cmd->add_option("--instance", instance_path, "Selling instance JSON");
  convert_cmd->add_flag("--to-pa", to_pa_flag, "Convert selling instance to principal-agent");
  convert_cmd->add_option("--posterior", posterior_csv, "Comma-separated posterior for --to-pa");
  convert_cmd->add_option("--pa", pa_path, "Principal-agent JSON (converted to an instance)");
  convert_cmd->add_option("--out", out_path, "Output path")->required();

  CLI::App* bench_cmd = app.add_subcommand("bench", "Run solvers over random instances");
  bench_cmd->add_option("--methods", methods_csv, "Comma-separated method list")->required();
  bench_cmd->add_option("--seed", seed, "Base RNG seed");
  bench_cmd->add_option("--count", count, "Number of instances");
  bench_cmd->add_option("--dims", dims_csv, "Instance dimensions d,m,n");
  bench_cmd->add_option("--alpha", alpha, "Alpha for approximate methods");
  bench_cmd->add_option("--eps", eps, "Eps for approximate methods");
  bench_cmd->add_option("--rho", rho, "Rho for approximate methods");
  bench_cmd->add_option("--jobs", jobs, "Parallel workers");
  bench_cmd->add_flag("--timings", timings, "Include runtimes (output no longer byte-stable)");
  add_common(bench_cmd);

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(instance_path, out_path, pretty, out);

    if (gen_cmd->parsed()) {
      const Instance inst = random_instance(gen_d, gen_m, gen_n, seed, limited_liability);
      save_instance(inst, out_path);
      json j;
      j["schema_version"] = "1";
      j["command"] = "gen";
      j["out"] = out_path;
      out << j.dump(2) << '\n';
      return kOk;
    }

    if (solve_cmd->parsed()) {
      // Method/parameter compatibility is a usage error, not a solver error.
      auto need = [&](bool cond, const std::string& msg) {
        if (!cond) throw CLI::ValidationError(msg);
      };
      try {
        if (method == "ptas") need(!std::isnan(alpha) && !std::isnan(eps), "--alpha and --eps required for ptas");
        if (method == "qptas")
          need(!std::isnan(alpha) && !std::isnan(eps) && !std::isnan(rho),
               "--alpha, --eps and --rho required for qptas");
        if (method == "fixed-states")
          need(!std::isnan(alpha) && !std::isnan(rho), "--alpha and --rho required for fixed-states");
        if (method == "general") {
          need(!std::isnan(alpha) && !std::isnan(rho), "--alpha and --rho required for general");
          need(rho <= 1.0 / 6.0 + 1e-15, "--rho must be at most 1/6 for general");
        }
        need(method == "menu" || method == "fixed-types" || method == "ptas" || method == "qptas" ||
                 method == "fixed-states" || method == "general",
             "--method must be one of menu, fixed-types, ptas, qptas, fixed-states, general");
      } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
      }

      const Instance inst = load_valid_instance(instance_path);
      SolveOutcome outcome = run_solver(inst, method, alpha, eps, rho, caps);
      outcome.report["schema_version"] = "1";
      outcome.report["command"] = "solve";
      outcome.report["instance"] = instance_path;
      emit(outcome.report, out_path, pretty, out);
      return kOk;
    }

    if (eval_cmd->parsed() || verify_cmd->parsed()) {
      const Instance inst = load_valid_instance(instance_path);
      const std::string text = read_file(protocol_path);
      const json pj = json::parse(text);
      const std::string kind = pj.value("kind", "");
      json j;
      j["schema_version"] = "1";
      if (kind == "menu") {
        const MenuProtocol proto = menu_protocol_from_json_text(inst, text);
        if (eval_cmd->parsed()) {
          const MenuEval ev = eval_menu(inst, proto);
          j["command"] = "eval";
          j["kind"] = "menu";
          j["value"] = ev.utility;
          j["ic_ok"] = ev.ic_ok;
          j["ir_ok"] = ev.ir_ok;
          emit(j, out_path, pretty, out);
          return kOk;
        }
        const CertReport cert = certify_menu(inst, proto);
        j = json::parse(cert_report_to_json_text(cert));
        j["command"] = "verify";
        emit(j, out_path, pretty, out);
        return cert.ok ? kOk : kSolverError;
      } else if (kind == "nomenu") {
        const NoMenuProtocol proto = nomenu_protocol_from_json_text(text);
        if (eval_cmd->parsed()) {
          const NoMenuEval ev = eval_nomenu(inst, proto);
          j["command"] = "eval";
          j["kind"] = "nomenu";
          j["value"] = ev.utility;
          json irs = json::array();
          for (int k : ev.ir_set) irs.push_back(inst.types[k]);
          j["ir_set"] = std::move(irs);
          emit(j, out_path, pretty, out);
          return kOk;
        }
        const CertReport cert = certify_nomenu(inst, proto);
        j = json::parse(cert_report_to_json_text(cert));
        j["command"] = "verify";
        emit(j, out_path, pretty, out);
        return cert.ok ? kOk : kSolverError;
      }
      throw SchemaError("protocol file has unknown kind: '" + kind + "'");
    }

    if (convert_cmd->parsed()) {
      if (to_pa_flag) {
        if (instance_path.empty() || posterior_csv.empty())
          throw SchemaError("--to-pa requires --instance and --posterior");
        const Instance inst = load_valid_instance(instance_path);
        std::vector<double> probs;
        std::stringstream ss(posterior_csv);
        std::string tokn;
        while (std::getline(ss, tokn, ',')) probs.push_back(std::stod(tokn));
        const PAInstance pa = to_pa(inst, make_posterior(std::move(probs)));
        save_pa(pa, out_path);
      } else {
        if (pa_path.empty()) throw SchemaError("convert requires --to-pa or --pa");
        const PAInstance pa = load_pa(pa_path);
        save_instance(from_pa(pa), out_path);
      }
      json j;
      j["schema_version"] = "1";
      j["command"] = "convert";
      j["out"] = out_path;
      out << j.dump(2) << '\n';
      return kOk;
    }

    if (bench_cmd->parsed()) {
      std::vector<std::string> methods;
      std::stringstream ss(methods_csv);
      std::string tokn;
      while (std::getline(ss, tokn, ',')) methods.push_back(tokn);
      int bd = 2, bm = 2, bn = 2;
      if (std::sscanf(dims_csv.c_str(), "%d,%d,%d", &bd, &bm, &bn) != 3) {
        err << "usage error: --dims must be d,m,n\n";
        return kUsage;
      }
      const bool needs_ll =
          std::any_of(methods.begin(), methods.end(), [](const std::string& s) {
            return s == "ptas" || s == "qptas" || s == "fixed-states";
          });
      const double b_alpha = std::isnan(alpha) ? 0.2 : alpha;
      const double b_eps = std::isnan(eps) ? 0.04 : eps;
      const double b_rho = std::isnan(rho) ? 0.25 : rho;

      struct Row {
        std::string method;
        int index;
        double value;
        double runtime_ms;
      };
      auto run_one = [&](int i) {
        std::vector<Row> rows;
        const Instance inst = random_instance(bd, bm, bn, seed + i, needs_ll);
        for (const std::string& mth : methods) {
          const auto t0 = std::chrono::steady_clock::now();
          const double general_rho = std::min(b_rho, 1.0 / 6.0);
          const SolveOutcome sr = run_solver(inst, mth, b_alpha, b_eps,
                                             mth == "general" ? general_rho : b_rho, caps);
          const auto t1 = std::chrono::steady_clock::now();
          rows.push_back({mth, i, sr.value,
                          std::chrono::duration<double, std::milli>(t1 - t0).count()});
        }
        return rows;
      };

      std::vector<std::vector<Row>> all(count);
      if (jobs <= 1) {
        for (int i = 0; i < count; ++i) all[i] = run_one(i);
      } else {
        std::vector<std::future<std::vector<Row>>> futures;
        for (int i = 0; i < count; ++i)
          futures.push_back(std::async(std::launch::async, run_one, i));
        for (int i = 0; i < count; ++i) all[i] = futures[i].get();
      }

      json j;
      j["schema_version"] = "1";
      j["command"] = "bench";
      j["seed"] = seed;
      j["count"] = count;
      j["dims"] = {bd, bm, bn};
      json rows = json::array();
      for (const auto& instance_rows : all)
        for (const Row& r : instance_rows) {
          json row;
          row["method"] = r.method;
          row["index"] = r.index;
          row["value"] = r.value;
          if (timings) row["runtime_ms"] = r.runtime_ms;
          rows.push_back(std::move(row));
        }
      j["rows"] = std::move(rows);
      emit(j, out_path, pretty, out);
      return kOk;
    }
  } catch (const SchemaError& e) {
    err << "input error: " << e.what() << '\n';
    return kInvalid;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  }
  err << "usage error: no subcommand\n";
  return kUsage;
}

}  // namespace infosell::cli
