#include "infosell/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace infosell {

using nlohmann::json;

ValidationReport validate(const Instance& inst) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };

  const int d = inst.d(), m = inst.m(), n = inst.n();
  if (d < 1) fail("states empty");
  if (m < 1) fail("actions empty");
  if (n < 1) fail("types empty");

  if (static_cast<int>(inst.prior.size()) != d) {
    fail("prior dimension mismatch");
  } else {
    double sum = 0.0;
    for (double p : inst.prior) {
      sum += p;
      if (p < 0.0) fail("prior entry negative");
    }
    if (std::abs(sum - 1.0) > tol::kProb) fail("prior not normalized");
  }

  if (static_cast<int>(inst.type_dist.size()) != n) {
    fail("type_dist dimension mismatch");
  } else {
    double sum = 0.0;
    for (double p : inst.type_dist) {
      sum += p;
      if (p < 0.0) fail("type_dist entry negative");
    }
    if (std::abs(sum - 1.0) > tol::kProb) fail("type_dist not normalized");
  }

  if (inst.seller_utility.rows() != d || inst.seller_utility.cols() != m) {
    fail("seller_utility dimension mismatch");
  } else {
    for (double u : inst.seller_utility.data())
      if (u < 0.0 || u > 1.0) {
        fail("utility out of [0,1]: seller_utility");
        break;
      }
  }

  if (static_cast<int>(inst.buyer_utility.size()) != n) {
    fail("buyer_utility dimension mismatch");
  } else {
    for (int k = 0; k < n; ++k) {
      const Matrix& u = inst.buyer_utility[k];
      if (u.rows() != d || u.cols() != m) {
        fail("buyer_utility dimension mismatch for type " + inst.types[k]);
        continue;
      }
      for (double v : u.data())
        if (v < 0.0 || v > 1.0) {
          fail("utility out of [0,1]: buyer_utility for type " + inst.types[k]);
          break;
        }
    }
  }

  if (static_cast<int>(inst.budgets.size()) != n) {
    fail("budgets dimension mismatch");
  } else {
    for (double b : inst.budgets)
      if (b < 0.0) {
        fail("budget negative");
        break;
      }
  }

  return report;
}

namespace {

json matrix_to_json(const Matrix& mat) {
  json rows = json::array();
  for (int r = 0; r < mat.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw SchemaError("field '" + field + "' must be a matrix (array of arrays)");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Matrix mat(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw SchemaError("field '" + field + "' has ragged rows");
    for (int c = 0; c < cols; ++c) mat(r, c) = j[r][c].get<double>();
  }
  return mat;
}

const json& require_field(const json& j, const std::string& name) {
  auto it = j.find(name);
  if (it == j.end()) throw SchemaError("missing field: " + name);
  return *it;
}

}  // namespace

std::string instance_to_json_text(const Instance& inst) {
  json j;
  j["schema_version"] = "1";
  j["states"] = inst.states;
  j["actions"] = inst.actions;
  j["types"] = inst.types;
  j["prior"] = inst.prior;
  j["type_dist"] = inst.type_dist;
  j["seller_utility"] = matrix_to_json(inst.seller_utility);
  json bu = json::array();
  for (const Matrix& u : inst.buyer_utility) bu.push_back(matrix_to_json(u));
  j["buyer_utility"] = bu;
  j["budgets"] = inst.budgets;
  return j.dump(2);
}

Instance instance_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("instance parse error: ") + e.what());
  }
  const std::string version = require_field(j, "schema_version").get<std::string>();
  if (version != "1") throw SchemaError("unsupported schema_version: " + version);

  Instance inst;
  inst.states = require_field(j, "states").get<std::vector<std::string>>();
  inst.actions = require_field(j, "actions").get<std::vector<std::string>>();
  inst.types = require_field(j, "types").get<std::vector<std::string>>();
  inst.prior = require_field(j, "prior").get<std::vector<double>>();
  inst.type_dist = require_field(j, "type_dist").get<std::vector<double>>();
  inst.seller_utility = matrix_from_json(require_field(j, "seller_utility"), "seller_utility");
  const json& bu = require_field(j, "buyer_utility");
  if (!bu.is_array()) throw SchemaError("field 'buyer_utility' must be an array of matrices");
  for (std::size_t k = 0; k < bu.size(); ++k)
    inst.buyer_utility.push_back(matrix_from_json(bu[k], "buyer_utility[" + std::to_string(k) + "]"));
  inst.budgets = require_field(j, "budgets").get<std::vector<double>>();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json_text(buffer.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file: " + path);
  out << instance_to_json_text(inst) << '\n';
}

Instance random_instance(int d, int m, int n, std::uint64_t seed, bool limited_liability) {
  if (d < 1 || m < 1 || n < 1) throw Error("random_instance: dimensions must be >= 1");
  Rng rng(seed);
  Instance inst;
  for (int i = 0; i < d; ++i) inst.states.push_back("theta" + std::to_string(i + 1));
  for (int i = 0; i < m; ++i) inst.actions.push_back("a" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) inst.types.push_back("k" + std::to_string(i + 1));
  inst.prior = rng.simplex(d);
  inst.type_dist = rng.simplex(n);
  inst.seller_utility = Matrix(d, m);
  for (int t = 0; t < d; ++t)
    for (int a = 0; a < m; ++a) inst.seller_utility(t, a) = round_to(rng.uniform(), 6);
  for (int k = 0; k < n; ++k) {
    Matrix u(d, m);
    for (int t = 0; t < d; ++t)
      for (int a = 0; a < m; ++a) u(t, a) = round_to(rng.uniform(), 6);
    inst.buyer_utility.push_back(std::move(u));
  }
  inst.budgets.assign(n, 0.0);
  if (!limited_liability)
    for (int k = 0; k < n; ++k) inst.budgets[k] = round_to(rng.uniform(), 6);
  return inst;
}

}  // namespace infosell
