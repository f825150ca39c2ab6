#include "infosell/protocol.hpp"

#include <json.hpp>

namespace infosell {

using nlohmann::json;

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

Matrix matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Matrix mat(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) mat(r, c) = j[r][c].get<double>();
  return mat;
}

}  // namespace

std::string menu_protocol_to_json_text(const Instance& inst, const MenuProtocol& proto) {
  json j;
  j["schema_version"] = "1";
  j["kind"] = "menu";
  json menu = json::object();
  for (int k = 0; k < inst.n(); ++k) {
    json item;
    item["scheme"] = matrix_to_json(proto.schemes[k]);
    item["price"] = proto.prices[k];
    item["payments"] = proto.payments[k];
    menu[inst.types[k]] = std::move(item);
  }
  j["menu"] = std::move(menu);
  return j.dump(2);
}

MenuProtocol menu_protocol_from_json_text(const Instance& inst, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("protocol parse error: ") + e.what());
  }
  if (j.value("kind", "") != "menu") throw SchemaError("protocol kind is not 'menu'");
  const json& menu = j.at("menu");
  MenuProtocol proto;
  for (int k = 0; k < inst.n(); ++k) {
    auto it = menu.find(inst.types[k]);
    if (it == menu.end()) throw SchemaError("menu missing entry for type " + inst.types[k]);
    proto.schemes.push_back(matrix_from_json((*it).at("scheme")));
    proto.prices.push_back((*it).at("price").get<double>());
    proto.payments.push_back((*it).at("payments").get<std::vector<double>>());
  }
  return proto;
}

std::string nomenu_protocol_to_json_text(const NoMenuProtocol& proto) {
  json j;
  j["schema_version"] = "1";
  j["kind"] = "nomenu";
  j["price"] = proto.price;
  json signals = json::array();
  for (const NoMenuSignal& s : proto.signals) {
    json sig;
    sig["weight"] = s.weight;
    sig["posterior"] = s.posterior.probs;
    sig["payments"] = s.payments;
    if (!s.label.empty()) sig["label"] = s.label;
    signals.push_back(std::move(sig));
  }
  j["signals"] = std::move(signals);
  return j.dump(2);
}

NoMenuProtocol nomenu_protocol_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("protocol parse error: ") + e.what());
  }
  if (j.value("kind", "") != "nomenu") throw SchemaError("protocol kind is not 'nomenu'");
  NoMenuProtocol proto;
  proto.price = j.at("price").get<double>();
  for (const json& sig : j.at("signals")) {
    NoMenuSignal s;
    s.weight = sig.at("weight").get<double>();
    s.posterior = make_posterior(sig.at("posterior").get<std::vector<double>>());
    s.payments = sig.at("payments").get<std::vector<double>>();
    if (sig.contains("label")) s.label = sig.at("label").get<std::vector<int>>();
    proto.signals.push_back(std::move(s));
  }
  return proto;
}

}  // namespace infosell
