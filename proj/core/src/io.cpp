#include "agora/io.hpp"

#include <json.hpp>

#include "agora/errors.hpp"

namespace agora {

using nlohmann::json;

namespace {

json parse_or_throw(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("invalid JSON");
  return j;
}

BigInt bigint_from_json(const json& v, const char* what) {
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.empty()) throw ValidationError(std::string(what) + ": empty number string");
    BigInt out;
    if (mpz_set_str(out.get_mpz_t(), s.c_str(), 10) != 0)
      throw ValidationError(std::string(what) + ": not a decimal integer: " + s);
    return out;
  }
  if (v.is_number_integer()) return BigInt(static_cast<long>(v.get<long long>()));
  throw ValidationError(std::string(what) + ": expected an integer or decimal string");
}

}  // namespace

Instance parse_instance_json(const std::string& text) {
  json j = parse_or_throw(text);
  if (!j.is_object() || !j.contains("utilities"))
    throw ValidationError("instance: missing \"utilities\"");
  const json& u = j["utilities"];
  if (!u.is_array() || u.empty()) throw ValidationError("instance: \"utilities\" must be a matrix");
  std::vector<std::vector<long long>> m;
  for (const json& row : u) {
    if (!row.is_array() || row.size() != u.size())
      throw ValidationError("instance: utility matrix must be square");
    std::vector<long long> r;
    for (const json& v : row) {
      if (!v.is_number_integer())
        throw ValidationError("instance: utilities must be integers");
      long long x = v.get<long long>();
      if (x < 0) throw ValidationError("instance: utilities must be non-negative");
      r.push_back(x);
    }
    m.push_back(std::move(r));
  }
  Instance inst{Market::from_utilities(std::move(m)),
                j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : ""};
  return inst;
}

std::string instance_to_json(const Market& market, const std::string& name) {
  json j;
  if (!name.empty()) j["name"] = name;
  json rows = json::array();
  for (int i = 0; i < market.size(); ++i) {
    json row = json::array();
    for (int jj = 0; jj < market.size(); ++jj) row.push_back(market.utility(i, jj));
    rows.push_back(std::move(row));
  }
  j["utilities"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string solution_to_json(const Solution& solution) {
  json j;
  json prices = json::array();
  for (const BigInt& p : solution.prices) prices.push_back(to_string(p));
  j["prices"] = std::move(prices);
  j["denominator"] = "1";
  json alloc = json::array();
  for (const auto& row : solution.allocations) {
    json r = json::array();
    for (const Rational& x : row)
      r.push_back(json{{"num", to_string(BigInt(x.get_num()))},
                       {"den", to_string(BigInt(x.get_den()))}});
    alloc.push_back(std::move(r));
  }
  j["allocations"] = std::move(alloc);
  j["iterations"] = solution.iterations;
  j["mode"] = solution.mode;
  j["verified"] = solution.verified;
  return j.dump(2) + "\n";
}

ParsedSolution parse_solution_json(const std::string& text) {
  json j = parse_or_throw(text);
  if (!j.is_object() || !j.contains("prices"))
    throw ValidationError("solution: missing \"prices\"");
  ParsedSolution out;
  for (const json& v : j["prices"]) out.prices.push_back(bigint_from_json(v, "prices"));
  if (out.prices.empty()) throw ValidationError("solution: empty price vector");
  return out;
}

std::string report_to_json(const EquilibriumReport& report) {
  json j;
  j["equilibrium"] = report.ok();
  j["goods_cleared"] = report.goods_cleared;
  j["budgets_spent"] = report.budgets_spent;
  j["bang_per_buck_optimal"] = report.bang_per_buck_optimal;
  j["unsold_goods"] = report.unsold_goods;
  j["unspent_buyers"] = report.unspent_buyers;
  return j.dump(2) + "\n";
}

std::string iteration_record_to_json(const IterationRecord& record) {
  json j;
  j["iter"] = record.index;
  j["component"] = record.component;
  j["kind"] = record.is_xmax ? "xmax" : "balancing";
  j["event"] = to_cstr(record.binding);
  if (record.x != 0) j["x"] = to_string(record.x);
  if (record.x_exponent != 0) j["x_exp"] = to_string(record.x_exponent);
  j["ell"] = record.ell;
  j["bs_size"] = record.bs_size;
  j["l1_before"] = to_string(record.l1_before);
  j["l1_after"] = to_string(record.l1_after);
  j["l2sq_before"] = to_string(record.l2sq_before);
  j["l2sq_after"] = to_string(record.l2sq_after);
  if (record.max_price != 0) j["max_price"] = to_string(record.max_price);
  j["max_price_exp"] = to_string(record.max_price_exponent);
  return j.dump();
}

}  // namespace agora
