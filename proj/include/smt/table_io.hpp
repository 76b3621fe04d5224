#pragma once

// CSV and JSON encodings of harness results.
//
// CSV mirrors the printed power tables: one row per rho, one column per n,
// numbers in 6-significant-digit decimal. JSON carries full precision and the
// run metadata under schema "smt/1".

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "smt/memory_test.hpp"
#include "smt/power_harness.hpp"

namespace smt {

inline constexpr const char* kSchema = "smt/1";

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline void write_power_csv(std::ostream& out, const PowerTable& table) {
  out << "rho";
  for (Coord n : table.ns) out << ",n=" << n;
  out << '\n';
  for (std::size_t i = 0; i < table.rhos.size(); ++i) {
    out << format_number(table.rhos[i]);
    for (std::size_t j = 0; j < table.ns.size(); ++j) out << ',' << format_number(table.power(i, j));
    out << '\n';
  }
}

inline nlohmann::json to_json(const PowerTable& table) {
  nlohmann::json power = nlohmann::json::array();
  for (std::size_t i = 0; i < table.rhos.size(); ++i) {
    auto& row = power.emplace_back(nlohmann::json::array());
    for (std::size_t j = 0; j < table.ns.size(); ++j) row.push_back(table.power(i, j));
  }
  return {
      {"schema", kSchema},
      {"kind", "power_table"},
      {"field", table.field.to_string()},
      {"d", table.field.dim()},
      {"alpha", table.alpha.value()},
      {"beta", table.beta},
      {"replications", table.replications},
      {"seed", table.seed},
      {"rho", table.rhos},
      {"n", table.ns},
      {"power", power},
      {"rejections", table.rejections},
  };
}

inline nlohmann::json to_json(const TestResult& r) {
  return {{"schema", kSchema}, {"u_n", r.u_n},           {"v_n", r.v_n},
          {"t_n", r.t_n},      {"tau_beta", r.tau_beta}, {"reject", r.reject}};
}

/// Parses and validates a TestResult JSON document; throws std::invalid_argument
/// when the invariants do not hold.
inline TestResult test_result_from_json(const nlohmann::json& j) {
  if (j.at("schema") != kSchema) throw std::invalid_argument("unexpected schema");
  TestResult r{j.at("u_n").get<double>(), j.at("v_n").get<double>(), j.at("t_n").get<double>(),
               j.at("tau_beta").get<double>(), j.at("reject").get<bool>()};
  if (!(r.u_n >= 0.0 && r.v_n > 0.0 && r.t_n >= 0.0 && r.tau_beta > 0.0)) {
    throw std::invalid_argument("test result fields out of range");
  }
  if (std::abs(r.t_n - r.u_n / r.v_n) > 1e-12 * std::max(1.0, r.t_n)) {
    throw std::invalid_argument("t_n does not equal u_n / v_n");
  }
  if (r.reject != (r.t_n < r.tau_beta)) throw std::invalid_argument("reject flag is inconsistent");
  return r;
}

inline nlohmann::json to_json(const LevelResult& level, const FieldSpec& field,
                              std::uint64_t seed) {
  const auto& c = level.config;
  return {
      {"schema", kSchema},
      {"kind", "level"},
      {"field", field.to_string()},
      {"d", c.dim},
      {"alpha", c.alpha.value()},
      {"n", c.n},
      {"rho", c.rho},
      {"beta", c.beta},
      {"replications", level.replications},
      {"seed", seed},
      {"rejections", level.rejections},
      {"empirical_level", level.empirical_level},
  };
}

}  // namespace smt
