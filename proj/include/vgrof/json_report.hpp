#ifndef VGROF_JSON_REPORT_HPP_
#define VGROF_JSON_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "vgrof/certificate.hpp"
#include "vgrof/conditions.hpp"

namespace vgrof {

/// JSON has no infinities; they are written as the strings "inf" / "-inf".
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline nlohmann::json json_number(ExtReal v) { return json_number(v.raw()); }

inline nlohmann::json to_json(const CertificateReport& rep) {
  using nlohmann::json;
  double young_max = 0.0;
  for (double v : rep.young_residual_map.values()) young_max = std::max(young_max, v);
  const double rhs = rep.modular + rep.conjugate_modular.raw();
  json j;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["failures"] = rep.failures;
  j["lambda"] = json_number(rep.lambda);
  j["grid"] = {{"rows", rep.young_residual_map.rows()},
               {"cols", rep.young_residual_map.cols()},
               {"h", json_number(rep.young_residual_map.h())}};
  j["div_residual"] = json_number(rep.div_residual);
  j["trace_violation"] = json_number(rep.trace_violation);
  j["primal"] = json_number(rep.primal);
  j["dual"] = json_number(rep.dual);
  j["gap_abs"] = json_number(rep.gap_abs);
  j["gap_rel"] = json_number(rep.gap_rel);
  j["gap_floor"] = json_number(rep.gap_floor);
  j["young_residual_total"] = json_number(rep.young_residual_total);
  j["young_residual_min"] = json_number(rep.young_residual_min);
  j["young_residual_max"] = json_number(young_max);
  j["fidelity_residual"] = json_number(rep.fidelity_residual);
  j["infeasible_pixels"] = rep.infeasible_pixels;
  j["gauss_green_defect"] = json_number(rep.gauss_green_defect);
  j["optimality"] = {
      {"b_total_u_dot_w", {{"lhs", json_number(rep.pairing_uw)}, {"rhs", json_number(rhs)}}},
      {"c_total_pairing", {{"lhs", json_number(rep.pairing_xi_bar)}, {"rhs", json_number(rhs)}}},
      {"d_pointwise_young", {{"total", json_number(rep.young_residual_total.raw() / rep.lambda)},
                             {"max", json_number(young_max / rep.lambda)}}}};
  j["sign_convention"] = {{"flux", "eta = lambda * xi_bar (solver dual variable)"},
                          {"xi", "div xi = w = (f - u) / lambda"},
                          {"xi_bar", "xi_bar = -xi, -div xi_bar = w"}};
  return j;
}

inline nlohmann::json to_json(const ConditionReport& rep) {
  using nlohmann::json;
  json j;
  j["condition"] = std::string(to_string(rep.condition));
  j["holds"] = rep.holds;
  j["witness_constant"] = json_number(rep.witness_constant);
  if (rep.worst_pixel_pair) {
    const auto& [x, y] = *rep.worst_pixel_pair;
    j["worst_pixel_pair"] = json::array({json::array({x.row, x.col}), json::array({y.row, y.col})});
  } else {
    j["worst_pixel_pair"] = nullptr;
  }
  if (!rep.radius_maxima.empty()) {
    json r = json::array();
    for (double v : rep.radius_maxima) r.push_back(json_number(v));
    j["radius_maxima"] = r;
  }
  return j;
}

}  // namespace vgrof

#endif  // VGROF_JSON_REPORT_HPP_
