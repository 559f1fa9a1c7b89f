#ifndef VGROF_CLI_HPP_
#define VGROF_CLI_HPP_

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vgrof/certificate.hpp"
#include "vgrof/conditions.hpp"
#include "vgrof/flow.hpp"
#include "vgrof/io.hpp"
#include "vgrof/json_report.hpp"
#include "vgrof/phi.hpp"
#include "vgrof/solver.hpp"

namespace vgrof::cli {

enum ExitCode : int { kOk = 0, kCertificateFail = 2, kUsage = 64, kDataError = 65 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kUsageText =
    "usage: vgrof <command> [--config FILE] [--set key=value ...]\n"
    "commands:\n"
    "  denoise            solve the ROF problem for a (noisy) image and certify the result\n"
    "  certify            check an existing (u, xi) pair against a datum f\n"
    "  flow               run the certified minimizing-movements gradient flow\n"
    "  check-conditions   report the regularity conditions of a phi field as JSON\n"
    "  conjugate-table    tabulate phi*(x, s) at one pixel against the numeric transform\n";

/// Integrand description as it appears in a config file.
struct PhiSpec {
  Family family = Family::ClassicalTV;
  double p = 2.0;
  double a = 1.0;
  double q = 2.0;
  double w = 1.0;
  std::string p_field;
  std::string a_field;
  std::string w_field;
};

struct RunConfig {
  std::string command;
  std::string input;
  /// File prefix for denoise/flow, output file for the others (stdout if empty).
  std::string output;
  PhiSpec phi;
  SolverConfig solver;
  CertificateTolerances tolerances;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::string metrics_path;
  std::optional<double> h;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool write_young_map = false;

  // certify
  std::string u_path;
  std::string xi_x_path;
  std::string xi_y_path;
  std::string f_path;

  // flow
  double dt = 0.01;
  std::size_t n_steps = 10;
  std::size_t snapshot_every = 0;

  // conjugate-table
  std::size_t pixel_row = 0;
  std::size_t pixel_col = 0;
  double s_max = 2.0;
  std::size_t s_samples = 101;
  double t_max = 1e3;
  std::size_t t_samples = 100000;
};

inline bool known_command(const std::string& c) {
  return c == "denoise" || c == "certify" || c == "flow" || c == "check-conditions" ||
         c == "conjugate-table";
}

namespace detail {

inline double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

inline std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace detail

/// Builds a RunConfig from flat key-value pairs; unknown keys are rejected.
inline RunConfig config_from_map(const std::string& command,
                                 const std::map<std::string, std::string>& kv) {
  RunConfig c;
  c.command = command;
  for (const auto& [k, v] : kv) {
    using detail::to_bool;
    using detail::to_count;
    using detail::to_real;
    if (k == "input") c.input = v;
    else if (k == "output") c.output = v;
    else if (k == "family") {
      try {
        c.phi.family = family_from_string(v);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    else if (k == "p") c.phi.p = to_real(k, v);
    else if (k == "a") c.phi.a = to_real(k, v);
    else if (k == "q") c.phi.q = to_real(k, v);
    else if (k == "w") c.phi.w = to_real(k, v);
    else if (k == "p_field") c.phi.p_field = v;
    else if (k == "a_field") c.phi.a_field = v;
    else if (k == "w_field") c.phi.w_field = v;
    else if (k == "lambda") c.solver.lambda = to_real(k, v);
    else if (k == "tau") c.solver.tau = to_real(k, v);
    else if (k == "sigma") c.solver.sigma = to_real(k, v);
    else if (k == "theta") c.solver.theta = to_real(k, v);
    else if (k == "max_iters") c.solver.max_iters = to_count(k, v);
    else if (k == "gap_tol") c.solver.gap_tol = c.tolerances.gap_rel = to_real(k, v);
    else if (k == "div_tol") c.tolerances.div_rel = to_real(k, v);
    else if (k == "check_every") c.solver.check_every = to_count(k, v);
    else if (k == "newton_tol") c.solver.newton_tol = to_real(k, v);
    else if (k == "newton_max") c.solver.newton_max = static_cast<int>(to_count(k, v));
    else if (k == "noise_sigma") c.noise_sigma = to_real(k, v);
    else if (k == "seed") c.seed = c.solver.seed = to_count(k, v);
    else if (k == "metrics") c.metrics_path = v;
    else if (k == "h") c.h = to_real(k, v);
    else if (k == "rows") c.rows = to_count(k, v);
    else if (k == "cols") c.cols = to_count(k, v);
    else if (k == "young_map") c.write_young_map = to_bool(k, v);
    else if (k == "u") c.u_path = v;
    else if (k == "xi_x") c.xi_x_path = v;
    else if (k == "xi_y") c.xi_y_path = v;
    else if (k == "f") c.f_path = v;
    else if (k == "dt") c.dt = to_real(k, v);
    else if (k == "n_steps") c.n_steps = to_count(k, v);
    else if (k == "snapshot_every") c.snapshot_every = to_count(k, v);
    else if (k == "pixel_row") c.pixel_row = to_count(k, v);
    else if (k == "pixel_col") c.pixel_col = to_count(k, v);
    else if (k == "s_max") c.s_max = to_real(k, v);
    else if (k == "s_samples") c.s_samples = to_count(k, v);
    else if (k == "t_max") c.t_max = to_real(k, v);
    else if (k == "t_samples") c.t_samples = to_count(k, v);
    else throw UsageError("unknown config key '" + k + "'");
  }
  if (c.noise_sigma < 0.0) throw UsageError("noise_sigma must be >= 0");
  return c;
}

namespace detail {

inline ScalarImage load_on_grid(const std::string& path, std::optional<double> h) {
  ScalarImage img = load_image(path);
  return h ? with_spacing(img, *h) : img;
}

inline ScalarImage parameter_map(const std::string& path, double constant, std::size_t rows,
                                 std::size_t cols, double h) {
  if (path.empty()) return ScalarImage(rows, cols, h, constant);
  ScalarImage m = load_image(path);
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument("parameter field '" + path + "' does not match the image grid");
  }
  return with_spacing(m, h);
}

}  // namespace detail

inline PhiField build_field(const PhiSpec& spec, std::size_t rows, std::size_t cols, double h) {
  switch (spec.family) {
    case Family::ClassicalTV: return PhiField::classical_tv(rows, cols, h);
    case Family::VariableExponent:
      return PhiField::variable_exponent(detail::parameter_map(spec.p_field, spec.p, rows, cols, h));
    case Family::DoublePhase:
      return PhiField::double_phase(detail::parameter_map(spec.a_field, spec.a, rows, cols, h),
                                    spec.q);
    case Family::PowerWeighted:
      return PhiField::power_weighted(detail::parameter_map(spec.w_field, spec.w, rows, cols, h));
  }
  throw std::logic_error("unhandled family");
}

inline VectorField assemble_field(const ScalarImage& x, const ScalarImage& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("xi components differ in shape");
  VectorField xi = VectorField::like(x);
  xi.x() = x;
  xi.y() = y;
  return xi;
}

namespace detail {

inline void write_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << "\n";
  } else {
    write_file(path, j.dump(2) + "\n");
  }
}

inline int run_denoise(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw UsageError("denoise requires 'input'");
  const std::string prefix = c.output.empty() ? "out" : c.output;
  const ScalarImage clean = detail::load_on_grid(c.input, c.h);
  const ScalarImage f = add_noise(clean, c.noise_sigma, c.seed);
  const PhiField field = build_field(c.phi, f.rows(), f.cols(), f.h());
  SolverConfig cfg = c.solver;
  cfg.log_path = c.metrics_path.empty() ? prefix + "_metrics.csv" : c.metrics_path;
  const SolveResult res = solve_rof(f, field, cfg);
  CertificateTolerances tol = c.tolerances;
  tol.gap_rel = cfg.gap_tol;
  const CertificateReport rep = certify(res.u, res.xi, f, field, cfg.lambda, tol);

  save_image(res.u, prefix + "_u.pgm");
  save_image(res.u, prefix + "_u.vgf");
  save_image(f, prefix + "_f.vgf");
  save_image(res.xi.x(), prefix + "_xi_x.vgf");
  save_image(res.xi.y(), prefix + "_xi_y.vgf");
  if (c.write_young_map) save_image(rep.young_residual_map, prefix + "_young.vgf");
  nlohmann::json j = to_json(rep);
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  write_file(prefix + "_certificate.json", j.dump(2) + "\n");
  out << nlohmann::json{{"command", "denoise"},
                        {"verdict", rep.pass ? "pass" : "fail"},
                        {"iterations", res.iterations},
                        {"gap_rel", json_number(rep.gap_rel)},
                        {"output", prefix}}
             .dump()
      << "\n";
  return rep.pass ? kOk : kCertificateFail;
}

inline int run_certify(const RunConfig& c, std::ostream& out) {
  if (c.u_path.empty() || c.xi_x_path.empty() || c.xi_y_path.empty() || c.f_path.empty()) {
    throw UsageError("certify requires 'u', 'xi_x', 'xi_y' and 'f'");
  }
  const ScalarImage f = detail::load_on_grid(c.f_path, c.h);
  const ScalarImage u = with_spacing(load_image(c.u_path), f.h());
  const VectorField xi = assemble_field(with_spacing(load_image(c.xi_x_path), f.h()),
                                        with_spacing(load_image(c.xi_y_path), f.h()));
  const PhiField field = build_field(c.phi, f.rows(), f.cols(), f.h());
  const CertificateReport rep = certify(u, xi, f, field, c.solver.lambda, c.tolerances);
  write_json(to_json(rep), c.output, out);
  if (c.write_young_map && !c.output.empty()) {
    save_image(rep.young_residual_map, c.output + ".young.vgf");
  }
  return rep.pass ? kOk : kCertificateFail;
}

inline int run_flow_command(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw UsageError("flow requires 'input'");
  const std::string prefix = c.output.empty() ? "out" : c.output;
  const ScalarImage u0 = add_noise(detail::load_on_grid(c.input, c.h), c.noise_sigma, c.seed);
  const PhiField field = build_field(c.phi, u0.rows(), u0.cols(), u0.h());
  auto snapshot = [&](std::size_t k, double, const ScalarImage& u) {
    if (c.snapshot_every > 0 && k % c.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "_step%04zu.vgf", k);
      save_image(u, prefix + name);
    }
  };
  const FlowTrajectory traj = run_flow(u0, c.dt, c.n_steps, field, c.solver, snapshot);
  std::ostringstream csv;
  csv.precision(17);
  csv << "step,time,energy,gap\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    csv << k << "," << traj.times[k] << "," << traj.energies[k] << ","
        << (k == 0 ? 0.0 : traj.step_gaps[k - 1]) << "\n";
  }
  write_file(c.metrics_path.empty() ? prefix + "_flow.csv" : c.metrics_path, csv.str());
  save_image(traj.states.back(), prefix + "_final.vgf");
  out << nlohmann::json{{"command", "flow"},
                        {"steps", c.n_steps},
                        {"final_energy", json_number(traj.energies.back())},
                        {"output", prefix}}
             .dump()
      << "\n";
  return kOk;
}

inline void grid_shape(const RunConfig& c, std::size_t& rows, std::size_t& cols, double& h) {
  if (!c.input.empty()) {
    const ScalarImage img = detail::load_on_grid(c.input, c.h);
    rows = img.rows();
    cols = img.cols();
    h = img.h();
    return;
  }
  for (const std::string* path : {&c.phi.p_field, &c.phi.a_field, &c.phi.w_field}) {
    if (!path->empty()) {
      const ScalarImage img = load_image(*path);
      rows = img.rows();
      cols = img.cols();
      h = c.h.value_or(default_spacing(rows, cols));
      return;
    }
  }
  if (c.rows == 0 || c.cols == 0) {
    throw UsageError("grid shape unknown: give 'input', a parameter field, or 'rows' and 'cols'");
  }
  rows = c.rows;
  cols = c.cols;
  h = c.h.value_or(default_spacing(rows, cols));
}

inline int run_check_conditions(const RunConfig& c, std::ostream& out) {
  std::size_t rows = 0, cols = 0;
  double h = 1.0;
  grid_shape(c, rows, cols, h);
  const PhiField field = build_field(c.phi, rows, cols, h);
  nlohmann::json arr = nlohmann::json::array();
  for (const ConditionReport& r : check_all(field)) arr.push_back(to_json(r));
  write_json(arr, c.output, out);
  return kOk;
}

inline int run_conjugate_table(const RunConfig& c, std::ostream& out) {
  std::size_t rows = 0, cols = 0;
  double h = 1.0;
  grid_shape(c, rows, cols, h);
  const PhiField field = build_field(c.phi, rows, cols, h);
  if (c.s_samples < 2) throw UsageError("s_samples must be >= 2");
  const Pixel px{c.pixel_row, c.pixel_col};
  const LegendreOracle oracle(field.at(px), c.t_max, c.t_samples);
  std::ostringstream csv;
  csv.precision(17);
  csv << "s,conjugate,numeric\n";
  auto cell = [](ExtReal v) {
    std::ostringstream s;
    s.precision(17);
    if (v.is_infinite()) {
      s << "inf";
    } else {
      s << v.value();
    }
    return s.str();
  };
  for (std::size_t k = 0; k < c.s_samples; ++k) {
    const double s = c.s_max * static_cast<double>(k) / static_cast<double>(c.s_samples - 1);
    csv << s << "," << cell(conjugate_eval(field, px, s)) << "," << cell(oracle(s)) << "\n";
  }
  if (c.output.empty() || c.output == "-") {
    out << csv.str();
  } else {
    write_file(c.output, csv.str());
  }
  return kOk;
}

}  // namespace detail

inline nlohmann::json error_json(int code, const std::string& kind, const std::string& message) {
  return {{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
}

/// Dispatches a command. Failures are reported as one JSON line on `err`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (!known_command(c.command)) throw UsageError("unknown command '" + c.command + "'");
    if (c.command == "denoise") return detail::run_denoise(c, out);
    if (c.command == "certify") return detail::run_certify(c, out);
    if (c.command == "flow") return detail::run_flow_command(c, out);
    if (c.command == "check-conditions") return detail::run_check_conditions(c, out);
    return detail::run_conjugate_table(c, out);
  } catch (const UsageError& e) {
    err << error_json(kUsage, "usage", e.what()).dump() << "\n" << kUsageText;
    return kUsage;
  } catch (const ParseError& e) {
    nlohmann::json j = error_json(kDataError, "parse", e.what());
    j["error"]["offset"] = e.offset();
    err << j.dump() << "\n";
    return kDataError;
  } catch (const SolverError& e) {
    err << error_json(kDataError, "solver", e.what()).dump() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << error_json(kDataError, "data", e.what()).dump() << "\n";
    return kDataError;
  }
}

/// Config file first, then `--set key=value` overrides in order.
inline std::map<std::string, std::string> merge_settings(const std::string& config_path,
                                                         const std::vector<std::string>& sets) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = parse_key_values(read_file(config_path));
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

}  // namespace vgrof::cli

#endif  // VGROF_CLI_HPP_
