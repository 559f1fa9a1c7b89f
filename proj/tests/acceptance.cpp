// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "support.hpp"
#include "vgrof/json_report.hpp"
#include "vgrof/vgrof.hpp"

namespace {

using namespace vgrof;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

PhiField uniform_field(Family fam, double param, double q = 2.0) {
  const ScalarImage img(1, 1, 1.0, param);
  switch (fam) {
    case Family::ClassicalTV: return PhiField::classical_tv(1, 1, 1.0);
    case Family::VariableExponent: return PhiField::variable_exponent(img);
    case Family::DoublePhase: return PhiField::double_phase(img, q);
    case Family::PowerWeighted: return PhiField::power_weighted(img);
  }
  throw std::logic_error("unknown family");
}

Outcome conjugates() {
  const auto start = Clock::now();
  std::vector<std::pair<std::string, PhiField>> cases;
  cases.emplace_back("tv", uniform_field(Family::ClassicalTV, 0.0));
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    cases.emplace_back("p=" + std::to_string(p), uniform_field(Family::VariableExponent, p));
  }
  for (double a : {0.0, 0.1, 1.0}) {
    for (double q : {1.5, 2.0, 3.0}) {
      cases.emplace_back("a=" + std::to_string(a) + ",q=" + std::to_string(q),
                         uniform_field(Family::DoublePhase, a, q));
    }
  }
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& [name, field] : cases) {
    const LocalPhi phi = field.at(0, 0);
    const ExtReal rec = phi.recession();
    // Inside the domain: [0, rec) when bounded, else [0, 3]. For unbounded domains the
    // sample range is sized to twice the largest maximizer so the grid resolves small slopes.
    const double s_hi = rec.is_finite() ? rec.value() : 3.0;
    double t_max = 1e3;
    if (!rec.is_finite()) {
      t_max = 1.0;
      while (phi.derivative(t_max) < s_hi) t_max *= 2.0;
      t_max *= 2.0;
    }
    const LegendreOracle oracle(phi, t_max, 1000000);
    for (int k = 0; k < 200; ++k) {
      const double s = s_hi * (static_cast<double>(k) + 0.5) / 200.0;
      const ExtReal closed = phi.conjugate(s);
      const ExtReal numeric = oracle(s);
      if (!closed.is_finite() || !numeric.is_finite()) {
        return {false, name + ": infinite inside the domain at s=" + std::to_string(s)};
      }
      const double err = std::abs(closed.value() - numeric.value()) /
                         std::max(1.0, std::abs(numeric.value()));
      worst = std::max(worst, err);
      if (err > 1e-6) return {false, name + ": mismatch at s=" + std::to_string(s)};
      ++checked;
    }
    if (rec.is_finite()) {
      for (double s : {rec.value() + 1e-6, rec.value() + 0.5, rec.value() + 10.0}) {
        if (!phi.conjugate(s).is_infinite() || !oracle(s).is_infinite()) {
          return {false, name + ": finite outside the domain at s=" + std::to_string(s)};
        }
      }
    }
  }
  const double t = seconds_since(start);
  return {t < 10.0, fmt("%.0f slopes over 14 parameter sets, max rel err %.2e, %.2f s (limit 10 s)",
                        static_cast<double>(checked), worst, t)};
}

Outcome gauss_green() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const ScalarImage v = testing::random_image(16, 16, 1000 + s);
    const VectorField xi = testing::random_field(16, 16, 5000 + s);
    const double scale = std::max(1.0, norm(v) * std::sqrt(inner(xi, xi)) * operator_norm_bound(v.h()));
    const double defect = std::abs(pairing(xi, v) + inner(v, divergence(xi))) / scale;
    worst = std::max(worst, defect);
  }
  const double t = seconds_since(start);
  return {worst <= 1e-12 && t < 1.0,
          fmt("max scaled defect %.2e (limit 1e-12), %.3f s (limit 1 s)", worst, t)};
}

Outcome young_inequality() {
  double worst = 0.0;
  const double lambda = 0.7;
  for (const auto& nf : testing::family_fields(12, 12)) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ScalarImage u = testing::random_image(12, 12, 2000 + s, -1.0, 1.0);
      VectorField eta = testing::random_field(12, 12, 3000 + s, 1.0);
      // Keep xi_bar = eta/lambda strictly inside dom phi*.
      for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) {
          const ExtReal rec = nf.field.at(i, j).recession();
          const double mag = eta.magnitude(i, j);
          if (rec.is_finite() && mag > 0.0) {
            const double cap = 0.95 * lambda * rec.value();
            const double shrink = std::min(1.0, cap / mag);
            eta.x()(i, j) *= shrink;
            eta.y()(i, j) *= shrink;
          }
        }
      }
      const YoungMap ym = young_equality_map(u, eta, nf.field, lambda);
      if (!ym.total.is_finite()) return {false, nf.name + ": infeasible sample"};
      worst = std::min(worst, ym.min_residual);
    }
  }
  return {worst >= -1e-12, fmt("400 pairs, min residual %.2e (limit -1e-12)", worst)};
}

Outcome quadratic_oracle() {
  const auto start = Clock::now();
  const ScalarImage f = testing::random_image(32, 32, 77, 0.0, 1.0);
  const PhiField field = PhiField::variable_exponent(ScalarImage(32, 32, std::nullopt, 2.0));
  double worst = 0.0;
  for (double lambda : {0.05, 0.5}) {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.gap_tol = 1e-13;
    cfg.max_iters = 100000;
    const SolveResult r = solve_rof(f, field, cfg);
    const ScalarImage ref = testing::neumann_quadratic_solve(f, lambda);
    worst = std::max(worst, norm(r.u - ref) / norm(ref));
  }
  const double t = seconds_since(start);
  return {worst <= 1e-6 && t < 30.0,
          fmt("max relative error %.2e (limit 1e-6), %.2f s (limit 30 s)", worst, t)};
}

Outcome two_pixel() {
  ScalarImage f(1, 2, 1.0);
  f(0, 1) = 1.0;
  const PhiField field = PhiField::classical_tv(1, 2, 1.0);
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.gap_tol = 1e-14;
  const SolveResult r = solve_rof(f, field, cfg);
  const double err = std::max(std::abs(r.u(0, 0) - 0.1), std::abs(r.u(0, 1) - 0.9));
  // Analytic flux on the single interior edge: u = f + div eta gives eta = lambda.
  VectorField eta(1, 2, 1.0);
  eta.x()(0, 0) = 0.1;
  ScalarImage u(1, 2, 1.0);
  u(0, 0) = 0.1;
  u(0, 1) = 0.9;
  const CertificateReport rep = certify(u, eta, f, field, 0.1);
  const double gap = rep.gap_abs.value();
  const bool ok = err <= 1e-8 && r.gap <= 1e-10 && gap <= 1e-10 && rep.pass;
  return {ok, fmt("solver |u - (0.1,0.9)| = %.2e, solver gap %.2e, analytic-pair gap %.2e", err,
                  r.gap, gap)};
}

struct EndToEnd {
  std::string name;
  SolveResult solve;
  CertificateReport cert;
  double seconds = 0.0;
};

std::vector<EndToEnd> run_end_to_end() {
  const ScalarImage f = add_noise(testing::bundled_image(), 0.1, 42);
  std::vector<EndToEnd> out;
  for (const auto& nf : testing::family_fields(64, 64)) {
    const auto start = Clock::now();
    SolverConfig cfg;
    cfg.lambda = 0.1;
    cfg.gap_tol = 1e-4;
    cfg.max_iters = 20000;
    EndToEnd e;
    e.name = nf.name;
    e.solve = solve_rof(f, nf.field, cfg);
    CertificateTolerances tol;
    tol.gap_rel = 1e-4;
    e.cert = certify(e.solve.u, e.solve.xi, f, nf.field, cfg.lambda, tol);
    e.seconds = seconds_since(start);
    out.push_back(std::move(e));
  }
  return out;
}

Outcome end_to_end(const std::vector<EndToEnd>& runs) {
  std::string detail;
  bool ok = true;
  for (const EndToEnd& e : runs) {
    const bool pass = e.solve.converged && e.solve.gap_rel <= 1e-4 && e.solve.iterations <= 20000 &&
                      e.cert.pass && e.cert.div_residual <= 1e-8 &&
                      e.cert.trace_violation == 0.0 && e.seconds < 300.0;
    ok = ok && pass;
    detail += e.name + fmt(" %.0f it, gap_rel %.1e, div %.1e, ",
                           static_cast<double>(e.solve.iterations), e.cert.gap_rel,
                           e.cert.div_residual) +
              fmt("%.1f s", e.seconds) + (pass ? "; " : " FAIL; ");
  }
  return {ok, detail};
}

Outcome truncation() {
  std::size_t checks = 0, violations = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ScalarImage v = testing::random_image(16, 16, 7000 + s, -1.5, 1.5);
    for (const auto& nf : testing::family_fields(16, 16)) {
      const double e = energy(v, nf.field);
      for (double m : {0.1, 0.5, 1.0}) {
        ++checks;
        if (energy(truncate(v, m), nf.field) > e) ++violations;
      }
    }
  }
  return {violations == 0, fmt("%.0f comparisons, %.0f violations", static_cast<double>(checks),
                               static_cast<double>(violations))};
}

bool linear_growth_pixel(const PhiField& field, std::size_t i, std::size_t j) {
  const LocalPhi phi = field.at(i, j);
  switch (field.family()) {
    case Family::ClassicalTV: return true;
    case Family::VariableExponent: return phi.p == 1.0;
    case Family::DoublePhase: return phi.a == 0.0;
    case Family::PowerWeighted: return false;
  }
  return false;
}

Outcome dual_feasibility() {
  double worst = -1.0;
  std::size_t inspected = 0;
  const ScalarImage f = testing::random_image(24, 24, 31, 0.0, 1.0);
  for (const auto& nf : testing::family_fields(24, 24)) {
    for (double lambda : {0.02, 0.1, 0.5}) {
      SolverConfig cfg;
      cfg.lambda = lambda;
      cfg.max_iters = 2000;
      cfg.gap_tol = 1e-12;
      solve_rof(f, nf.field, cfg, [&](std::size_t, const VectorField& eta) {
        for (std::size_t i = 0; i < 24; ++i) {
          for (std::size_t j = 0; j < 24; ++j) {
            if (!linear_growth_pixel(nf.field, i, j)) continue;
            ++inspected;
            worst = std::max(worst, eta.magnitude(i, j) - lambda);
          }
        }
      });
    }
  }
  // Direct prox_dual calls on large inputs.
  const LocalPhi tv = uniform_field(Family::ClassicalTV, 0.0).at(0, 0);
  const LocalPhi p1 = uniform_field(Family::VariableExponent, 1.0).at(0, 0);
  const LocalPhi a0 = uniform_field(Family::DoublePhase, 0.0, 3.0).at(0, 0);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int k = 0; k < 10000; ++k) {
    const Vec2 z{dist(gen), dist(gen)};
    for (const LocalPhi& phi : {tv, p1, a0}) {
      const double lambda = 0.3;
      const Vec2 r = prox_dual(phi, z, 0.5, lambda);
      ++inspected;
      worst = std::max(worst, std::hypot(r.x, r.y) - lambda);
    }
  }
  return {worst <= 1e-12, fmt("%.0f checks, max |eta| - lambda = %.2e (limit 1e-12)",
                              static_cast<double>(inspected), worst)};
}

Outcome flow() {
  ScalarImage u0(32, 32, std::nullopt);
  const ScalarImage img = testing::bundled_image();
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j < 32; ++j) u0(i, j) = img(2 * i, 2 * j);
  }
  u0 = add_noise(u0, 0.05, 7);
  const double dt = 1e-3;
  std::string detail;
  bool ok = true;
  for (const auto& nf : testing::family_fields(32, 32)) {
    SolverConfig cfg;
    cfg.max_iters = 100000;
    const FlowTrajectory t = run_flow(u0, dt, 50, nf.field, cfg);
    double worst_rise = -1e300, worst_mean = 0.0;
    bool energy_ok = true;
    for (std::size_t k = 1; k < t.states.size(); ++k) {
      const double rise = t.energies[k] - t.energies[k - 1];
      worst_rise = std::max(worst_rise, rise);
      if (rise > t.step_gaps[k - 1] / dt) energy_ok = false;
      worst_mean = std::max(worst_mean, std::abs(t.states[k].mean() - u0.mean()));
    }
    // One-step consistency at the start and midway.
    bool bit_exact = true;
    for (std::size_t k : {std::size_t{0}, std::size_t{25}}) {
      SolverConfig direct = cfg;
      direct.lambda = dt;
      const SolveResult r = solve_rof(t.states[k], nf.field, direct);
      const FlowStep s = flow_step(t.states[k], dt, nf.field, cfg);
      bit_exact = bit_exact && encode_float_grid(r.u) == encode_float_grid(s.u) &&
                  encode_float_grid(r.u) == encode_float_grid(t.states[k + 1]);
    }
    const bool pass = energy_ok && worst_mean <= 1e-10 && bit_exact;
    ok = ok && pass;
    detail += nf.name + fmt(" energy %.3g -> %.3g, max rise %.1e", t.energies.front(), t.energies.back(),
                           worst_rise) +
              fmt(", mean drift %.1e", worst_mean) +
              (bit_exact ? " bit-exact" : " NOT bit-exact") + (pass ? "; " : " FAIL; ");
  }
  return {ok, detail};
}

Outcome conditions() {
  const std::size_t n = 16;
  const ConditionReport flat = check_log_holder(ScalarImage(n, n, std::nullopt, 1.7));
  ScalarImage p(n, n, std::nullopt, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = n / 2; j < n; ++j) p(i, j) = 2.0;
  }
  const ConditionReport jump = check_log_holder(p);
  const ConditionReport dp = check_double_phase_holder(ScalarImage(n, n, std::nullopt, 0.4), 2.0);
  ScalarImage a(n, n, std::nullopt, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = n / 2; j < n; ++j) a(i, j) = 1.0;
  }
  const ConditionReport strong = check_strong_holder_a(a, 2.0);
  const bool ok = flat.holds && flat.witness_constant == 0.0 && !jump.holds && dp.holds &&
                  dp.witness_constant == 1.0 && !strong.holds;
  return {ok, fmt("constant p C = %g; p jump C = %.3f (fails); constant a C = %g",
                  flat.witness_constant, jump.witness_constant, dp.witness_constant) +
                  fmt("; a jump surrogate %.0f (fails)", strong.witness_constant)};
}

Outcome reproducibility(const std::vector<EndToEnd>& first) {
  const std::vector<EndToEnd> second = run_end_to_end();
  std::size_t identical = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    const bool same = encode_pgm(first[k].solve.u) == encode_pgm(second[k].solve.u) &&
                      encode_float_grid(first[k].solve.u) == encode_float_grid(second[k].solve.u) &&
                      encode_float_grid(first[k].solve.xi.x()) ==
                          encode_float_grid(second[k].solve.xi.x()) &&
                      encode_float_grid(first[k].solve.xi.y()) ==
                          encode_float_grid(second[k].solve.xi.y()) &&
                      to_json(first[k].cert).dump() == to_json(second[k].cert).dump();
    if (same) ++identical;
  }
  return {identical == first.size(),
          fmt("%.0f of %.0f families bit-identical (images, fluxes, certificate JSON)",
              static_cast<double>(identical), static_cast<double>(first.size()))};
}

}  // namespace

int main() {
  report(1, "conjugate correctness", conjugates);
  report(2, "discrete Gauss-Green", gauss_green);
  report(3, "pointwise Young inequality", young_inequality);
  report(4, "quadratic oracle", quadratic_oracle);
  report(5, "two-pixel TV oracle", two_pixel);
  std::vector<EndToEnd> runs;
  report(6, "end-to-end certification", [&] {
    runs = run_end_to_end();
    return end_to_end(runs);
  });
  report(7, "truncation monotonicity", truncation);
  report(8, "dual feasibility on linear-growth pixels", dual_feasibility);
  report(9, "flow properties", flow);
  report(10, "condition checkers", conditions);
  report(11, "reproducibility", [&] {
    if (runs.empty()) return Outcome{false, "criterion 6 produced no runs"};
    return reproducibility(runs);
  });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
