#ifndef VGROF_SOLVER_HPP_
#define VGROF_SOLVER_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vgrof/calculus.hpp"
#include "vgrof/certificate.hpp"
#include "vgrof/grid.hpp"
#include "vgrof/phi.hpp"
#include "vgrof/rng.hpp"

namespace vgrof {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double lambda = 0.1;
  /// Step sizes; values <= 0 select 1/L with L = sqrt(8)/h.
  double tau = 0.0;
  double sigma = 0.0;
  double theta = 1.0;
  std::size_t max_iters = 20000;
  /// Relative duality gap at which the iteration stops.
  double gap_tol = 1e-4;
  /// Iterations between gap evaluations.
  std::size_t check_every = 10;
  double newton_tol = 1e-12;
  int newton_max = 50;
  std::uint64_t seed = 0;
  /// CSV log (iter,primal,dual,gap) of every gap evaluation, if nonempty.
  std::string log_path;
};

struct IterationRecord {
  std::size_t iter = 0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct SolveResult {
  ScalarImage u;
  /// Dual flux eta (lambda times the calibrating field), zero normal trace.
  VectorField xi;
  std::size_t iterations = 0;
  double primal_energy = 0.0;
  double dual_energy = 0.0;
  double gap = 0.0;
  double gap_rel = 0.0;
  bool converged = false;
  std::vector<IterationRecord> history;
};

/// Called after each dual update with the iteration number and the flux.
using DualObserver = std::function<void(std::size_t, const VectorField&)>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// ||grad|| <= sqrt(8)/h for forward differences on any grid.
inline double operator_norm_bound(double h) { return std::sqrt(8.0) / h; }

/*
 * Power iteration on -div(grad v) for the norm of the discrete gradient,
 * starting from `start`.
 */
inline double power_method_norm(ScalarImage start, std::size_t iterations = 100) {
  double n0 = norm(start);
  if (!(n0 > 0.0)) throw std::invalid_argument("power_method_norm: zero initial vector");
  ScalarImage v = scaled(start, 1.0 / n0);
  double estimate = 0.0;
  for (std::size_t k = 0; k < iterations; ++k) {
    ScalarImage next = scaled(divergence(gradient(v)), -1.0);
    estimate = std::sqrt(std::max(0.0, inner(next, v)));
    const double nn = norm(next);
    if (nn == 0.0) return 0.0;
    v = scaled(next, 1.0 / nn);
  }
  return estimate;
}

inline double power_method_norm(std::size_t rows, std::size_t cols, double h,
                                std::size_t iterations = 100, std::uint64_t seed = 0) {
  ScalarImage start(rows, cols, h);
  SplitMix64 rng(seed);
  for (double& v : start.values()) v = rng.uniform_open_closed() - 0.5;
  return power_method_norm(std::move(start), iterations);
}

namespace detail {

/*
 * Root of F(r) = r - target + gain * ((r - offset)/lambda)^expo on
 * [offset, target], F increasing. Newton safeguarded by the sign bracket;
 * bisection once newton_max steps are spent.
 */
inline double monotone_root(double target, double offset, double gain, double expo,
                            double lambda, double tol, int newton_max) {
  auto value = [&](double r) {
    return r - target + gain * std::pow((r - offset) / lambda, expo);
  };
  auto slope = [&](double r) {
    return 1.0 + gain * expo / lambda * std::pow((r - offset) / lambda, expo - 1.0);
  };
  const double scale = std::max(1.0, target);
  double lo = offset;
  double hi = target;
  double r = hi;
  for (int it = 0; it < newton_max; ++it) {
    const double fr = value(r);
    if (std::abs(fr) <= tol * scale) return r;
    (fr > 0.0 ? hi : lo) = r;
    double next = r - fr / slope(r);
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    r = next;
  }
  for (int it = 0; it < 200; ++it) {
    const double fr = value(r);
    if (std::abs(fr) <= tol * scale || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return r;
    }
    (fr > 0.0 ? hi : lo) = r;
    r = 0.5 * (lo + hi);
  }
  return r;
}

}  // namespace detail

/*
 * Resolvent of sigma * G* with G*(eta) = lambda phi*(x, |eta|/lambda):
 * argmin_eta |eta - z|^2/(2 sigma) + lambda phi*(x, |eta|/lambda).
 * The problem is radial; only the length r = |eta| is solved for.
 */
inline Vec2 prox_dual(const LocalPhi& phi, Vec2 z, double sigma, double lambda,
                      double newton_tol = 1e-12, int newton_max = 50) {
  const double m = std::hypot(z.x, z.y);
  if (m == 0.0) return {0.0, 0.0};
  double r;
  if (phi.linear_growth()) {
    r = std::min(m, lambda * phi.recession().value());
  } else if (phi.family == Family::VariableExponent) {
    const double pc = phi.p / (phi.p - 1.0);
    r = detail::monotone_root(m, 0.0, sigma, pc - 1.0, lambda, newton_tol, newton_max);
  } else {
    if (m <= lambda) {
      r = m;
    } else {
      const double qc = phi.q / (phi.q - 1.0);
      r = detail::monotone_root(m, lambda, sigma * std::pow(phi.a, 1.0 - qc), qc - 1.0, lambda,
                                newton_tol, newton_max);
    }
  }
  const double c = r / m;
  return {z.x * c, z.y * c};
}

inline Vec2 prox_dual(const PhiField& field, Vec2 z, double sigma, double lambda, Pixel px,
                      double newton_tol = 1e-12, int newton_max = 50) {
  if (!(sigma > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("prox_dual: sigma and lambda must be > 0");
  }
  return prox_dual(field.at(px), z, sigma, lambda, newton_tol, newton_max);
}

/// Resolvent of tau * 1/2 ||. - f||^2.
inline ScalarImage prox_primal(const ScalarImage& u_bar, const ScalarImage& f, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_primal: tau must be > 0");
  if (!u_bar.same_shape(f)) throw std::invalid_argument("prox_primal: shape mismatch");
  ScalarImage out = u_bar;
  auto ov = out.values();
  auto fv = f.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] = (ov[k] + tau * fv[k]) / (1.0 + tau);
  return out;
}

namespace detail {

inline void require_finite(const ScalarImage& img, const char* name, std::size_t iter) {
  for (std::size_t i = 0; i < img.rows(); ++i) {
    for (std::size_t j = 0; j < img.cols(); ++j) {
      if (!std::isfinite(img(i, j))) {
        throw SolverError(std::string("non-finite ") + name + " at pixel (" + std::to_string(i) +
                          ", " + std::to_string(j) + ") in iteration " + std::to_string(iter));
      }
    }
  }
}

}  // namespace detail

/*
 * Chambolle-Pock iteration for min_u lambda E_phi(u) + 1/2 ||u - f||^2:
 *
 *   eta  <- prox_dual(eta + sigma grad u_bar)
 *   u    <- prox_primal(u + tau div eta)
 *   u_bar = u + theta (u - u_prev)
 *
 * Every check_every iterations the primal is recovered from the flux as
 * f + div eta, which satisfies the divergence constraint exactly, and the
 * certified duality gap of that pair decides termination. The returned u is
 * this recovered primal.
 */
inline SolveResult solve_rof(const ScalarImage& f, const PhiField& field, const SolverConfig& cfg,
                             const DualObserver& observer = {}) {
  if (!field.matches(f)) throw std::invalid_argument("solve_rof: field and datum differ in shape");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("solve_rof: lambda must be > 0");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
    throw std::invalid_argument("solve_rof: theta must lie in [0, 1]");
  }
  if (!(cfg.gap_tol > 0.0)) throw std::invalid_argument("solve_rof: gap_tol must be > 0");
  if (!f.all_finite()) throw std::invalid_argument("solve_rof: datum has non-finite entries");

  const double bound = operator_norm_bound(f.h());
  const double tau = cfg.tau > 0.0 ? cfg.tau : 1.0 / bound;
  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : 1.0 / bound;
  if (tau * sigma * bound * bound > 1.0 + 1e-12) {
    throw std::invalid_argument("solve_rof: tau*sigma*L^2 must not exceed 1");
  }
  const double lambda = cfg.lambda;
  const std::size_t check_every = std::max<std::size_t>(1, cfg.check_every);

  std::ofstream log;
  if (!cfg.log_path.empty()) {
    log.open(cfg.log_path);
    if (!log) throw std::runtime_error("cannot open log file '" + cfg.log_path + "'");
    log << "iter,primal,dual,gap\n";
  }

  SolveResult res;
  ScalarImage u = f;
  ScalarImage u_bar = f;
  VectorField eta = VectorField::like(f);

  // Field parameters per pixel, hoisted out of the sweep.
  std::vector<LocalPhi> local(f.size());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) local[i * f.cols() + j] = field.at(i, j);
  }

  auto evaluate = [&](std::size_t iter) {
    ScalarImage recovered = f + divergence(eta);
    const DualityGap g = duality_gap(recovered, eta, f, field, lambda);
    IterationRecord rec{iter, g.primal, g.dual, g.gap.raw()};
    res.history.push_back(rec);
    if (log) {
      char line[128];
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", iter, rec.primal, rec.dual,
                    rec.gap);
      log << line;
    }
    res.u = std::move(recovered);
    res.iterations = iter;
    res.primal_energy = g.primal;
    res.dual_energy = g.dual;
    res.gap = g.gap.raw();
    res.gap_rel = g.gap_rel;
    return g.within(cfg.gap_tol);
  };

  res.converged = evaluate(0);
  for (std::size_t k = 1; k <= cfg.max_iters && !res.converged; ++k) {
    const VectorField grad = gradient(u_bar);
    auto ex = eta.x().values();
    auto ey = eta.y().values();
    auto gx = grad.x().values();
    auto gy = grad.y().values();
    for (std::size_t n = 0; n < ex.size(); ++n) {
      const Vec2 z{ex[n] + sigma * gx[n], ey[n] + sigma * gy[n]};
      const Vec2 p = prox_dual(local[n], z, sigma, lambda, cfg.newton_tol, cfg.newton_max);
      ex[n] = p.x;
      ey[n] = p.y;
    }
    if (observer) observer(k, eta);

    const ScalarImage div = divergence(eta);
    auto uv = u.values();
    auto ubv = u_bar.values();
    auto dv = div.values();
    auto fv = f.values();
    for (std::size_t n = 0; n < uv.size(); ++n) {
      const double prev = uv[n];
      uv[n] = (prev + tau * dv[n] + tau * fv[n]) / (1.0 + tau);
      ubv[n] = uv[n] + cfg.theta * (uv[n] - prev);
    }

    if (k % check_every == 0 || k == cfg.max_iters) {
      detail::require_finite(u, "primal iterate", k);
      detail::require_finite(eta.x(), "dual iterate (x)", k);
      detail::require_finite(eta.y(), "dual iterate (y)", k);
      res.converged = evaluate(k);
    }
  }
  res.xi = std::move(eta);
  return res;
}

}  // namespace vgrof

#endif  // VGROF_SOLVER_HPP_
