#ifndef VGROF_CERTIFICATE_HPP_
#define VGROF_CERTIFICATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vgrof/calculus.hpp"
#include "vgrof/grid.hpp"
#include "vgrof/phi.hpp"

// Optimality certificates for the discrete problem
//
//   min_u  lambda * sum_x phi(x, |grad u(x)|) h^2 + 1/2 ||u - f||^2 .
//
// The dual variable ("flux") eta is the scaled calibration field: eta =
// lambda * xi_bar, where xi_bar satisfies -div xi_bar = w = (f - u)/lambda and
// xi = -xi_bar satisfies div xi = w. The duality gap splits exactly as
//
//   gap = sum_x young(x) + 1/2 ||u - f - div eta||^2,
//   young(x) = h^2 (lambda phi(x,|grad u|) + lambda phi*(x,|eta|/lambda) - eta . grad u),
//
// so a vanishing gap means both the divergence constraint and the pointwise
// Young equality hold.

namespace vgrof {

struct CertificateTolerances {
  double gap_rel = 1e-4;
  double div_rel = 1e-8;
  /// Relative slack when |eta|/lambda overshoots a bounded conjugate domain
  /// by rounding; beyond it the pixel counts as infeasible.
  double domain_slack = 1e-9;
};

namespace detail {

/// phi*(x, s) with s pulled back onto the domain boundary when it overshoots
/// by no more than the relative slack.
inline ExtReal conjugate_with_slack(const LocalPhi& phi, double s, double slack) {
  const ExtReal rec = phi.recession();
  if (rec.is_finite() && s > rec.value()) {
    if (s > rec.value() * (1.0 + slack)) return ExtReal::infinity();
    s = rec.value();
  }
  return phi.conjugate(s);
}

inline void require_shapes(const ScalarImage& u, const VectorField& flux, const ScalarImage& f,
                           const PhiField& field, const char* who) {
  if (!u.same_shape(f) || !flux.same_shape(u) || !field.matches(u)) {
    throw std::invalid_argument(std::string(who) + ": shape mismatch between inputs");
  }
}

}  // namespace detail

struct DualityGap {
  double primal = 0.0;
  /// -infinity when the flux leaves dom phi* somewhere.
  double dual = 0.0;
  ExtReal gap;
  double gap_rel = 0.0;
  std::size_t infeasible_pixels = 0;
  double gap_floor = 0.0;

  /// Relative gap within tol, or absolute gap at rounding level.
  bool within(double tol) const {
    return gap.is_finite() && (gap_rel <= tol || gap.value() <= gap_floor);
  }
};

inline double rof_objective(const ScalarImage& u, const ScalarImage& f, const PhiField& field,
                            double lambda) {
  return lambda * phi_total(field, gradient(u)) + 0.5 * norm_squared(u - f);
}

/*
 * Absolute gap below which the primal and dual values agree to rounding of
 * the data energy 1/2 ||f||^2. Near a constant minimizer both values are of
 * that order and the relative gap is noise.
 */
inline double gap_rounding_floor(const ScalarImage& f) {
  return 1024.0 * std::numeric_limits<double>::epsilon() * 0.5 * norm_squared(f);
}

inline double relative_gap(double gap, double primal, double dual) {
  const double denom = std::max(std::abs(primal), std::isfinite(dual) ? std::abs(dual) : 0.0);
  if (denom == 0.0) return gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return gap / denom;
}

/*
 * Primal value lambda E(u) + 1/2 ||u - f||^2 and dual value
 * 1/2 ||f||^2 - 1/2 ||f + div eta||^2 - lambda sum phi*(x, |eta|/lambda) h^2.
 */
inline DualityGap duality_gap(const ScalarImage& u, const VectorField& flux, const ScalarImage& f,
                              const PhiField& field, double lambda, double domain_slack = 1e-9) {
  detail::require_shapes(u, flux, f, field, "duality_gap");
  if (!(lambda > 0.0)) throw std::invalid_argument("duality_gap: lambda must be > 0");
  DualityGap out;
  out.primal = rof_objective(u, f, field, lambda);
  out.gap_floor = gap_rounding_floor(f);

  double conj = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const ExtReal c = detail::conjugate_with_slack(field.at(i, j),
                                                     flux.magnitude(i, j) / lambda, domain_slack);
      if (c.is_infinite()) {
        ++out.infeasible_pixels;
      } else {
        conj += c.value();
      }
    }
  }
  const double h2 = u.h() * u.h();
  if (out.infeasible_pixels > 0) {
    out.dual = -std::numeric_limits<double>::infinity();
    out.gap = ExtReal::infinity();
    out.gap_rel = std::numeric_limits<double>::infinity();
    return out;
  }
  out.dual = 0.5 * norm_squared(f) - 0.5 * norm_squared(f + divergence(flux)) - lambda * conj * h2;
  const double gap = out.primal - out.dual;
  out.gap = ExtReal::finite(gap);
  out.gap_rel = relative_gap(gap, out.primal, out.dual);
  return out;
}

struct YoungMap {
  ScalarImage residual;
  std::size_t infinite_pixels = 0;
  ExtReal total;
  double min_residual = 0.0;
};

/// Per-pixel defect of the Young equality, h^2-weighted, in flux units.
inline YoungMap young_equality_map(const ScalarImage& u, const VectorField& flux,
                                   const PhiField& field, double lambda,
                                   double domain_slack = 1e-9) {
  if (!flux.same_shape(u) || !field.matches(u)) {
    throw std::invalid_argument("young_equality_map: shape mismatch between inputs");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("young_equality_map: lambda must be > 0");
  const VectorField grad = gradient(u);
  const double h2 = u.h() * u.h();
  YoungMap out;
  out.residual = ScalarImage(u.rows(), u.cols(), u.h());
  double total = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const LocalPhi phi = field.at(i, j);
      const ExtReal c =
          detail::conjugate_with_slack(phi, flux.magnitude(i, j) / lambda, domain_slack);
      if (c.is_infinite()) {
        ++out.infinite_pixels;
        out.residual(i, j) = std::numeric_limits<double>::infinity();
        continue;
      }
      const double pair = flux.x()(i, j) * grad.x()(i, j) + flux.y()(i, j) * grad.y()(i, j);
      const double r = h2 * (lambda * phi.eval(grad.magnitude(i, j)) + lambda * c.value() - pair);
      out.residual(i, j) = r;
      total += r;
      lowest = std::min(lowest, r);
    }
  }
  out.total = out.infinite_pixels ? ExtReal::infinity() : ExtReal::finite(total);
  out.min_residual = lowest;
  return out;
}

struct CertificateReport {
  double lambda = 0.0;
  /// ||div xi - w|| / ||w||, w = (f - u)/lambda (absolute when w = 0).
  double div_residual = 0.0;
  double trace_violation = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  ExtReal gap_abs;
  double gap_rel = 0.0;
  double gap_floor = 0.0;

  ScalarImage young_residual_map;
  ExtReal young_residual_total;
  double young_residual_min = 0.0;
  /// 1/2 ||u - f - div eta||^2; gap = young_residual_total + fidelity_residual.
  double fidelity_residual = 0.0;

  // Totals behind the three equivalent optimality statements, per unit lambda:
  //   (b)  <u, w>            = modular + conjugate_modular
  //   (c)  <xi_bar, grad u>  = modular + conjugate_modular
  //   (d)  young map / lambda = 0 pixelwise
  double modular = 0.0;
  ExtReal conjugate_modular;
  double pairing_uw = 0.0;
  double pairing_xi_bar = 0.0;
  double gauss_green_defect = 0.0;

  std::size_t infeasible_pixels = 0;

  /// div xi = w.
  VectorField xi;
  /// xi_bar = -xi, so -div xi_bar = w.
  VectorField xi_bar;

  bool pass = false;
  std::vector<std::string> failures;
};

/*
 * Certifies that u minimizes the ROF functional with datum f, using the flux
 * eta as the calibrating field. Passes iff every pixel is in dom phi*, the
 * divergence residual and relative gap are within tolerance, and the normal
 * trace vanishes exactly.
 */
inline CertificateReport certify(const ScalarImage& u, const VectorField& flux,
                                 const ScalarImage& f, const PhiField& field, double lambda,
                                 const CertificateTolerances& tol = {}) {
  detail::require_shapes(u, flux, f, field, "certify");
  if (!(lambda > 0.0)) throw std::invalid_argument("certify: lambda must be > 0");
  CertificateReport rep;
  rep.lambda = lambda;
  rep.xi = scaled(flux, -1.0 / lambda);
  rep.xi_bar = scaled(flux, 1.0 / lambda);

  const ScalarImage w = scaled(f - u, 1.0 / lambda);
  const ScalarImage div_xi = divergence(rep.xi);
  const double w_norm = norm(w);
  const double div_err = norm(div_xi - w);
  rep.div_residual = w_norm > 0.0 ? div_err / w_norm : div_err;
  rep.trace_violation = flux.normal_trace_violation();

  const DualityGap g = duality_gap(u, flux, f, field, lambda, tol.domain_slack);
  rep.primal = g.primal;
  rep.dual = g.dual;
  rep.gap_abs = g.gap;
  rep.gap_rel = g.gap_rel;
  rep.gap_floor = g.gap_floor;
  rep.infeasible_pixels = g.infeasible_pixels;

  YoungMap ym = young_equality_map(u, flux, field, lambda, tol.domain_slack);
  rep.young_residual_map = std::move(ym.residual);
  rep.young_residual_total = ym.total;
  rep.young_residual_min = ym.min_residual;
  rep.fidelity_residual = 0.5 * norm_squared(u - f - divergence(flux));

  const VectorField grad = gradient(u);
  const double h2 = u.h() * u.h();
  double conj = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const ExtReal c = detail::conjugate_with_slack(field.at(i, j), rep.xi_bar.magnitude(i, j),
                                                     tol.domain_slack);
      if (c.is_finite()) conj += c.value();
    }
  }
  rep.modular = phi_total(field, grad);
  rep.conjugate_modular =
      rep.infeasible_pixels ? ExtReal::infinity() : ExtReal::finite(conj * h2);
  rep.pairing_uw = inner(u, w);
  rep.pairing_xi_bar = inner(rep.xi_bar, grad);
  rep.gauss_green_defect = std::abs(rep.pairing_xi_bar + inner(u, divergence(rep.xi_bar)));

  if (rep.infeasible_pixels > 0) {
    rep.failures.push_back(std::to_string(rep.infeasible_pixels) +
                           " pixel(s) outside the conjugate domain");
  }
  if (!(rep.div_residual <= tol.div_rel)) rep.failures.push_back("divergence residual");
  if (rep.trace_violation != 0.0) rep.failures.push_back("nonzero normal trace");
  if (!g.within(tol.gap_rel)) rep.failures.push_back("duality gap");
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace vgrof

#endif  // VGROF_CERTIFICATE_HPP_
