#ifndef VGROF_CALCULUS_HPP_
#define VGROF_CALCULUS_HPP_

#include <algorithm>
#include <stdexcept>

#include "vgrof/grid.hpp"

namespace vgrof {

/// Forward differences, zero on the last column (x) and last row (y).
inline VectorField gradient(const ScalarImage& v) {
  const std::size_t rows = v.rows();
  const std::size_t cols = v.cols();
  const double inv_h = 1.0 / v.h();
  VectorField g = VectorField::like(v);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      g.x()(i, j) = j + 1 < cols ? (v(i, j + 1) - v(i, j)) * inv_h : 0.0;
      g.y()(i, j) = i + 1 < rows ? (v(i + 1, j) - v(i, j)) * inv_h : 0.0;
    }
  }
  return g;
}

/*
 * Backward-difference divergence (xi(i,j) - xi(i,j-1)) / h with xi(i,-1) = 0.
 * For fields with zero normal trace this is exactly the negative adjoint of
 * gradient() under the h^2-weighted inner product; a nonzero boundary flux
 * shows up as the boundary term of Gauss-Green.
 */
inline ScalarImage divergence(const VectorField& xi) {
  const std::size_t rows = xi.rows();
  const std::size_t cols = xi.cols();
  const double inv_h = 1.0 / xi.h();
  ScalarImage d(rows, cols, xi.h());
  const ScalarImage& x = xi.x();
  const ScalarImage& y = xi.y();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double dx = x(i, j) - (j > 0 ? x(i, j - 1) : 0.0);
      const double dy = y(i, j) - (i > 0 ? y(i - 1, j) : 0.0);
      d(i, j) = (dx + dy) * inv_h;
    }
  }
  return d;
}

/// Pointwise clamp to [-m, m].
inline ScalarImage truncate(const ScalarImage& v, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("truncate: level must be > 0");
  ScalarImage out = v;
  for (double& e : out.values()) e = std::clamp(e, -m, m);
  return out;
}

/// Total Anzellotti pairing (xi, Dv)(Omega) = <xi, grad v>.
inline double pairing(const VectorField& xi, const ScalarImage& v) {
  if (!xi.same_shape(v)) throw std::invalid_argument("pairing: shape mismatch");
  return inner(xi, gradient(v));
}

/*
 * Pairing tested against a weight psi, assembled from the distributional
 * definition  -<psi v, div xi> - <v xi, grad psi>.  By the discrete product
 * rule this equals sum h^2 (xi_x psi(i,j+1) dx v + xi_y psi(i+1,j) dy v).
 */
inline double pairing_weighted(const VectorField& xi, const ScalarImage& v,
                               const ScalarImage& psi) {
  if (!xi.same_shape(v) || !v.same_shape(psi)) {
    throw std::invalid_argument("pairing_weighted: shape mismatch");
  }
  const ScalarImage div = divergence(xi);
  const VectorField grad_psi = gradient(psi);
  const double h2 = v.h() * v.h();
  double s = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      s -= psi(i, j) * v(i, j) * div(i, j);
      s -= v(i, j) * (xi.x()(i, j) * grad_psi.x()(i, j) + xi.y()(i, j) * grad_psi.y()(i, j));
    }
  }
  return s * h2;
}

}  // namespace vgrof

#endif  // VGROF_CALCULUS_HPP_
