#ifndef VGROF_TESTS_SUPPORT_HPP_
#define VGROF_TESTS_SUPPORT_HPP_

// Fixtures and independent oracles shared by the unit and acceptance suites.
// Nothing here calls into the solver; oracles use their own index arithmetic.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vgrof/grid.hpp"
#include "vgrof/io.hpp"
#include "vgrof/phi.hpp"

namespace vgrof::testing {

inline ScalarImage random_image(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                double lo = -1.0, double hi = 1.0,
                                std::optional<double> h = std::nullopt) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarImage img(rows, cols, h);
  for (double& v : img.values()) v = dist(gen);
  return img;
}

/// Random field with zero normal trace.
inline VectorField random_field(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                double scale = 1.0, std::optional<double> h = std::nullopt) {
  VectorField xi(rows, cols, h);
  xi.x() = random_image(rows, cols, seed, -scale, scale, h);
  xi.y() = random_image(rows, cols, seed + 7919, -scale, scale, h);
  xi.clear_normal_trace();
  return xi;
}

struct NamedField {
  std::string name;
  PhiField field;
};

/*
 * One field per family. The variable exponent and double phase fields vary
 * across columns and include linear-growth columns (p = 1, a = 0), so every
 * solve mixes both regimes.
 */
inline std::vector<NamedField> family_fields(std::size_t rows, std::size_t cols,
                                             std::optional<double> h = std::nullopt) {
  ScalarImage p(rows, cols, h), a(rows, cols, h), w(rows, cols, h);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double s = cols > 1 ? static_cast<double>(j) / static_cast<double>(cols - 1) : 0.0;
      const double ramp = std::clamp(2.0 * s - 0.5, 0.0, 1.0);
      p(i, j) = 1.0 + ramp;
      a(i, j) = ramp;
      w(i, j) = 0.5 + 0.5 * s;
    }
  }
  std::vector<NamedField> out;
  out.push_back({"classical_tv", PhiField::classical_tv(rows, cols, h)});
  out.push_back({"variable_exponent", PhiField::variable_exponent(p)});
  out.push_back({"double_phase", PhiField::double_phase(a, 2.0)});
  out.push_back({"power_weighted", PhiField::power_weighted(w)});
  return out;
}

/// True when the pixel's conjugate domain is bounded.
inline bool bounded_domain(const LocalPhi& phi) { return phi.recession().is_finite(); }

/*
 * Minimizer of lambda * sum 1/2 |grad u|^2 h^2 + 1/2 ||u - f||^2, i.e.
 * (I - lambda Lap_h) u = f with the 5-point Neumann Laplacian, assembled from
 * the stencil directly and solved by sparse Cholesky.
 */
inline ScalarImage neumann_quadratic_solve(const ScalarImage& f, double lambda) {
  const std::size_t rows = f.rows();
  const std::size_t cols = f.cols();
  const std::size_t n = rows * cols;
  const double c = lambda / (f.h() * f.h());
  std::vector<Eigen::Triplet<double>> trip;
  auto idx = [cols](std::size_t i, std::size_t j) { return static_cast<int>(i * cols + j); };
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double diag = 1.0;
      const std::pair<long, long> nbrs[] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
      for (auto [di, dj] : nbrs) {
        const long ni = static_cast<long>(i) + di;
        const long nj = static_cast<long>(j) + dj;
        if (ni < 0 || nj < 0 || ni >= static_cast<long>(rows) || nj >= static_cast<long>(cols)) {
          continue;
        }
        diag += c;
        trip.emplace_back(idx(i, j), idx(ni, nj), -c);
      }
      trip.emplace_back(idx(i, j), idx(i, j), diag);
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  Eigen::VectorXd rhs(static_cast<int>(n));
  for (std::size_t k = 0; k < n; ++k) rhs[static_cast<int>(k)] = f.values()[k];
  const Eigen::VectorXd x = solver.solve(rhs);
  ScalarImage u(rows, cols, f.h());
  for (std::size_t k = 0; k < n; ++k) u.values()[k] = x[static_cast<int>(k)];
  return u;
}

/// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& fn, double lo, double hi,
                             int iterations = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int k = 0; k < iterations; ++k) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

/// The repository's 64x64 test image.
inline ScalarImage bundled_image() { return load_image(VGROF_DATA_DIR "/test64.pgm"); }

}  // namespace vgrof::testing

#endif  // VGROF_TESTS_SUPPORT_HPP_
