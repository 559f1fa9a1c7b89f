#ifndef VGROF_GRID_HPP_
#define VGROF_GRID_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vgrof {

/// Row/column coordinate of a pixel.
struct Pixel {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Default grid spacing: the longer image side has unit length.
inline double default_spacing(std::size_t rows, std::size_t cols) {
  return 1.0 / static_cast<double>(std::max(rows, cols));
}

/*
 * Real-valued function on a rows x cols pixel grid with spacing h, stored
 * row-major. Used for the datum f, iterates u, divergences w and for the
 * spatial parameter maps of a PhiField.
 */
class ScalarImage {
 public:
  ScalarImage() = default;

  ScalarImage(std::size_t rows, std::size_t cols,
              std::optional<double> spacing = std::nullopt, double fill = 0.0)
      : rows_(rows), cols_(cols),
        h_(spacing.value_or(rows && cols ? default_spacing(rows, cols) : 1.0)),
        data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("ScalarImage: empty grid");
    }
    if (!(h_ > 0.0) || !std::isfinite(h_)) {
      throw std::invalid_argument("ScalarImage: grid spacing must be positive");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  double h() const { return h_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double& at(Pixel px) {
    check(px);
    return (*this)(px.row, px.col);
  }
  double at(Pixel px) const {
    check(px);
    return (*this)(px.row, px.col);
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const ScalarImage& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  double sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }
  double mean() const { return sum() / static_cast<double>(data_.size()); }

  void check(Pixel px) const {
    if (px.row >= rows_ || px.col >= cols_) {
      throw std::out_of_range("pixel (" + std::to_string(px.row) + ", " +
                              std::to_string(px.col) + ") outside " +
                              std::to_string(rows_) + "x" + std::to_string(cols_) +
                              " grid");
    }
  }

  friend bool operator==(const ScalarImage&, const ScalarImage&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double h_ = 1.0;
  std::vector<double> data_;
};

/*
 * Two-channel field on the staggered forward-difference grid. x(i,j) lives on
 * the edge between (i,j) and (i,j+1), y(i,j) between (i,j) and (i+1,j). The
 * entries x(i, cols-1) and y(rows-1, j) are the outward normal fluxes through
 * the boundary; they vanish exactly when the field has zero normal trace.
 */
class VectorField {
 public:
  VectorField() = default;
  VectorField(std::size_t rows, std::size_t cols, std::optional<double> spacing = std::nullopt)
      : x_(rows, cols, spacing), y_(rows, cols, spacing) {}

  static VectorField like(const ScalarImage& img) {
    return VectorField(img.rows(), img.cols(), img.h());
  }

  std::size_t rows() const { return x_.rows(); }
  std::size_t cols() const { return x_.cols(); }
  std::size_t size() const { return x_.size(); }
  double h() const { return x_.h(); }

  ScalarImage& x() { return x_; }
  ScalarImage& y() { return y_; }
  const ScalarImage& x() const { return x_; }
  const ScalarImage& y() const { return y_; }

  double magnitude(std::size_t i, std::size_t j) const {
    return std::hypot(x_(i, j), y_(i, j));
  }

  bool same_shape(const ScalarImage& img) const { return x_.same_shape(img); }

  /// Largest absolute outward flux through the boundary.
  double normal_trace_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) worst = std::max(worst, std::abs(x_(i, cols() - 1)));
    for (std::size_t j = 0; j < cols(); ++j) worst = std::max(worst, std::abs(y_(rows() - 1, j)));
    return worst;
  }
  bool has_zero_normal_trace() const { return normal_trace_violation() == 0.0; }

  void clear_normal_trace() {
    for (std::size_t i = 0; i < rows(); ++i) x_(i, cols() - 1) = 0.0;
    for (std::size_t j = 0; j < cols(); ++j) y_(rows() - 1, j) = 0.0;
  }

  bool all_finite() const { return x_.all_finite() && y_.all_finite(); }

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  ScalarImage x_;
  ScalarImage y_;
};

/// Grid inner product h^2 * sum(a*b).
inline double inner(const ScalarImage& a, const ScalarImage& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("inner: shape mismatch");
  double s = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
  return s * a.h() * a.h();
}

inline double inner(const VectorField& a, const VectorField& b) {
  return inner(a.x(), b.x()) + inner(a.y(), b.y());
}

inline double norm_squared(const ScalarImage& a) { return inner(a, a); }
inline double norm(const ScalarImage& a) { return std::sqrt(norm_squared(a)); }

inline ScalarImage operator-(const ScalarImage& a, const ScalarImage& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("difference: shape mismatch");
  ScalarImage out = a;
  auto ov = out.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] -= bv[k];
  return out;
}

inline ScalarImage operator+(const ScalarImage& a, const ScalarImage& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("sum: shape mismatch");
  ScalarImage out = a;
  auto ov = out.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] += bv[k];
  return out;
}

inline ScalarImage scaled(const ScalarImage& a, double c) {
  ScalarImage out = a;
  for (double& v : out.values()) v *= c;
  return out;
}

inline VectorField scaled(const VectorField& a, double c) {
  VectorField out = a;
  for (double& v : out.x().values()) v *= c;
  for (double& v : out.y().values()) v *= c;
  return out;
}

}  // namespace vgrof

#endif  // VGROF_GRID_HPP_
