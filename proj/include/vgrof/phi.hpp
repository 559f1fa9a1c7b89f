#ifndef VGROF_PHI_HPP_
#define VGROF_PHI_HPP_

#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vgrof/grid.hpp"

namespace vgrof {

/*
 * Nonnegative extended real: either a finite value or +infinity. Conjugates
 * of linear-growth integrands are +infinity outside a bounded interval, and
 * that outcome is a regular result, not an error. Callers must branch on
 * is_finite() before reading value().
 */
class ExtReal {
 public:
  constexpr ExtReal() = default;

  static constexpr ExtReal finite(double v) { return ExtReal(v); }
  static constexpr ExtReal infinity() {
    return ExtReal(std::numeric_limits<double>::infinity());
  }

  constexpr bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
  constexpr bool is_infinite() const { return !is_finite(); }

  double value() const {
    if (!is_finite()) throw std::domain_error("ExtReal: value() of +infinity");
    return v_;
  }
  /// IEEE view, +inf for the infinite case.
  constexpr double raw() const { return v_; }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) { return ExtReal(a.v_ + b.v_); }
  friend constexpr auto operator<=>(const ExtReal&, const ExtReal&) = default;

 private:
  constexpr explicit ExtReal(double v) : v_(v) {}
  double v_ = 0.0;
};

enum class Family { ClassicalTV, VariableExponent, DoublePhase, PowerWeighted };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::ClassicalTV: return "tv";
    case Family::VariableExponent: return "variable_exponent";
    case Family::DoublePhase: return "double_phase";
    case Family::PowerWeighted: return "power_weighted";
  }
  return "unknown";
}

inline Family family_from_string(std::string_view s) {
  if (s == "tv" || s == "classical_tv") return Family::ClassicalTV;
  if (s == "variable_exponent" || s == "vex") return Family::VariableExponent;
  if (s == "double_phase" || s == "dp") return Family::DoublePhase;
  if (s == "power_weighted" || s == "weighted_tv") return Family::PowerWeighted;
  throw std::invalid_argument("unknown phi family '" + std::string(s) + "'");
}

/*
 * The integrand frozen at one pixel. Closed forms:
 *   tv              t                    conj: inf * chi_(1,inf)(s)
 *   var. exponent   t^p / p              conj: s^p'/p'   (p > 1), else as tv
 *   double phase    t + a t^q / q        conj: a^(1-q') (s-1)_+^q' / q'  (a > 0), else as tv
 *   power weighted  w t                  conj: inf * chi_(w,inf)(s)
 */
struct LocalPhi {
  Family family = Family::ClassicalTV;
  double p = 1.0;
  double a = 0.0;
  double q = 2.0;
  double w = 1.0;

  bool linear_growth() const {
    switch (family) {
      case Family::ClassicalTV:
      case Family::PowerWeighted: return true;
      case Family::VariableExponent: return p == 1.0;
      case Family::DoublePhase: return a == 0.0;
    }
    return true;
  }

  double eval(double t) const {
    switch (family) {
      case Family::ClassicalTV: return t;
      case Family::PowerWeighted: return w * t;
      case Family::VariableExponent: return p == 1.0 ? t : std::pow(t, p) / p;
      case Family::DoublePhase: return a == 0.0 ? t : t + a * std::pow(t, q) / q;
    }
    return t;
  }

  /// d/dt phi(t), right derivative at t = 0.
  double derivative(double t) const {
    switch (family) {
      case Family::ClassicalTV: return 1.0;
      case Family::PowerWeighted: return w;
      case Family::VariableExponent: return p == 1.0 ? 1.0 : std::pow(t, p - 1.0);
      case Family::DoublePhase: return a == 0.0 ? 1.0 : 1.0 + a * std::pow(t, q - 1.0);
    }
    return 1.0;
  }

  /// lim phi(t)/t as t -> inf; also the right end of dom phi*.
  ExtReal recession() const {
    switch (family) {
      case Family::ClassicalTV: return ExtReal::finite(1.0);
      case Family::PowerWeighted: return ExtReal::finite(w);
      case Family::VariableExponent:
        return p == 1.0 ? ExtReal::finite(1.0) : ExtReal::infinity();
      case Family::DoublePhase:
        return a == 0.0 ? ExtReal::finite(1.0) : ExtReal::infinity();
    }
    return ExtReal::infinity();
  }

  ExtReal conjugate(double s) const {
    if (linear_growth()) {
      return s > recession().value() ? ExtReal::infinity() : ExtReal::finite(0.0);
    }
    if (family == Family::VariableExponent) {
      const double pc = p / (p - 1.0);
      return ExtReal::finite(std::pow(s, pc) / pc);
    }
    const double qc = q / (q - 1.0);
    const double excess = s > 1.0 ? s - 1.0 : 0.0;
    return ExtReal::finite(std::pow(a, 1.0 - qc) * std::pow(excess, qc) / qc);
  }
};

/*
 * Spatially varying Phi-function on an image grid: a family tag plus the
 * parameter map that family needs (p for variable exponent, a and q for double
 * phase, w for power weighted).
 */
class PhiField {
 public:
  static PhiField classical_tv(std::size_t rows, std::size_t cols,
                               std::optional<double> spacing = std::nullopt) {
    PhiField f(Family::ClassicalTV, ScalarImage(rows, cols, spacing, 0.0));
    return f;
  }

  static PhiField variable_exponent(ScalarImage p) {
    for (double v : p.values()) {
      if (!(v >= 1.0) || !std::isfinite(v)) {
        throw std::invalid_argument("variable exponent: p(x) must be finite and >= 1");
      }
    }
    return PhiField(Family::VariableExponent, std::move(p));
  }

  static PhiField double_phase(ScalarImage a, double q) {
    if (!(q > 1.0) || !std::isfinite(q)) {
      throw std::invalid_argument("double phase: q must be finite and > 1");
    }
    for (double v : a.values()) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("double phase: a(x) must be finite and >= 0");
      }
    }
    PhiField f(Family::DoublePhase, std::move(a));
    f.q_ = q;
    return f;
  }

  static PhiField power_weighted(ScalarImage w) {
    for (double v : w.values()) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("power weighted: w(x) must be finite and > 0");
      }
    }
    return PhiField(Family::PowerWeighted, std::move(w));
  }

  Family family() const { return family_; }
  std::size_t rows() const { return param_.rows(); }
  std::size_t cols() const { return param_.cols(); }
  double h() const { return param_.h(); }
  double q() const { return q_; }

  /// The family's parameter map (p, a or w); all zeros for classical TV.
  const ScalarImage& parameter() const { return param_; }

  LocalPhi at(std::size_t i, std::size_t j) const {
    LocalPhi loc;
    loc.family = family_;
    loc.q = q_;
    const double v = param_(i, j);
    switch (family_) {
      case Family::ClassicalTV: break;
      case Family::VariableExponent: loc.p = v; break;
      case Family::DoublePhase: loc.a = v; break;
      case Family::PowerWeighted: loc.w = v; break;
    }
    return loc;
  }

  LocalPhi at(Pixel px) const {
    param_.check(px);
    return at(px.row, px.col);
  }

  bool matches(const ScalarImage& img) const { return param_.same_shape(img); }

 private:
  PhiField(Family family, ScalarImage param) : family_(family), param_(std::move(param)) {}

  Family family_;
  ScalarImage param_;
  double q_ = 2.0;
};

inline double phi_eval(const PhiField& field, Pixel px, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("phi_eval: t must be >= 0");
  return field.at(px).eval(t);
}

inline ExtReal conjugate_eval(const PhiField& field, Pixel px, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("conjugate_eval: s must be >= 0");
  return field.at(px).conjugate(s);
}

inline ExtReal recession(const PhiField& field, Pixel px) { return field.at(px).recession(); }

/*
 * Brute-force Legendre transform sup_{t in [0, t_max]} (s t - phi(t)) over a
 * uniform sample of n points. The integrand is tabulated once, so evaluating
 * many slopes costs one pass each. Used as an oracle for the closed forms.
 */
class LegendreOracle {
 public:
  LegendreOracle(const LocalPhi& phi, double t_max, std::size_t n_samples)
      : recession_(phi.recession()), ts_(n_samples), values_(n_samples) {
    if (!(t_max > 0.0)) throw std::invalid_argument("numeric_legendre: t_max must be > 0");
    if (n_samples < 2) throw std::invalid_argument("numeric_legendre: need >= 2 samples");
    const double dt = t_max / static_cast<double>(n_samples - 1);
    for (std::size_t k = 0; k < n_samples; ++k) {
      ts_[k] = dt * static_cast<double>(k);
      values_[k] = phi.eval(ts_[k]);
    }
  }

  ExtReal operator()(double s) const {
    if (recession_.is_finite() && s > recession_.value() + 1e-9) return ExtReal::infinity();
    double best = 0.0;  // t = 0 contributes s*0 - phi(0) = 0
    for (std::size_t k = 0; k < ts_.size(); ++k) {
      const double v = s * ts_[k] - values_[k];
      best = v > best ? v : best;
    }
    return ExtReal::finite(best);
  }

 private:
  ExtReal recession_;
  std::vector<double> ts_;
  std::vector<double> values_;
};

inline ExtReal numeric_legendre(const PhiField& field, Pixel px, double s, double t_max,
                                std::size_t n_samples) {
  return LegendreOracle(field.at(px), t_max, n_samples)(s);
}

/// Discrete modular: sum over pixels of phi(x, |grad(x)|) h^2.
inline double phi_total(const PhiField& field, const VectorField& grad) {
  if (grad.rows() != field.rows() || grad.cols() != field.cols()) {
    throw std::invalid_argument("phi_total: shape mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < grad.rows(); ++i) {
    for (std::size_t j = 0; j < grad.cols(); ++j) {
      s += field.at(i, j).eval(grad.magnitude(i, j));
    }
  }
  return s * grad.h() * grad.h();
}

}  // namespace vgrof

#endif  // VGROF_PHI_HPP_
