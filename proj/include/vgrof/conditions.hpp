#ifndef VGROF_CONDITIONS_HPP_
#define VGROF_CONDITIONS_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vgrof/grid.hpp"
#include "vgrof/phi.hpp"

// Numerical checkers for the regularity conditions on sampled Phi-fields.
// A1/VA1/RVA1 quantify over moduli of continuity and are not checked
// directly; for the variable exponent and double phase families they are
// equivalent to the Hoelder-type conditions on p and a checked below.

namespace vgrof {

enum class Condition {
  A0,
  aIncP,
  aDecQ,
  LogHolder,
  StrongHolderP,
  AlmostHolderA,
  StrongHolderA
};

inline std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::A0: return "A0";
    case Condition::aIncP: return "aInc_p";
    case Condition::aDecQ: return "aDec_q";
    case Condition::LogHolder: return "log_holder";
    case Condition::StrongHolderP: return "strong_holder_p";
    case Condition::AlmostHolderA: return "almost_holder_a";
    case Condition::StrongHolderA: return "strong_holder_a";
  }
  return "unknown";
}

struct ConditionReport {
  Condition condition = Condition::A0;
  bool holds = false;
  /// beta for A0, L for almost monotonicity, C for the Hoelder quotients, and
  /// the radius-h maximum for the strong surrogates.
  double witness_constant = 0.0;
  std::optional<std::pair<Pixel, Pixel>> worst_pixel_pair;
  /// Shrinking-radius maxima at 8h, 4h, 2h, h (strong surrogates only).
  std::vector<double> radius_maxima;
};

struct ConditionLimits {
  double almost_monotone_cap = 100.0;
  double log_holder_cap = 1.0;
  double almost_holder_cap = 1000.0;
  /// Radius-h threshold for the strong Hoelder surrogates; diagnostic only.
  double strong_threshold = 1e-2;
  double t_min = 1e-3;
  double t_max = 1e3;
  std::size_t t_samples = 200;
};

enum class Monotonicity { Increasing, Decreasing };

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline bool a0_holds_at(const PhiField& field, double beta, Pixel* binding) {
  for (std::size_t i = 0; i < field.rows(); ++i) {
    for (std::size_t j = 0; j < field.cols(); ++j) {
      const LocalPhi phi = field.at(i, j);
      if (!(phi.eval(beta) <= 1.0) || !(phi.eval(1.0 / beta) >= 1.0)) {
        if (binding) *binding = {i, j};
        return false;
      }
    }
  }
  return true;
}

/// Offset-indexed table of Euclidean distances h*sqrt(di^2 + dj^2).
class OffsetTable {
 public:
  OffsetTable(std::size_t rows, std::size_t cols, double h, auto&& fn)
      : cols_(cols), values_(rows * cols) {
    for (std::size_t di = 0; di < rows; ++di) {
      for (std::size_t dj = 0; dj < cols; ++dj) {
        const double d = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
        values_[di * cols + dj] = fn(d);
      }
    }
  }
  double operator()(std::size_t di, std::size_t dj) const { return values_[di * cols_ + dj]; }

 private:
  std::size_t cols_;
  std::vector<double> values_;
};

inline std::size_t absdiff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

/*
 * Shrinking-radius surrogate for a limit "quantity(x, y) -> 0 as x -> y,
 * uniformly in y in Z". For r in {8h, 4h, 2h, h} records the maximum over
 * y in Z and 0 < |x - y| <= r; holds if the maxima are non-increasing and
 * the radius-h value is below the threshold. Empty Z holds vacuously.
 */
template <typename InZero, typename Quantity>
ConditionReport shrinking_radius(Condition cond, const ScalarImage& field, InZero in_zero,
                                 Quantity quantity, double threshold) {
  ConditionReport rep;
  rep.condition = cond;
  constexpr std::array<std::size_t, 4> radii{8, 4, 2, 1};
  const double h = field.h();
  const auto rows = static_cast<std::ptrdiff_t>(field.rows());
  const auto cols = static_cast<std::ptrdiff_t>(field.cols());
  bool any_zero = false;
  for (std::size_t r : radii) {
    double worst = 0.0;
    std::optional<std::pair<Pixel, Pixel>> where;
    const auto ri = static_cast<std::ptrdiff_t>(r);
    for (std::ptrdiff_t yi = 0; yi < rows; ++yi) {
      for (std::ptrdiff_t yj = 0; yj < cols; ++yj) {
        if (!in_zero(field(yi, yj))) continue;
        any_zero = true;
        for (std::ptrdiff_t di = -ri; di <= ri; ++di) {
          for (std::ptrdiff_t dj = -ri; dj <= ri; ++dj) {
            if (di == 0 && dj == 0) continue;
            const std::ptrdiff_t xi = yi + di;
            const std::ptrdiff_t xj = yj + dj;
            if (xi < 0 || xj < 0 || xi >= rows || xj >= cols) continue;
            if (di * di + dj * dj > ri * ri) continue;
            const double dist = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
            const double val = quantity(field(xi, xj), dist);
            if (!where || val > worst) {
              worst = val;
              where = std::pair{Pixel{static_cast<std::size_t>(xi), static_cast<std::size_t>(xj)},
                                Pixel{static_cast<std::size_t>(yi), static_cast<std::size_t>(yj)}};
            }
          }
        }
      }
    }
    rep.radius_maxima.push_back(worst);
    if (r == 1) rep.worst_pixel_pair = where;
  }
  if (!any_zero) {
    rep.holds = true;
    rep.witness_constant = 0.0;
    rep.radius_maxima.assign(radii.size(), 0.0);
    rep.worst_pixel_pair.reset();
    return rep;
  }
  bool monotone = true;
  for (std::size_t k = 1; k < rep.radius_maxima.size(); ++k) {
    monotone = monotone && rep.radius_maxima[k] <= rep.radius_maxima[k - 1];
  }
  rep.witness_constant = rep.radius_maxima.back();
  rep.holds = monotone && rep.witness_constant <= threshold;
  return rep;
}

}  // namespace detail

/*
 * (A0): largest beta in (0,1] with phi(x,beta) <= 1 <= phi(x,1/beta) at every
 * pixel. Both inequalities are inherited by smaller beta, so the admissible
 * set is an interval (0, beta*]; a log grid brackets beta* and bisection
 * refines it.
 */
inline ConditionReport check_a0(const PhiField& field) {
  ConditionReport rep;
  rep.condition = Condition::A0;
  const std::vector<double> grid = detail::log_grid(1e-12, 1.0, 241);
  Pixel binding{};
  if (detail::a0_holds_at(field, 1.0, &binding)) {
    rep.holds = true;
    rep.witness_constant = 1.0;
    return rep;
  }
  std::optional<std::size_t> last_ok;
  for (std::size_t k = grid.size(); k-- > 0;) {
    if (detail::a0_holds_at(field, grid[k], nullptr)) {
      last_ok = k;
      break;
    }
  }
  if (!last_ok) {
    rep.holds = false;
    rep.witness_constant = 0.0;
    rep.worst_pixel_pair = std::pair{binding, binding};
    return rep;
  }
  double lo = grid[*last_ok];
  double hi = grid[*last_ok + 1];
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::a0_holds_at(field, mid, nullptr)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  detail::a0_holds_at(field, hi, &binding);
  rep.holds = true;
  rep.witness_constant = lo;
  rep.worst_pixel_pair = std::pair{binding, binding};
  return rep;
}

/*
 * (aInc)_p / (aDec)_q for g(t) = phi(x,t)/t^exponent on a log grid: the
 * smallest L with g(s) <= L g(t) (inc) or g(t) <= L g(s) (dec) for all
 * sampled s <= t.
 */
inline ConditionReport check_almost_monotone(const PhiField& field, double exponent,
                                             Monotonicity direction,
                                             const ConditionLimits& limits = {}) {
  if (!(exponent >= 1.0)) throw std::invalid_argument("almost monotone: exponent must be >= 1");
  ConditionReport rep;
  rep.condition = direction == Monotonicity::Increasing ? Condition::aIncP : Condition::aDecQ;
  const std::vector<double> ts = detail::log_grid(limits.t_min, limits.t_max, limits.t_samples);
  std::vector<double> powers(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) powers[k] = std::pow(ts[k], exponent);

  double worst = 1.0;
  Pixel where{};
  for (std::size_t i = 0; i < field.rows(); ++i) {
    for (std::size_t j = 0; j < field.cols(); ++j) {
      const LocalPhi phi = field.at(i, j);
      double running = 0.0;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double g = phi.eval(ts[k]) / powers[k];
        double ratio;
        if (direction == Monotonicity::Increasing) {
          running = k == 0 ? g : std::max(running, g);
          ratio = running / g;
        } else {
          running = k == 0 ? g : std::min(running, g);
          ratio = g / running;
        }
        if (ratio > worst) {
          worst = ratio;
          where = {i, j};
        }
      }
    }
  }
  rep.witness_constant = worst;
  rep.holds = std::isfinite(worst) && worst <= limits.almost_monotone_cap;
  rep.worst_pixel_pair = std::pair{where, where};
  return rep;
}

/// Smallest C with |1/p(x) - 1/p(y)| <= C / log(e + 1/|x-y|) over all pixel pairs.
inline ConditionReport check_log_holder(const ScalarImage& p_field,
                                        const ConditionLimits& limits = {}) {
  ConditionReport rep;
  rep.condition = Condition::LogHolder;
  const detail::OffsetTable weight(p_field.rows(), p_field.cols(), p_field.h(), [](double d) {
    return d > 0.0 ? std::log(std::numbers::e + 1.0 / d) : 0.0;
  });
  std::vector<double> inv(p_field.size());
  for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / p_field.values()[k];

  const std::size_t cols = p_field.cols();
  double worst = 0.0;
  for (std::size_t a = 0; a < inv.size(); ++a) {
    for (std::size_t b = a + 1; b < inv.size(); ++b) {
      const double diff = std::abs(inv[a] - inv[b]);
      if (diff == 0.0) continue;
      const double c = diff * weight(detail::absdiff(a / cols, b / cols),
                                     detail::absdiff(a % cols, b % cols));
      if (c > worst) {
        worst = c;
        rep.worst_pixel_pair = std::pair{Pixel{a / cols, a % cols}, Pixel{b / cols, b % cols}};
      }
    }
  }
  rep.witness_constant = worst;
  rep.holds = worst <= limits.log_holder_cap;
  return rep;
}

/// Surrogate for |1 - 1/p(x)| log(1/|x-y|) -> 0 uniformly in y in {p = 1}.
inline ConditionReport check_strong_holder_p(const ScalarImage& p_field,
                                             const ConditionLimits& limits = {}) {
  return detail::shrinking_radius(
      Condition::StrongHolderP, p_field, [](double p) { return p == 1.0; },
      [](double p, double dist) {
        const double lg = std::log(1.0 / dist);
        return std::abs(1.0 - 1.0 / p) * (lg > 0.0 ? lg : 0.0);
      },
      limits.strong_threshold);
}

/// Smallest C with a(y) <= C (a(x) + |x-y|^{n(q-1)}) over all ordered pairs, x = y included.
inline ConditionReport check_double_phase_holder(const ScalarImage& a_field, double q,
                                                 std::size_t n_dim = 2,
                                                 const ConditionLimits& limits = {}) {
  if (!(q > 1.0)) throw std::invalid_argument("double phase holder: q must be > 1");
  ConditionReport rep;
  rep.condition = Condition::AlmostHolderA;
  const double expo = static_cast<double>(n_dim) * (q - 1.0);
  const detail::OffsetTable dpow(a_field.rows(), a_field.cols(), a_field.h(),
                                 [expo](double d) { return std::pow(d, expo); });
  const auto vals = a_field.values();
  const std::size_t cols = a_field.cols();
  double worst = 0.0;
  for (std::size_t x = 0; x < vals.size(); ++x) {
    for (std::size_t y = 0; y < vals.size(); ++y) {
      if (vals[y] == 0.0) continue;
      const double denom =
          vals[x] + dpow(detail::absdiff(x / cols, y / cols), detail::absdiff(x % cols, y % cols));
      const double c = vals[y] / denom;
      if (c > worst) {
        worst = c;
        rep.worst_pixel_pair = std::pair{Pixel{x / cols, x % cols}, Pixel{y / cols, y % cols}};
      }
    }
  }
  rep.witness_constant = worst;
  rep.holds = worst <= limits.almost_holder_cap;
  return rep;
}

/// Surrogate for a(x)/|x-y|^{n(q-1)} -> 0 uniformly in y in {a = 0}.
inline ConditionReport check_strong_holder_a(const ScalarImage& a_field, double q,
                                             std::size_t n_dim = 2,
                                             const ConditionLimits& limits = {}) {
  if (!(q > 1.0)) throw std::invalid_argument("strong holder a: q must be > 1");
  const double expo = static_cast<double>(n_dim) * (q - 1.0);
  return detail::shrinking_radius(
      Condition::StrongHolderA, a_field, [](double a) { return a == 0.0; },
      [expo](double a, double dist) { return a / std::pow(dist, expo); },
      limits.strong_threshold);
}

/// Every checker that applies to the field's family.
inline std::vector<ConditionReport> check_all(const PhiField& field,
                                              const ConditionLimits& limits = {}) {
  std::vector<ConditionReport> out;
  out.push_back(check_a0(field));
  switch (field.family()) {
    case Family::ClassicalTV:
    case Family::PowerWeighted:
      out.push_back(check_almost_monotone(field, 1.0, Monotonicity::Increasing, limits));
      break;
    case Family::VariableExponent: {
      double pmax = 1.0;
      double pmin = std::numeric_limits<double>::infinity();
      for (double p : field.parameter().values()) {
        pmax = std::max(pmax, p);
        pmin = std::min(pmin, p);
      }
      out.push_back(check_almost_monotone(field, pmin, Monotonicity::Increasing, limits));
      out.push_back(check_almost_monotone(field, pmax, Monotonicity::Decreasing, limits));
      out.push_back(check_log_holder(field.parameter(), limits));
      out.push_back(check_strong_holder_p(field.parameter(), limits));
      break;
    }
    case Family::DoublePhase:
      out.push_back(check_almost_monotone(field, 1.0, Monotonicity::Increasing, limits));
      out.push_back(check_almost_monotone(field, field.q(), Monotonicity::Decreasing, limits));
      out.push_back(check_double_phase_holder(field.parameter(), field.q(), 2, limits));
      out.push_back(check_strong_holder_a(field.parameter(), field.q(), 2, limits));
      break;
  }
  return out;
}

}  // namespace vgrof

#endif  // VGROF_CONDITIONS_HPP_
