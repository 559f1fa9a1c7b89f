#ifndef VGROF_RNG_HPP_
#define VGROF_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace vgrof {

/// SplitMix64 (Steele, Lea, Flood). Output depends only on the seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1], 53 random bits.
  double uniform_open_closed() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/*
 * Standard normal pairs by Box-Muller on SplitMix64 uniforms. Uses std::log,
 * std::sqrt, std::cos and std::sin; results are bit-reproducible for a given
 * seed on one platform/libm and agree across libms to a few ulp.
 */
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform_open_closed();
    const double u2 = rng_.uniform_open_closed();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vgrof

#endif  // VGROF_RNG_HPP_
