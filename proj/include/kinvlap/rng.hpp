#pragma once

#include <cstdint>
#include <random>

#include "kinvlap/types.hpp"

namespace kinvlap {

/// Seedable random source with a fixed bit-to-double mapping, so that the
/// same seed yields the same stream on every platform. mt19937_64 defines
/// its output sequence in the standard; we avoid std distributions because
/// their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  Real uniform() { return static_cast<Real>(raw() >> 11) * 0x1.0p-53; }

  Real uniform(Real a, Real b) { return a + (b - a) * uniform(); }

  /// Uniform angle in [0, 2*pi).
  Real angle() { return kTwoPi * uniform(); }

  /// Haar-uniform unit quaternion (w, x, y, z) via the subgroup algorithm.
  Eigen::Vector4d unit_quaternion() {
    const Real u1 = uniform();
    const Real u2 = kTwoPi * uniform();
    const Real u3 = kTwoPi * uniform();
    const Real a = std::sqrt(1.0 - u1);
    const Real b = std::sqrt(u1);
    return {b * std::cos(u3), a * std::sin(u2), a * std::cos(u2), b * std::sin(u3)};
  }

  /// Independent stream for one trial, derived from a master seed by a fixed
  /// mixing step so that trials can run in any order.
  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (trial_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kinvlap
