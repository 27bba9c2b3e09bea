#pragma once
// Deterministic random sources for Monte Carlo runs. Each trial derives its
// own seed, so results do not depend on evaluation order. Gaussian variates
// are produced from raw engine words; standard-library distributions are not
// pinned across implementations and would break byte-level reproducibility.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "snq/types.hpp"

namespace snq {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ull * (trial + 1));
}

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 significant bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  cplx cnormal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    return cplx(s * normal(), s * normal());
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace snq
