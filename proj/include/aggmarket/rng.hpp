#pragma once

#include <cstdint>
#include <random>

namespace aggmarket {

// Deterministic RNG used by the randomized search operations. Doubles are
// drawn from raw engine output so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed * 0x9E3779B97F4A7C15ull + 1) {}

  // Per-trial engine derived deterministically from (seed, trial index), so
  // trials are independent and may be evaluated in any order.
  static Rng for_trial(std::uint64_t seed, std::uint64_t trial) {
    return Rng(seed ^ (trial * 0xD1B54A32D192ED03ull + 0x9E3779B97F4A7C15ull));
  }

  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  std::uint64_t integer(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace aggmarket
