#pragma once

#include <cmath>
#include <numbers>
#include <random>

namespace umlab::detail {

// Portable draws from the raw mt19937_64 stream; the std distributions are
// implementation-defined and would break cross-platform reproducibility.
inline double unit_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
  const double u1 = unit_uniform(rng), u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace umlab::detail
