#pragma once

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mmdvar/error.hpp"

namespace support {

template <class Fn>
mmdvar::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const mmdvar::Error& e) {
    return e.kind();
  }
  FAIL("expected mmdvar::Error");
  return mmdvar::ErrorKind::Config;
}

// Uniform on (-3, 3); `grid` snaps to multiples of 1/4 so ties are common.
inline std::vector<double> draws(std::mt19937_64& rng, std::size_t count, bool grid = false) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(count);
  for (auto& x : v) x = grid ? std::round(u(rng) * 4.0) / 4.0 : u(rng);
  return v;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace support
