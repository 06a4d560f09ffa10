#pragma once

#include "spiralctl/numkit/ode.hpp"
#include "spiralctl/pmp.hpp"

#include <random>

namespace spiralctl::fixture {

// fixed seeds so failures reproduce
inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed + salt); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Planar random_planar(std::mt19937_64& g, double r = 1.0) {
  return {uniform(g, -r, r), uniform(g, -r, r)};
}

inline pmp::ZState random_z(std::mt19937_64& g, double r = 1.0) {
  pmp::ZState z;
  for (auto& w : z.z) w = random_planar(g, r);
  return z;
}

inline double max_abs(const numkit::Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace spiralctl::fixture
