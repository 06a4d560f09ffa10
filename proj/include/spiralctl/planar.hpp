#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace spiralctl {

/// A vector of R^2, identified with a complex number: R e^{i phi} is
/// (R cos phi, R sin phi).
using Planar = std::complex<double>;

inline constexpr double kSqrt5 = 2.23606797749978969640917366873128;

/// Euclidean inner product on R^2.
inline double inner(Planar a, Planar b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Element of O(2): an optional reflection across the first axis followed by
/// a rotation.
struct Isometry {
  double angle = 0.0;
  bool reflect = false;

  [[nodiscard]] Planar apply(Planar v) const {
    const Planar w = reflect ? std::conj(v) : v;
    return std::polar(1.0, angle) * w;
  }
  [[nodiscard]] static Isometry identity() { return {}; }
  [[nodiscard]] static Isometry rotation(double angle) { return {angle, false}; }
};

/// Diagonal 2x2 matrix diag(k1, k2). K = 0 is the model problem.
struct KMatrix {
  double k1 = 0.0;
  double k2 = 0.0;

  [[nodiscard]] Planar apply(Planar v) const { return {k1 * v.real(), k2 * v.imag()}; }
  [[nodiscard]] bool is_zero() const { return k1 == 0.0 && k2 == 0.0; }
  [[nodiscard]] bool is_nondegenerate() const { return k1 != 0.0 && k2 != 0.0; }
  [[nodiscard]] static KMatrix zero() { return {}; }
  [[nodiscard]] static KMatrix scalar(double k) { return {k, k}; }
};

}  // namespace spiralctl
