#pragma once

#include "spiralctl/numkit/ode.hpp"
#include "spiralctl/planar.hpp"
#include "spiralctl/pmp.hpp"

#include <array>
#include <complex>

namespace spiralctl::spiral {

using Complex = std::complex<double>;

inline constexpr double kA0 = -1.0 / 126.0;

/// A0 = a0, A_{m+1} = -A_m (4 - m + i alpha) for m = 0, 1, 2.
std::array<Complex, 4> a_constants(double alpha = kSqrt5, double a0 = kA0);

/// Self-similar logarithmic-spiral extremals of the model problem,
///   z_m(t) = zeta(-A_{m-1} (T - t)^{5-m} e^{i alpha log(T - t)}),
///   u(t)   = zeta(e^{i alpha log(T - t)}),
/// for 0 <= t < T. The alpha = -sqrt5 branch is the reflection of the
/// alpha = +sqrt5 branch.
struct SpiralFamily {
  double t_star = 1.0;
  double alpha = kSqrt5;
  Isometry zeta{};
  std::array<Complex, 4> a = a_constants(kSqrt5);

  /// Validates T* > 0 and alpha = +-sqrt5, and fills the constants.
  static SpiralFamily make(double t_star, double alpha = kSqrt5, Isometry zeta = {});
};

pmp::ZState spiral_state(double t, const SpiralFamily& fam);

/// Closed-form time derivative of spiral_state.
pmp::ZState spiral_derivative(double t, const SpiralFamily& fam);

Planar spiral_control(double t, const SpiralFamily& fam);

/// Leading-order point of the spiral family of Problem 1 at time T - eps:
/// the K-dependent corrections are dropped, so this is spiral_state(T - eps)
/// of the model family with hitting time T.
pmp::ZState seed_near_origin(double t_hit, double eps, const SpiralFamily& fam,
                             const KMatrix& k);

/// Unwrapped phase change of the planar component stored at
/// (re_index, re_index + 1) over [t0, t1], in turns. Throws PhaseJump when
/// consecutive samples rotate by pi/2 or more.
double winding_number(const numkit::Trajectory& traj, std::size_t re_index, double t0,
                      double t1);

/// T / max(sqrt|x0|, |y0|).
double hitting_ratio(Planar x0, Planar y0, double t_hit);

/// Closed-form cost of the model spiral, |A2|^2 T^5 / 5.
double spiral_cost(const SpiralFamily& fam);

}  // namespace spiralctl::spiral
