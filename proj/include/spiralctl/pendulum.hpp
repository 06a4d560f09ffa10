#pragma once

#include "spiralctl/numkit/ode.hpp"
#include "spiralctl/planar.hpp"

#include <utility>

namespace spiralctl::pendulum {

/// Spherical inverted pendulum: point bob of mass m on a massless rod of
/// length l, hinged to a base of mass M that moves in the horizontal plane.
struct PendulumParams {
  double M = 1.0;  // base mass, kg
  double m = 1.0;  // bob mass, kg
  double l = 1.0;  // rod length, m
  double g = 1.0;  // gravity, m/s^2

  /// k = g (M + m) / (M l), the upright stiffness.
  [[nodiscard]] double stiffness() const { return g * (M + m) / (M * l); }
  /// 1 / (M l), the gain of the base force on the angular acceleration.
  [[nodiscard]] double input_gain() const { return 1.0 / (M * l); }
  /// Throws DomainError unless all parameters are positive and finite.
  void validate() const;
};

/// Local angles (x1, x2) of the rod, their rates, and the base position and
/// velocity (xi, eta). The bob sits at (xi + l sin x1, eta + l sin x2,
/// l sqrt(1 - sin^2 x1 - sin^2 x2)).
struct MechState {
  double x1 = 0.0;
  double x2 = 0.0;
  double dx1 = 0.0;
  double dx2 = 0.0;
  double xi = 0.0;
  double eta = 0.0;
  double dxi = 0.0;
  double deta = 0.0;

  [[nodiscard]] numkit::Vector to_vector() const;
  [[nodiscard]] static MechState from_vector(const numkit::Vector& v);
};

/// Euler-Lagrange equations for q = (xi, eta, x1, x2) with generalized force
/// (u1, u2, 0, 0). The result holds the time derivative of every field of s.
/// Throws ControlBoundViolated if |u| > 1 and SingularMassMatrix at the edge
/// of the chart (sin^2 x1 + sin^2 x2 -> 1).
MechState nonlinear_rhs(const PendulumParams& p, const MechState& s, Planar u);

/// Kinetic plus potential energy of the same Lagrangian.
double mechanical_energy(const PendulumParams& p, const MechState& s);

/// Upright linearization with the base eliminated:
/// x' = y, y' = k x - u / (M l).
std::pair<Planar, Planar> linear_rhs(const PendulumParams& p, Planar x, Planar y, Planar u);

/// The same linear model as a 4x6 matrix [A | B] acting on
/// (x1, x2, y1, y2, u1, u2).
numkit::Matrix linear_system_matrix(const PendulumParams& p);

/// Local angles from zenith theta in [0, pi] and azimuth phi in [0, 2 pi).
std::pair<double, double> spherical_to_local(double theta, double phi);

}  // namespace spiralctl::pendulum
