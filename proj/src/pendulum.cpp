#include "spiralctl/pendulum.hpp"

#include "spiralctl/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace spiralctl::pendulum {

namespace {

constexpr double kChartEdge = 1e-12;

struct Kinematics {
  Eigen::Matrix<double, 3, 4> jac;  // d r_bob / d q
  Eigen::Vector3d quad;             // velocity-quadratic part of the bob acceleration
  double height;                    // cos of the polar angle
};

Kinematics bob_kinematics(const PendulumParams& p, const MechState& s) {
  const double s1 = std::sin(s.x1), c1 = std::cos(s.x1);
  const double s2 = std::sin(s.x2), c2 = std::cos(s.x2);
  const double rest = 1.0 - s1 * s1 - s2 * s2;
  if (rest <= kChartEdge) {
    throw SingularMassMatrix("pendulum: state at the edge of the local angle chart");
  }
  const double c = std::sqrt(rest);

  Kinematics k;
  k.height = c;
  k.jac.setZero();
  k.jac(0, 0) = 1.0;
  k.jac(1, 1) = 1.0;
  k.jac(0, 2) = p.l * c1;
  k.jac(2, 2) = -p.l * s1 * c1 / c;
  k.jac(1, 3) = p.l * c2;
  k.jac(2, 3) = -p.l * s2 * c2 / c;

  // F = sin^2 x1 + sin^2 x2, c = sqrt(1 - F)
  const double f_dot = 2.0 * (s1 * c1 * s.dx1 + s2 * c2 * s.dx2);
  const double f_ddot = 2.0 * ((c1 * c1 - s1 * s1) * s.dx1 * s.dx1 +
                               (c2 * c2 - s2 * s2) * s.dx2 * s.dx2);
  k.quad << -p.l * s1 * s.dx1 * s.dx1, -p.l * s2 * s.dx2 * s.dx2,
      p.l * (-f_ddot / (2.0 * c) - f_dot * f_dot / (4.0 * c * c * c));
  return k;
}

}  // namespace

void PendulumParams::validate() const {
  for (double v : {M, m, l, g}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("pendulum parameters M, m, l, g must be positive and finite");
    }
  }
}

numkit::Vector MechState::to_vector() const {
  numkit::Vector v(8);
  v << x1, x2, dx1, dx2, xi, eta, dxi, deta;
  return v;
}

MechState MechState::from_vector(const numkit::Vector& v) {
  if (v.size() != 8) throw DomainError("MechState: expected 8 components");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

MechState nonlinear_rhs(const PendulumParams& p, const MechState& s, Planar u) {
  if (std::abs(u) > 1.0 + 1e-12) throw ControlBoundViolated("pendulum: |u| exceeds 1");
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (std::abs(s.x1) > half_pi || std::abs(s.x2) > half_pi) {
    throw DomainError("pendulum: local angles must lie in [-pi/2, pi/2]");
  }
  const Kinematics k = bob_kinematics(p, s);

  Eigen::Matrix4d mass = p.m * k.jac.transpose() * k.jac;
  mass(0, 0) += p.M;
  mass(1, 1) += p.M;

  Eigen::Vector4d force;
  force << u.real(), u.imag(), 0.0, 0.0;
  // gravity: V = m g l c
  force[2] -= p.m * p.g * k.jac(2, 2);
  force[3] -= p.m * p.g * k.jac(2, 3);
  force -= p.m * k.jac.transpose() * k.quad;

  const Eigen::LDLT<Eigen::Matrix4d> ldlt(mass);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularMassMatrix("pendulum: mass matrix is not positive definite");
  }
  const Eigen::Vector4d acc = ldlt.solve(force);

  MechState d;
  d.x1 = s.dx1;
  d.x2 = s.dx2;
  d.dx1 = acc[2];
  d.dx2 = acc[3];
  d.xi = s.dxi;
  d.eta = s.deta;
  d.dxi = acc[0];
  d.deta = acc[1];
  return d;
}

double mechanical_energy(const PendulumParams& p, const MechState& s) {
  const double s1 = std::sin(s.x1), c1 = std::cos(s.x1);
  const double s2 = std::sin(s.x2), c2 = std::cos(s.x2);
  const double c = std::sqrt(1.0 - s1 * s1 - s2 * s2);
  const double vx = s.dxi + p.l * c1 * s.dx1;
  const double vy = s.deta + p.l * c2 * s.dx2;
  const double vz = -p.l * (s1 * c1 * s.dx1 + s2 * c2 * s.dx2) / c;
  const double kinetic = 0.5 * p.M * (s.dxi * s.dxi + s.deta * s.deta) +
                         0.5 * p.m * (vx * vx + vy * vy + vz * vz);
  return kinetic + p.m * p.g * p.l * c;
}

std::pair<Planar, Planar> linear_rhs(const PendulumParams& p, Planar x, Planar y, Planar u) {
  return {y, p.stiffness() * x - p.input_gain() * u};
}

numkit::Matrix linear_system_matrix(const PendulumParams& p) {
  numkit::Matrix a = numkit::Matrix::Zero(4, 6);
  a(0, 2) = 1.0;
  a(1, 3) = 1.0;
  a(2, 0) = p.stiffness();
  a(3, 1) = p.stiffness();
  a(2, 4) = -p.input_gain();
  a(3, 5) = -p.input_gain();
  return a;
}

std::pair<double, double> spherical_to_local(double theta, double phi) {
  const double st = std::sin(theta);
  return {std::asin(st * std::sin(phi)), std::asin(st * std::cos(phi))};
}

}  // namespace spiralctl::pendulum
