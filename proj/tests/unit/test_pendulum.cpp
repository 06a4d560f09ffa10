#include "spiralctl/errors.hpp"
#include "spiralctl/numkit/linalg.hpp"
#include "spiralctl/pendulum.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace spiralctl;
using namespace spiralctl::pendulum;
using numkit::Vector;

namespace {

// dynamics as a map of (state, u) for linearization
numkit::VectorField augmented(const PendulumParams& p) {
  return [p](const Vector& v) {
    const MechState s = MechState::from_vector(v.head(8));
    return nonlinear_rhs(p, s, {v[8], v[9]}).to_vector();
  };
}

}  // namespace

TEST(Params, Stiffness) {
  PendulumParams p;
  EXPECT_DOUBLE_EQ(p.stiffness(), 2.0);
  EXPECT_DOUBLE_EQ(p.input_gain(), 1.0);
  p.M = 2;
  p.m = 0.5;
  p.l = 0.25;
  p.g = 9.81;
  EXPECT_NEAR(p.stiffness(), 9.81 * 2.5 / 0.5, 1e-12);
}

TEST(Params, Validation) {
  for (double bad : {0.0, -1.0, std::nan("")}) {
    PendulumParams p;
    p.l = bad;
    EXPECT_THROW(p.validate(), DomainError);
  }
  EXPECT_NO_THROW(PendulumParams{}.validate());
}

TEST(NonlinearRhs, UprightRestIsEquilibrium) {
  const MechState d = nonlinear_rhs({}, {}, {0, 0});
  EXPECT_EQ(d.to_vector().cwiseAbs().maxCoeff(), 0.0);
}

TEST(NonlinearRhs, ControlBound) {
  EXPECT_THROW(nonlinear_rhs({}, {}, {0.9, 0.9}), ControlBoundViolated);
  EXPECT_NO_THROW(nonlinear_rhs({}, {}, {1.0, 0.0}));
}

TEST(NonlinearRhs, ChartBoundary) {
  MechState s;
  s.x1 = std::numbers::pi / 4;
  s.x2 = std::numbers::pi / 4;  // sin^2 + sin^2 = 1
  EXPECT_THROW(nonlinear_rhs({}, s, {0, 0}), SingularMassMatrix);
}

TEST(NonlinearRhs, LinearizationMatchesLinearModel) {
  auto g = fixture::rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    PendulumParams p{fixture::uniform(g, 0.2, 5), fixture::uniform(g, 0.1, 3),
                     fixture::uniform(g, 0.2, 3), fixture::uniform(g, 0.5, 12)};
    const numkit::Matrix jac = numkit::jacobian_fd(augmented(p), Vector::Zero(10));
    // rows of (dx1, dx2, ddx1, ddx2), columns of (x1, x2, dx1, dx2, u1, u2)
    numkit::Matrix got(4, 6);
    const int rows[4] = {0, 1, 2, 3};
    const int cols[6] = {0, 1, 2, 3, 8, 9};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 6; ++j) got(i, j) = jac(rows[i], cols[j]);
    }
    EXPECT_LE(fixture::max_abs(got - linear_system_matrix(p)), 1e-6) << "trial " << trial;
  }
}

TEST(NonlinearRhs, EnergyConservedWithoutForce) {
  PendulumParams p;
  MechState s;
  s.x1 = 0.2;
  s.x2 = -0.1;
  s.dx1 = 0.05;
  s.dxi = 0.3;
  numkit::Field f = [&](double, const Vector& v) {
    return nonlinear_rhs(p, MechState::from_vector(v), {0, 0}).to_vector();
  };
  const auto traj = numkit::integrate_adaptive(f, s.to_vector(), {0, 1.0}, 1e-12, 1e-14);
  const double e0 = mechanical_energy(p, s);
  for (const auto& v : traj.states()) {
    EXPECT_NEAR(mechanical_energy(p, MechState::from_vector(v)), e0, 1e-8 * std::abs(e0));
  }
}

TEST(NonlinearRhs, BaseMomentumConservedWithoutForce) {
  // no horizontal external force: total horizontal momentum is constant
  PendulumParams p{1.5, 0.7, 0.8, 9.81};
  MechState s;
  s.x1 = 0.1;
  s.x2 = 0.05;
  s.dx2 = -0.2;
  numkit::Field f = [&](double, const Vector& v) {
    return nonlinear_rhs(p, MechState::from_vector(v), {0, 0}).to_vector();
  };
  auto momentum = [&](const MechState& q) {
    return (p.M + p.m) * q.dxi + p.m * p.l * std::cos(q.x1) * q.dx1;
  };
  const auto traj = numkit::integrate_adaptive(f, s.to_vector(), {0, 0.5}, 1e-12, 1e-14);
  EXPECT_NEAR(momentum(MechState::from_vector(traj.back_state())), momentum(s), 1e-9);
}

TEST(LinearRhs, Examples) {
  const PendulumParams p;
  auto [dx, dy] = linear_rhs(p, {0, 0}, {0, 0}, {0, 0});
  EXPECT_EQ(dx, Planar(0, 0));
  EXPECT_EQ(dy, Planar(0, 0));
  std::tie(dx, dy) = linear_rhs(p, {1, 0}, {0, 0}, {0, 0});
  EXPECT_EQ(dy, Planar(2, 0));
  std::tie(dx, dy) = linear_rhs(p, {0, 0}, {0, 0}, {1, 0});
  EXPECT_EQ(dy, Planar(-1, 0));
  std::tie(dx, dy) = linear_rhs(p, {0, 0}, {0.3, -0.2}, {0, 0});
  EXPECT_EQ(dx, Planar(0.3, -0.2));
}

TEST(LinearRhs, AxesDecouple) {
  const numkit::Matrix a = linear_system_matrix(PendulumParams{2, 1, 0.5, 9.81});
  // axis 1 is (x1, y1, u1) = columns/rows {0, 2, 4}; axis 2 is {1, 3, 5}
  for (int r : {0, 2}) {
    for (int c : {1, 3, 5}) EXPECT_EQ(a(r, c), 0.0);
  }
  for (int r : {1, 3}) {
    for (int c : {0, 2, 4}) EXPECT_EQ(a(r, c), 0.0);
  }
}

TEST(SphericalToLocal, Examples) {
  auto [a, b] = spherical_to_local(0.0, 1.234);
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
  std::tie(a, b) = spherical_to_local(std::numbers::pi / 2, std::numbers::pi / 2);
  EXPECT_NEAR(a, std::numbers::pi / 2, 1e-7);
  EXPECT_NEAR(b, 0.0, 1e-15);
  std::tie(a, b) = spherical_to_local(0.1, 0.3);
  EXPECT_DOUBLE_EQ(a, std::asin(std::sin(0.1) * std::sin(0.3)));
  EXPECT_DOUBLE_EQ(b, std::asin(std::sin(0.1) * std::cos(0.3)));
}
