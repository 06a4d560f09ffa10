#include "spiralctl/blowup.hpp"
#include "spiralctl/errors.hpp"
#include "spiralctl/pmp.hpp"
#include "spiralctl/spiral.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace spiralctl;
using namespace spiralctl::pmp;
using numkit::Vector;

TEST(ZState, PackingRoundTrip) {
  auto g = fixture::rng(20);
  const ZState z = fixture::random_z(g);
  const Vector v = z.to_vector();
  ASSERT_EQ(v.size(), 8);
  EXPECT_EQ(v[2], z[1].real());
  EXPECT_EQ(v[3], z[1].imag());
  const ZState back = ZState::from_vector(v);
  for (std::size_t m = 0; m < 4; ++m) EXPECT_EQ(back[m], z[m]);
}

TEST(Canonical, SubstitutionRoundTrip) {
  const Canonical c{{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  const ZState z = c.to_z();
  EXPECT_EQ(z[0], Planar(7, 8));
  EXPECT_EQ(z[1], Planar(-5, -6));
  EXPECT_EQ(z[2], Planar(-1, -2));
  EXPECT_EQ(z[3], Planar(-3, -4));
  const Canonical b = Canonical::from_z(z);
  EXPECT_EQ(b.x, c.x);
  EXPECT_EQ(b.psi, c.psi);
}

TEST(ControlLaw, Examples) {
  const Planar a = control_law({3, 4});
  EXPECT_NEAR(a.real(), 0.6, 1e-15);
  EXPECT_NEAR(a.imag(), 0.8, 1e-15);
  EXPECT_EQ(control_law({0, -2}), Planar(0, -1));
  EXPECT_THROW(control_law({0, 0}), SingularControl);
  EXPECT_THROW(control_law({1e-14, 0}), SingularControl);
  EXPECT_NO_THROW(control_law({1e-14, 0}, 0.0));
}

TEST(Hamiltonian, Examples) {
  const KMatrix k{2, 3};
  EXPECT_EQ(hamiltonian({}, {}, {}, {}, {}, k), 0.0);
  EXPECT_DOUBLE_EQ(hamiltonian({1, 0}, {}, {}, {}, {}, k), -0.5);
  // <Kx, psi> with K = diag(2, 3)
  EXPECT_DOUBLE_EQ(hamiltonian({0, 1}, {}, {}, {0, 1}, {}, k), -0.5 + 3.0);
}

TEST(Hamiltonian, MaximizingControlBeatsSampledControls) {
  auto g = fixture::rng(21);
  const KMatrix k{2, -1};
  for (int trial = 0; trial < 50; ++trial) {
    const Planar x = fixture::random_planar(g), y = fixture::random_planar(g),
                 phi = fixture::random_planar(g), psi = fixture::random_planar(g);
    const double best = hamiltonian(x, y, phi, psi, control_law(psi), k);
    for (int j = 0; j < 64; ++j) {
      Planar u = fixture::random_planar(g);
      if (std::abs(u) > 1) u /= std::abs(u);
      EXPECT_GE(best, hamiltonian(x, y, phi, psi, u, k) - 1e-15);
    }
  }
}

TEST(HamRhs, UnitImpulseOnFourthBlock) {
  ZState z;
  z[0] = {1, 0};
  const ZState d = ham_rhs_p2(z);
  EXPECT_EQ(d[0], Planar(0, 0));
  EXPECT_EQ(d[1], Planar(0, 0));
  EXPECT_EQ(d[2], Planar(0, 0));
  EXPECT_EQ(d[3], Planar(-1, 0));
}

TEST(HamRhs, P1WithZeroKIsP2Bitwise) {
  auto g = fixture::rng(22);
  for (int i = 0; i < 100; ++i) {
    const ZState z = fixture::random_z(g);
    const ZState a = ham_rhs_p1(KMatrix::zero(), z), b = ham_rhs_p2(z);
    for (std::size_t m = 0; m < 4; ++m) EXPECT_EQ(a[m], b[m]);
  }
}

TEST(HamRhs, MatchesCanonicalForm) {
  auto g = fixture::rng(23);
  const KMatrix k{2, 3};
  for (int i = 0; i < 50; ++i) {
    const ZState z = fixture::random_z(g);
    const ZState viaz = ham_rhs_p1(k, z);
    const ZState viac = canonical_rhs(k, Canonical::from_z(z)).to_z();
    for (std::size_t m = 0; m < 4; ++m) EXPECT_LE(std::abs(viaz[m] - viac[m]), 1e-12);
  }
}

TEST(HamRhs, SingularControlPropagates) {
  EXPECT_THROW(ham_rhs_p1({1, 1}, ZState{}), SingularControl);
}

TEST(HamRhs, RotationEquivariance) {
  auto g = fixture::rng(24);
  for (int i = 0; i < 50; ++i) {
    const ZState z = fixture::random_z(g);
    const Isometry rho{fixture::uniform(g, 0, 6.28), i % 2 == 1};
    const ZState lhs = ham_rhs_p2(z.transformed(rho));
    const ZState rhs = ham_rhs_p2(z).transformed(rho);
    for (std::size_t m = 0; m < 4; ++m) EXPECT_LE(std::abs(lhs[m] - rhs[m]), 1e-12);
  }
}

TEST(HamRhs, WeightedScalingMapsSolutionsToSolutions) {
  // z_lambda(t) = D_lambda z(t / lambda); check z_lambda' = f(z_lambda) on the spiral
  const auto fam = spiral::SpiralFamily::make(1.0);
  const double lambda = 2.0;
  for (double t : {0.0, 0.4, 1.0, 1.7}) {
    const ZState zl = spiral::spiral_state(t / lambda, fam).dilated(lambda);
    const ZState dz = spiral::spiral_derivative(t / lambda, fam).dilated(lambda);
    const ZState f = ham_rhs_p2(zl);
    for (std::size_t m = 0; m < 4; ++m) {
      EXPECT_LE(std::abs(dz[m] / lambda - f[m]), 1e-9 * (1 + std::abs(f[m])));
    }
  }
}

TEST(Simulate, ModelSpiralHitsAtTStar) {
  const auto fam = spiral::SpiralFamily::make(1.0);
  SimulationOptions o;
  o.handoff_ratio = 1e-2;
  const auto r = simulate_closed_loop(spiral::spiral_state(0, fam), KMatrix::zero(), o);
  ASSERT_TRUE(r.hit_time);
  EXPECT_NEAR(*r.hit_time, 1.0, 1e-3);
  EXPECT_EQ(r.reason, StopKind::Handoff);
}

TEST(Simulate, WithoutHandoffStopsNearSingularLocus) {
  const auto fam = spiral::SpiralFamily::make(1.0);
  const auto r = simulate_closed_loop(spiral::spiral_state(0, fam), KMatrix::zero());
  ASSERT_TRUE(r.hit_time);
  EXPECT_NEAR(*r.hit_time, 1.0, 1e-3);
}

TEST(Simulate, ImmediateStopAtOrigin) {
  ZState z;
  z[0] = {1e-20, 0};
  const auto r = simulate_closed_loop(z, KMatrix::zero());
  ASSERT_TRUE(r.hit_time);
  EXPECT_EQ(*r.hit_time, 0.0);
  EXPECT_EQ(r.reason, StopKind::Radius);
  const auto r0 = simulate_closed_loop(ZState{}, KMatrix::zero());
  EXPECT_EQ(*r0.hit_time, 0.0);
}

TEST(Simulate, EscapeReportsNoHit) {
  ZState z;
  // everything positive on the real axis grows monotonically with K > 0
  z[0] = {1, 0};
  z[1] = {10, 0};
  z[2] = {100, 0};
  z[3] = {1000, 0};
  SimulationOptions o;
  o.escape_radius = 1e5;
  const auto r = simulate_closed_loop(z, KMatrix{2, 2}, o);
  EXPECT_EQ(r.reason, StopKind::Escape);
  EXPECT_FALSE(r.hit_time);
}

TEST(Simulate, HamiltonianConservedAlongExtremal) {
  auto g = fixture::rng(25);
  const KMatrix k{2, 3};
  SimulationOptions o;
  o.t_max = 1.0;
  o.escape_radius = 1e8;
  for (int trial = 0; trial < 5; ++trial) {
    const ZState z0 = fixture::random_z(g);
    const auto r = simulate_closed_loop(z0, k, o);
    const double h0 = hamiltonian(z0, k);
    for (const auto& v : r.trajectory.states()) {
      EXPECT_NEAR(hamiltonian(ZState::from_vector(v), k), h0, 1e-6 * (1 + std::abs(h0)));
    }
  }
}

TEST(Simulate, MaximumConditionOnTrajectory) {
  auto g = fixture::rng(26);
  SimulationOptions o;
  o.t_max = 2.0;
  const auto r = simulate_closed_loop(fixture::random_z(g), KMatrix{1, 1}, o);
  int probes = 0;
  for (const auto& v : r.trajectory.states()) {
    const ZState z = ZState::from_vector(v);
    const double opt = inner(control_law(z[0]), z[0]);
    EXPECT_NEAR(opt, std::abs(z[0]), 1e-12 * (1 + std::abs(z[0])));
    for (int j = 0; j < 4 && probes < 1000; ++j, ++probes) {
      Planar u = fixture::random_planar(g);
      if (std::abs(u) > 1) u /= std::abs(u);
      EXPECT_GE(opt, inner(u, z[0]) - 1e-15);
    }
  }
}

TEST(Simulate, SeedRoundTripForPerturbedSystem) {
  // backward from a seed, then forward again, lands back on the seed
  const auto fam = spiral::SpiralFamily::make(1.0);
  const KMatrix k{2, 2};
  const ZState seed = spiral::seed_near_origin(1.0, 0.3, fam, k);
  const auto back = numkit::integrate_adaptive(p1_field(k), seed.to_vector(), {0.7, 0.2}, 1e-12,
                                               1e-15);
  const auto fwd = numkit::integrate_adaptive(p1_field(k), back.front_state(), {0.2, 0.7}, 1e-12,
                                              1e-15);
  EXPECT_LE((fwd.back_state() - seed.to_vector()).norm(), 1e-5 * seed.norm());
}

TEST(Cost, ZeroTrajectory) {
  const auto traj = numkit::Trajectory::from_samples({0.0, 1.0}, {Vector::Zero(8), Vector::Zero(8)});
  EXPECT_EQ(cost(traj), 0.0);
}

TEST(Cost, ModelSpiralClosedForm) {
  // |x| = |A2| (T - t)^2 so the integral is |A2|^2 T^5 / 5
  const auto fam = spiral::SpiralFamily::make(1.0);
  const double t1 = 0.95;
  const auto traj = numkit::integrate_adaptive(p1_field(KMatrix::zero()),
                                               spiral::spiral_state(0, fam).to_vector(), {0, t1},
                                               1e-13, 1e-16);
  const double a2 = std::norm(fam.a[2]);
  const double want = a2 * (1.0 - std::pow(1.0 - t1, 5)) / 5.0;
  EXPECT_NEAR(cost(traj), want, 1e-8);
}

TEST(Cost, RotationInvariant) {
  const auto f0 = spiral::SpiralFamily::make(1.0);
  const auto f1 = spiral::SpiralFamily::make(1.0, kSqrt5, Isometry{1.1, true});
  auto run = [](const spiral::SpiralFamily& f) {
    return cost(numkit::integrate_adaptive(p1_field(KMatrix::zero()),
                                           spiral::spiral_state(0, f).to_vector(), {0, 0.8}, 1e-12,
                                           1e-16));
  };
  EXPECT_NEAR(run(f0), run(f1), 1e-12);
}

TEST(IsSingular, Cases) {
  const auto zero = numkit::Trajectory::from_samples({0.0, 1.0}, {Vector::Zero(8), Vector::Zero(8)});
  EXPECT_TRUE(is_singular(zero, 0, 1, 1e-13));
  const auto fam = spiral::SpiralFamily::make(1.0);
  const auto traj = numkit::integrate_adaptive(p1_field(KMatrix::zero()),
                                               spiral::spiral_state(0, fam).to_vector(), {0, 0.9},
                                               1e-12, 1e-16);
  EXPECT_FALSE(is_singular(traj, 0, 0.9, 1e-6));
  EXPECT_FALSE(is_singular(traj, 0, 0.9, 0.0));
}

TEST(StopKind, Names) {
  EXPECT_EQ(to_string(StopKind::Radius), "radius");
  EXPECT_EQ(to_string(StopKind::Handoff), "handoff");
}
