#include "spiralctl/errors.hpp"
#include "spiralctl/floquet.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spiralctl;
using namespace spiralctl::floquet;

namespace {

const FloquetReport& chain_rule_report() {
  static const FloquetReport rep = reconstruct_J({}, 16);
  return rep;
}

}  // namespace

TEST(ReferenceMatrix, Entries) {
  const Matrix j = paper_J();
  EXPECT_EQ(j(0, 0), -1.0);
  EXPECT_EQ(j(1, 1), 24.0);
  EXPECT_EQ(j.row(0).tail(8).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(j.col(0).tail(8).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ReferenceMatrix, SpectrumAndClassification) {
  const auto rep = analyze_matrix(paper_J());
  EXPECT_EQ(rep.classification, (std::array<int, 3>{1, 1, 7}));
  EXPECT_LT(rep.spectral_gap_to_paper, 1e-9);
  EXPECT_LT(numkit::pairing_distance(rep.spectrum.eigenvalues, paper_eigenvalues_rounded()), 1e-4);
}

TEST(ReferenceMatrix, CharacteristicPolynomial) {
  const auto got = numkit::char_poly(paper_J());
  const auto want = paper_char_poly();
  ASSERT_EQ(got.size(), want.size());
  double scale = 0;
  for (double c : want) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i < want.size(); ++i) {
    const double tol = want[i] != 0 ? 1e-9 * std::abs(want[i]) : 1e-9 * scale;
    EXPECT_NEAR(got[i], want[i], tol) << "coefficient " << i;
  }
}

TEST(ReferenceMatrix, ClosedFormEigenvaluesSolveTheQuartic) {
  for (const Complex& l : paper_eigenvalues()) {
    const Complex q = (l - 5.0) * l;
    const Complex quartic = q * q + 36.0 * q + 630.0;
    const bool linear = std::abs(l + 1.0) < 1e-12 || std::abs(l) < 1e-12 ||
                        std::abs(l - 4.0) < 1e-12 || std::abs(l - 5.0) < 1e-12 ||
                        std::abs(l - 93.0) < 1e-12;
    EXPECT_TRUE(linear || std::abs(quartic) < 1e-10);
  }
}

TEST(Lyapunov, Orthogonal) {
  const Matrix p0 = lyapunov_transform(0.0);
  EXPECT_EQ(fixture::max_abs(p0 - Matrix::Identity(9, 9)), 0.0);
  for (double s : {0.3, 1.1, 5.0}) {
    const Matrix p = lyapunov_transform(s);
    EXPECT_LE(fixture::max_abs(p.transpose() * p - Matrix::Identity(9, 9)), 1e-14);
    EXPECT_NEAR(p.determinant(), 1.0, 1e-14);
    const double h = 1e-6;
    const Matrix fd = (lyapunov_transform(s + h) - lyapunov_transform(s - h)) / (2 * h);
    EXPECT_LE(fixture::max_abs(fd - lyapunov_transform_derivative(s)), 1e-8);
  }
  const double period = 2 * std::numbers::pi / kSqrt5;
  EXPECT_LE(fixture::max_abs(lyapunov_transform(0.4 + period) - lyapunov_transform(0.4)), 1e-13);
}

TEST(JacobianOnCycle, PeriodicAndKIndependent) {
  const double period = blowup::cycle_period();
  for (double s : {0.0, 0.9, 2.0}) {
    const Matrix a = jacobian_on_cycle(s, {});
    EXPECT_LE(fixture::max_abs(jacobian_on_cycle(s + period, {}) - a), 1e-8);
    EXPECT_LE(fixture::max_abs(jacobian_on_cycle(s, {2, 3}) - a), 1e-8);
    EXPECT_NEAR(a(0, 0), -1.0, 1e-9);
    EXPECT_LE(a.row(0).tail(8).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(JacobianOnCycle, AgreesWithHandDerivedForm) {
  for (double s : {0.0, 0.7, 1.9}) {
    const Matrix fd = jacobian_on_cycle(s, {});
    const Matrix an = analytic_jacobian_mu0(blowup::cycle_state(s));
    EXPECT_LE(fixture::max_abs(fd - an), 1e-8 * (1 + fixture::max_abs(an)));
  }
}

TEST(Reconstruct, ConstantWithReferenceSpectrumOnTheCylinder) {
  const auto& rep = chain_rule_report();
  EXPECT_LT(rep.constancy_residual, 1e-6);
  EXPECT_EQ(rep.classification, (std::array<int, 3>{1, 1, 7}));
  EXPECT_EQ(rep.samples, 16u);
  EXPECT_LT(rep.cylinder_gap_to_paper, 1e-5);
}

TEST(Reconstruct, TransverseExponentOfChainRuleField) {
  // off the shape manifold the chain-rule rate contracts at 24, not 93
  const auto& rep = chain_rule_report();
  EXPECT_NEAR(rep.transverse_exponent, 24.0, 1e-6);
  EXPECT_NEAR(rep.spectral_gap_to_paper, 69.0, 1e-6);
}

TEST(Reconstruct, AlternateRateExtensionGivesPublishedMatrix) {
  ReconstructOptions o;
  o.convention = RateConvention::UnnormalizedGradient;
  const auto rep = reconstruct_J({}, 16, o);
  EXPECT_LT(rep.constancy_residual, 1e-6);
  const Matrix s = mirror_similarity();
  EXPECT_LE(fixture::max_abs(s * rep.j_reconstructed * s - paper_J()), 1e-8);
  EXPECT_LT(rep.spectral_gap_to_paper, 1e-5);
}

TEST(Reconstruct, MoreSamplesStayConstant) {
  const auto r8 = reconstruct_J({}, 8);
  const auto r64 = reconstruct_J({}, 64);
  EXPECT_LT(r8.constancy_residual, 1e-6);
  EXPECT_LT(r64.constancy_residual, 1e-6);
}

TEST(Reconstruct, ThreadCountDoesNotChangeResult) {
  ReconstructOptions o;
  o.threads = 4;
  const auto rep = reconstruct_J({}, 16, o);
  EXPECT_EQ(fixture::max_abs(rep.j_reconstructed - chain_rule_report().j_reconstructed), 0.0);
}

TEST(Reconstruct, TooFewSamples) { EXPECT_THROW(reconstruct_J({}, 7), DomainError); }

TEST(Reconstruct, ZeroExponentFollowsTheCycle) {
  const auto& rep = chain_rule_report();
  const Vector tangent = transported_tangent().normalized();
  const numkit::EigenPairs pairs = numkit::eig_pairs(rep.j_reconstructed);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < pairs.values.size(); ++i) {
    if (std::abs(pairs.values[i]) < std::abs(pairs.values[idx])) idx = i;
  }
  const Eigen::VectorXcd v = pairs.vectors.col(static_cast<Eigen::Index>(idx));
  const double cosine = std::abs(v.dot(tangent.cast<Complex>())) / v.norm();
  EXPECT_GT(cosine, 1 - 1e-6);
  // and J annihilates the tangent
  EXPECT_LE((rep.j_reconstructed * tangent).norm(), 1e-8);
}

TEST(StableDirection, MuAxis) {
  const Vector e = stable_direction(analyze_matrix(paper_J()));
  EXPECT_NEAR(e[0], 1.0, 1e-14);
  EXPECT_LE(e.tail(8).norm(), 1e-12);
  const Vector r = stable_direction(chain_rule_report());
  EXPECT_GT(std::abs(r[0]), 0.99);
  EXPECT_NEAR(r[0], 1.0, 1e-6);
}

TEST(StableDirection, WellConditioned) {
  auto g = fixture::rng(40);
  const Vector e = stable_direction(analyze_matrix(paper_J()));
  Matrix noisy = paper_J();
  for (Eigen::Index i = 0; i < 81; ++i) noisy.data()[i] += 1e-9 * fixture::uniform(g, -1, 1);
  EXPECT_LE((stable_direction(analyze_matrix(noisy)) - e).norm(), 1e-6);
}

TEST(StableDirection, NeedsExactlyOneNegative) {
  EXPECT_THROW(stable_direction(analyze_matrix(Matrix::Identity(9, 9))), NoStableDirection);
  EXPECT_THROW(analyze_matrix(Matrix::Identity(3, 3)), DomainError);
}

TEST(RateConvention, Names) {
  EXPECT_EQ(to_string(RateConvention::ChainRule), "chain_rule");
  EXPECT_EQ(to_string(RateConvention::UnnormalizedGradient), "unnormalized_gradient");
}
