#pragma once

#include "spiralctl/blowup.hpp"
#include "spiralctl/numkit/linalg.hpp"
#include "spiralctl/planar.hpp"

#include <array>
#include <string>
#include <vector>

namespace spiralctl::floquet {

using numkit::Complex;
using numkit::Matrix;
using numkit::Vector;

/// Published constant matrix of the variational system around the cycle,
/// coordinates (mu, z~1, z~2, z~3, z~4) with planar blocks as (re, im).
Matrix paper_J();

/// Its eigenvalues in closed form: -1, 0, 4, 5, 93 and the roots of
/// (l - 5)^2 l^2 + 36 (l - 5) l + 630.
std::vector<Complex> paper_eigenvalues();

/// The decimals as published (the quartic pair rounded).
std::vector<Complex> paper_eigenvalues_rounded();

/// Expanded (l + 1) l (l - 4)(l - 5)(l - 93)((l - 5)^2 l^2 + 36 (l - 5) l + 630),
/// highest degree first, integer coefficients.
std::vector<double> paper_char_poly();

/// How the rate M is extended off the shape manifold. The cycle and the
/// eight exponents along the cylinder do not depend on it; the exponent
/// transverse to Pi does.
enum class RateConvention {
  /// M from the chain rule on the scale function (Pi invariant, transverse
  /// exponent 24). This is the field integrated everywhere else.
  ChainRule,
  /// 4 M + 3: the gradient of the unnormalized sum, shifted to equal -1 on
  /// the cycle. Reproduces the published matrix up to the sign flip of the
  /// z~1 block (see mirror_similarity).
  UnnormalizedGradient,
};

std::string to_string(RateConvention c);

/// Blown-up field with the chosen extension of M.
Vector extended_rhs(const KMatrix& k, const Vector& v, RateConvention c);

/// Jacobian of the blown-up field at xi0(s) by fourth-order central
/// differences with base step h.
Matrix jacobian_on_cycle(double s, const KMatrix& k, double alpha = kSqrt5, double h = 1e-5,
                         RateConvention c = RateConvention::ChainRule);

/// Hand-derived Jacobian of the chain-rule field at a mu = 0 point.
Matrix analytic_jacobian_mu0(const blowup::BlownState& b);

/// Block-diagonal P(s): 1 on mu, rotation by `rate * s` on each planar
/// block.
Matrix lyapunov_transform(double s, double rate = kSqrt5);
Matrix lyapunov_transform_derivative(double s, double rate = kSqrt5);

/// diag(1, -1, -1, 1, ..., 1).
Matrix mirror_similarity();

struct FloquetReport {
  Matrix j_reconstructed;
  double constancy_residual = 0.0;
  numkit::Spectrum spectrum;
  std::array<int, 3> classification{};  // (n_neg, n_zero, n_pos)
  double spectral_gap_to_paper = 0.0;
  /// Exponents of J restricted to R x T(Pi) and the remaining one.
  std::vector<Complex> cylinder_spectrum;
  double transverse_exponent = 0.0;
  double cylinder_gap_to_paper = 0.0;  // against the published set minus 93
  double frame_rate = kSqrt5;          // rotation rate of P that was used
  std::size_t samples = 0;
  RateConvention convention = RateConvention::ChainRule;
};

struct ReconstructOptions {
  double alpha = kSqrt5;
  double h = 1e-5;
  RateConvention convention = RateConvention::ChainRule;
  /// Evaluate samples concurrently.
  unsigned threads = 1;
};

/// J(s) = P'(s) P(s)^{-1} + P(s) F(xi0(s)) P(s)^{-1} over `samples` equally
/// spaced points of one period; J is the mean, the residual the largest
/// entrywise deviation from J(0). Retries the mirrored rate -alpha and
/// throws TransformNotConstant if neither frame gives a residual below 1e-3.
FloquetReport reconstruct_J(const KMatrix& k, std::size_t samples,
                            const ReconstructOptions& options = {});

/// Spectral summary of a given constant matrix (no reconstruction).
FloquetReport analyze_matrix(const Matrix& j);

/// Unit eigenvector of the single negative exponent, oriented with a
/// non-negative mu component. Throws NoStableDirection unless n_neg == 1.
Vector stable_direction(const FloquetReport& report);

/// P(s) d xi0/ds, constant along the cycle.
Vector transported_tangent(double alpha = kSqrt5);

}  // namespace spiralctl::floquet
