#pragma once

#include "spiralctl/numkit/ode.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace spiralctl::numkit {

using Complex = std::complex<double>;
using VectorField = std::function<Vector(const Vector&)>;

/// Default real-part tolerance for classifying an eigenvalue as zero.
inline constexpr double kZeroRealPartTol = 1e-7;

struct Spectrum {
  std::vector<Complex> eigenvalues;
  int n_neg = 0;
  int n_zero = 0;
  int n_pos = 0;
};

struct EigenPairs {
  std::vector<Complex> values;
  Eigen::MatrixXcd vectors;  // columns, unit 2-norm
};

/// Central-difference Jacobian. h <= 0 selects 1e-6 (1 + |y|).
Matrix jacobian_fd(const VectorField& field, const Vector& y, double h = 0.0);

/// Richardson combination of central differences at h and h/2 (fourth
/// order). h <= 0 selects 1e-5 (1 + |y|).
Matrix jacobian_fd_richardson(const VectorField& field, const Vector& y, double h = 0.0);

/// Eigenvalues of a small dense real matrix, classified by sign of the real
/// part against `zero_tol`.
Spectrum eig_dense(const Matrix& a, double zero_tol = kZeroRealPartTol);

EigenPairs eig_pairs(const Matrix& a);

/// Monic characteristic polynomial, highest degree first:
/// {1, c_{n-1}, ..., c_0} for lambda^n + c_{n-1} lambda^{n-1} + ... + c_0.
/// Faddeev-LeVerrier in extended precision with compensated traces.
std::vector<double> char_poly(const Matrix& a);

/// Evaluates p(A) for coefficients in char_poly order.
Matrix poly_of_matrix(const std::vector<double>& coeffs, const Matrix& a);

/// Roots of a polynomial (highest degree first) via its companion matrix.
std::vector<Complex> poly_roots(const std::vector<double>& coeffs);

/// Smallest achievable maximum distance over one-to-one pairings of two
/// equally sized eigenvalue multisets.
double pairing_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// Pairing that realizes pairing_distance: result[i] is the index in b
/// matched to a[i].
std::vector<std::size_t> optimal_pairing(const std::vector<Complex>& a,
                                         const std::vector<Complex>& b);

}  // namespace spiralctl::numkit
