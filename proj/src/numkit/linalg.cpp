#include "spiralctl/numkit/linalg.hpp"

#include "spiralctl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace spiralctl::numkit {

namespace {

void check_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) throw DomainError(std::string(who) + ": matrix must be square");
  if (a.rows() == 0 || a.rows() > 16) {
    throw DomainError(std::string(who) + ": dimension must be in [1, 16]");
  }
  if (!a.allFinite()) throw NonFiniteState(std::string(who) + ": non-finite entries");
}

// Kuhn augmenting path on the bipartite graph {i -> j : dist(i,j) <= thr}.
bool augment(std::size_t i, const std::vector<std::vector<double>>& dist, double thr,
             std::vector<int>& match_b, std::vector<char>& seen) {
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (dist[i][j] > thr || seen[j]) continue;
    seen[j] = 1;
    if (match_b[j] < 0 ||
        augment(static_cast<std::size_t>(match_b[j]), dist, thr, match_b, seen)) {
      match_b[j] = static_cast<int>(i);
      return true;
    }
  }
  return false;
}

std::optional<std::vector<int>> perfect_matching(const std::vector<std::vector<double>>& dist,
                                                 double thr) {
  const std::size_t n = dist.size();
  std::vector<int> match_b(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<char> seen(n, 0);
    if (!augment(i, dist, thr, match_b, seen)) return std::nullopt;
  }
  return match_b;
}

}  // namespace

Matrix jacobian_fd(const VectorField& field, const Vector& y, double h) {
  if (h <= 0.0) h = 1e-6 * (1.0 + y.norm());
  const Vector f0 = field(y);
  if (!f0.allFinite()) throw NonFiniteState("jacobian_fd: non-finite field value");
  Matrix jac(f0.size(), y.size());
  Vector probe = y;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    probe[j] = y[j] + h;
    const Vector fp = field(probe);
    probe[j] = y[j] - h;
    const Vector fm = field(probe);
    probe[j] = y[j];
    if (!fp.allFinite() || !fm.allFinite()) {
      throw NonFiniteState("jacobian_fd: non-finite probe evaluation");
    }
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

Matrix jacobian_fd_richardson(const VectorField& field, const Vector& y, double h) {
  if (h <= 0.0) h = 1e-5 * (1.0 + y.norm());
  return (4.0 * jacobian_fd(field, y, 0.5 * h) - jacobian_fd(field, y, h)) / 3.0;
}

EigenPairs eig_pairs(const Matrix& a) {
  check_square(a, "eig_pairs");
  Eigen::EigenSolver<Matrix> solver(a, true);
  if (solver.info() != Eigen::Success) throw NoConvergence("eig_pairs: QR iteration failed");
  EigenPairs out;
  out.values.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
  out.vectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) out.vectors.col(j).normalize();
  return out;
}

Spectrum eig_dense(const Matrix& a, double zero_tol) {
  check_square(a, "eig_dense");
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw NoConvergence("eig_dense: QR iteration failed");
  Spectrum s;
  s.eigenvalues.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
  for (const Complex& l : s.eigenvalues) {
    if (l.real() < -zero_tol) {
      ++s.n_neg;
    } else if (l.real() > zero_tol) {
      ++s.n_pos;
    } else {
      ++s.n_zero;
    }
  }
  return s;
}

std::vector<double> char_poly(const Matrix& a) {
  check_square(a, "char_poly");
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  const LMatrix al = a.cast<long double>();
  std::vector<long double> c(static_cast<std::size_t>(n) + 1, 0.0L);
  c[0] = 1.0L;
  LMatrix mk = LMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = al * mk;
    mk.diagonal().array() += c[static_cast<std::size_t>(k - 1)];
    // compensated tr(A M_k)
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const long double term = al(i, j) * mk(j, i) - comp;
        const long double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
      }
    }
    c[static_cast<std::size_t>(k)] = -sum / static_cast<long double>(k);
  }
  return {c.begin(), c.end()};
}

Matrix poly_of_matrix(const std::vector<double>& coeffs, const Matrix& a) {
  Matrix acc = Matrix::Zero(a.rows(), a.cols());
  for (double c : coeffs) {
    acc = acc * a;
    acc.diagonal().array() += c;
  }
  return acc;
}

std::vector<Complex> poly_roots(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2 || coeffs.front() == 0.0) {
    throw DomainError("poly_roots: need a polynomial of degree >= 1 with nonzero leading term");
  }
  const auto n = static_cast<Eigen::Index>(coeffs.size() - 1);
  Matrix comp = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    comp(0, j) = -coeffs[static_cast<std::size_t>(j + 1)] / coeffs.front();
  }
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  return eig_dense(comp).eigenvalues;
}

std::vector<std::size_t> optimal_pairing(const std::vector<Complex>& a,
                                         const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw DomainError("optimal_pairing: sizes differ");
  const std::size_t n = a.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  std::vector<double> candidates;
  candidates.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dist[i][j] = std::abs(a[i] - b[j]);
      candidates.push_back(dist[i][j]);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::size_t lo = 0;
  std::size_t hi = candidates.empty() ? 0 : candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (perfect_matching(dist, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::vector<std::size_t> pairing(n);
  if (n == 0) return pairing;
  const auto match_b = perfect_matching(dist, candidates[lo]);
  for (std::size_t j = 0; j < n; ++j) {
    pairing[static_cast<std::size_t>((*match_b)[j])] = j;
  }
  return pairing;
}

double pairing_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const auto pairing = optimal_pairing(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[pairing[i]]));
  }
  return worst;
}

}  // namespace spiralctl::numkit
