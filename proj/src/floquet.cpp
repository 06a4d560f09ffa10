#include "spiralctl/floquet.hpp"

#include "spiralctl/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <thread>

namespace spiralctl::floquet {

namespace {

constexpr double kNotConstant = 1e-3;

using Block = Eigen::Matrix2d;

Eigen::Vector2d vec(Planar p) { return {p.real(), p.imag()}; }

const std::array<double, 4>& a_moduli() {
  static const std::array<double, 4> mods = [] {
    const auto a = spiral::a_constants(kSqrt5);
    return std::array<double, 4>{std::abs(a[0]), std::abs(a[1]), std::abs(a[2]),
                                 std::abs(a[3])};
  }();
  return mods;
}

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  }
  return r;
}

// Gradient of pi_function in the packed coordinates (mu component 0).
Vector pi_gradient(const blowup::BlownState& b) {
  const auto& mods = a_moduli();
  Vector g = Vector::Zero(9);
  for (std::size_t m = 0; m < 4; ++m) {
    const double w = blowup::kWeights[m];
    const double r = std::abs(b.zt[m]);
    const double c = w * std::pow(r, w - 2.0) / std::pow(mods[m], w) / blowup::kPiNormalization;
    g.segment<2>(static_cast<Eigen::Index>(1 + 2 * m)) = c * vec(b.zt[m]);
  }
  return g;
}

Matrix sample_J(double s, const KMatrix& k, double rate, const ReconstructOptions& o) {
  const Matrix f = jacobian_on_cycle(s, k, o.alpha, o.h, o.convention);
  const Matrix p = lyapunov_transform(s, rate);
  return lyapunov_transform_derivative(s, rate) * p.transpose() + p * f * p.transpose();
}

FloquetReport reconstruct_with_rate(const KMatrix& k, std::size_t samples, double rate,
                                    const ReconstructOptions& o) {
  const double period = blowup::cycle_period(o.alpha);
  std::vector<Matrix> js(samples);
  const unsigned threads = std::max(1u, std::min<unsigned>(o.threads, samples));
  if (threads == 1) {
    for (std::size_t i = 0; i < samples; ++i) {
      js[i] = sample_J(period * static_cast<double>(i) / static_cast<double>(samples), k, rate, o);
    }
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < samples; i += threads) {
          js[i] = sample_J(period * static_cast<double>(i) / static_cast<double>(samples), k,
                           rate, o);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  Matrix mean = Matrix::Zero(9, 9);
  double resid = 0.0;
  for (const Matrix& j : js) {
    mean += j;
    resid = std::max(resid, (j - js.front()).cwiseAbs().maxCoeff());
  }
  mean /= static_cast<double>(samples);

  FloquetReport rep = analyze_matrix(mean);
  rep.constancy_residual = resid;
  rep.frame_rate = rate;
  rep.samples = samples;
  rep.convention = o.convention;
  return rep;
}

}  // namespace

Matrix paper_J() {
  const double r5 = kSqrt5;
  Matrix j(9, 9);
  j << -1, 0, 0, 0, 0, 0, 0, 0, 0,
      0, 24, -4 * r5, 316. / 63, 100 * r5 / 63, -67. / 63, -73 * r5 / 63, -53. / 63, 47 * r5 / 63,
      0, r5, 4, 0, -1, 0, 0, 0, 0,
      0, 60, -9 * r5, 442. / 21, 79 * r5 / 21, -46. / 21, -73 * r5 / 21, -53. / 21, 47 * r5 / 21,
      0, 15 * r5, -45. / 4, 463 * r5 / 84, 188. / 21, -67 * r5 / 84, -281. / 84, -53 * r5 / 84,
      235. / 84,
      0, -70, 21 * r5 / 2, -379. / 18, -50 * r5 / 9, 103. / 18, 55 * r5 / 18, 71. / 18,
      -47 * r5 / 18,
      0, -70 * r5, 105. / 2, -379 * r5 / 18, -250. / 9, 85 * r5 / 18, 401. / 18, 53 * r5 / 18,
      -217. / 18,
      0, -105, 63 * r5 / 4, -379. / 12, -25 * r5 / 3, 67. / 12, 73 * r5 / 12, 65. / 12,
      -59 * r5 / 12,
      0, 105 * r5, 189. / 4, 379 * r5 / 12, 125. / 3, -67 * r5 / 12, -365. / 12, -41 * r5 / 12,
      247. / 12;
  return j;
}

std::vector<Complex> paper_eigenvalues() {
  std::vector<Complex> ev{-1.0, 0.0, 4.0, 5.0, 93.0};
  // q = (l - 5) l solves q^2 + 36 q + 630 = 0, then l^2 - 5 l - q = 0
  for (double sq : {1.0, -1.0}) {
    const Complex q(-18.0, sq * std::sqrt(306.0));
    const Complex disc = std::sqrt(Complex(25.0) + 4.0 * q);
    ev.push_back((5.0 + disc) / 2.0);
    ev.push_back((5.0 - disc) / 2.0);
  }
  return ev;
}

std::vector<Complex> paper_eigenvalues_rounded() {
  return {-1.0,
          0.0,
          4.0,
          5.0,
          93.0,
          {4.65903, 4.0511},
          {4.65903, -4.0511},
          {0.340974, 4.0511},
          {0.340974, -4.0511}};
}

std::vector<double> paper_char_poly() {
  std::vector<double> p{1.0};
  for (double root : {-1.0, 0.0, 4.0, 5.0, 93.0}) p = poly_mul(p, {1.0, -root});
  // (l - 5)^2 l^2 + 36 (l - 5) l + 630 = l^4 - 10 l^3 + 61 l^2 - 180 l + 630
  return poly_mul(p, {1.0, -10.0, 61.0, -180.0, 630.0});
}

std::string to_string(RateConvention c) {
  return c == RateConvention::ChainRule ? "chain_rule" : "unnormalized_gradient";
}

Vector extended_rhs(const KMatrix& k, const Vector& v, RateConvention c) {
  if (c == RateConvention::ChainRule) {
    return blowup::blown_rhs(k, blowup::BlownState::from_vector(v)).to_vector();
  }
  const blowup::BlownState b = blowup::BlownState::from_vector(v);
  const blowup::Rate r = blowup::m_rate(b, k);
  const double m = 4.0 * r.m + 3.0;
  const Planar u = pmp::control_law(b.zt[0]);
  const double mu2 = b.mu * b.mu;
  blowup::BlownState d;
  d.mu = b.mu * m;
  d.zt[0] = b.zt[1] - 4.0 * m * b.zt[0];
  d.zt[1] = b.zt[2] + mu2 * k.apply(b.zt[0]) - 3.0 * m * b.zt[1];
  d.zt[2] = b.zt[3] - 2.0 * m * b.zt[2];
  d.zt[3] = -u + mu2 * k.apply(b.zt[2]) - m * b.zt[3];
  return d.to_vector();
}

Matrix jacobian_on_cycle(double s, const KMatrix& k, double alpha, double h, RateConvention c) {
  const Vector x = blowup::cycle_state(s, alpha).to_vector();
  return numkit::jacobian_fd_richardson([&](const Vector& y) { return extended_rhs(k, y, c); },
                                        x, h);
}

Matrix analytic_jacobian_mu0(const blowup::BlownState& b) {
  const auto& mods = a_moduli();
  const auto& z = b.zt;
  const double r0 = std::abs(z[0]);
  if (!(r0 > 0.0)) throw SingularControl("analytic_jacobian_mu0: z~1 vanishes");
  const Planar u = z[0] / r0;
  const Block du = (Block::Identity() - vec(u) * vec(u).transpose()) / r0;  // d u / d z~1
  const std::array<Planar, 4> f{z[1], z[2], z[3], -u};
  const std::array<double, 4> e{4.0, 3.0, 2.0, 1.0};

  std::array<double, 4> c{}, p{}, rp{};
  double m0 = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    const double w = blowup::kWeights[m];
    c[m] = w / (24.0 * blowup::kPiNormalization * std::pow(mods[m], w));
    p[m] = w - 2.0;
    rp[m] = std::pow(std::abs(z[m]), p[m]);
    m0 += c[m] * rp[m] * inner(z[m], f[m]);
  }
  // gradient of M0 by block
  std::array<Eigen::Vector2d, 4> grad;
  for (std::size_t n = 0; n < 4; ++n) {
    const double rn = std::abs(z[n]);
    grad[n] = c[n] * (p[n] * std::pow(rn, p[n] - 2.0) * inner(z[n], f[n]) * vec(z[n]) +
                      rp[n] * vec(f[n]));
    if (n >= 1) grad[n] += c[n - 1] * rp[n - 1] * vec(z[n - 1]);
  }
  grad[0] += -c[3] * rp[3] * (du.transpose() * vec(z[3]));

  Matrix j = Matrix::Zero(9, 9);
  j(0, 0) = m0;
  for (std::size_t m = 0; m < 4; ++m) {
    const Eigen::Index row = static_cast<Eigen::Index>(1 + 2 * m);
    for (std::size_t n = 0; n < 4; ++n) {
      const Eigen::Index col = static_cast<Eigen::Index>(1 + 2 * n);
      Block blk = -e[m] * vec(z[m]) * grad[n].transpose();
      if (n == m) blk -= e[m] * m0 * Block::Identity();
      if (m < 3 && n == m + 1) blk += Block::Identity();
      if (m == 3 && n == 0) blk -= du;
      j.block<2, 2>(row, col) = blk;
    }
  }
  return j;
}

Matrix lyapunov_transform(double s, double rate) {
  Matrix p = Matrix::Identity(9, 9);
  const double c = std::cos(rate * s);
  const double sn = std::sin(rate * s);
  for (Eigen::Index m = 0; m < 4; ++m) {
    p.block<2, 2>(1 + 2 * m, 1 + 2 * m) << c, -sn, sn, c;
  }
  return p;
}

Matrix lyapunov_transform_derivative(double s, double rate) {
  Matrix d = Matrix::Zero(9, 9);
  const double c = std::cos(rate * s);
  const double sn = std::sin(rate * s);
  for (Eigen::Index m = 0; m < 4; ++m) {
    d.block<2, 2>(1 + 2 * m, 1 + 2 * m) << -rate * sn, -rate * c, rate * c, -rate * sn;
  }
  return d;
}

Matrix mirror_similarity() {
  Matrix s = Matrix::Identity(9, 9);
  s(1, 1) = -1.0;
  s(2, 2) = -1.0;
  return s;
}

FloquetReport analyze_matrix(const Matrix& j) {
  if (j.rows() != 9 || j.cols() != 9) throw DomainError("analyze_matrix: expected 9x9");
  FloquetReport rep;
  rep.j_reconstructed = j;
  rep.spectrum = numkit::eig_dense(j);
  rep.classification = {rep.spectrum.n_neg, rep.spectrum.n_zero, rep.spectrum.n_pos};
  rep.spectral_gap_to_paper = numkit::pairing_distance(rep.spectrum.eigenvalues,
                                                       paper_eigenvalues());

  // restriction to R x T(Pi) at s = 0, where P = I
  const Vector nu = pi_gradient(blowup::cycle_state(0.0)).normalized();
  const Eigen::HouseholderQR<Matrix> qr(nu);
  const Matrix q_full = qr.householderQ() * Matrix::Identity(9, 9);
  const Matrix q = q_full.rightCols(8);
  const Matrix jc = q.transpose() * j * q;
  const numkit::Spectrum cyl = numkit::eig_dense(jc);
  rep.cylinder_spectrum = cyl.eigenvalues;
  rep.transverse_exponent = j.trace() - jc.trace();

  std::vector<Complex> paper_cyl = paper_eigenvalues();
  paper_cyl.erase(std::find(paper_cyl.begin(), paper_cyl.end(), Complex(93.0)));
  rep.cylinder_gap_to_paper = numkit::pairing_distance(rep.cylinder_spectrum, paper_cyl);
  return rep;
}

FloquetReport reconstruct_J(const KMatrix& k, std::size_t samples,
                            const ReconstructOptions& options) {
  if (samples < 8) throw DomainError("reconstruct_J: need at least 8 samples");
  FloquetReport rep = reconstruct_with_rate(k, samples, options.alpha, options);
  if (rep.constancy_residual <= kNotConstant) return rep;
  FloquetReport mirrored = reconstruct_with_rate(k, samples, -options.alpha, options);
  if (mirrored.constancy_residual <= kNotConstant) return mirrored;
  throw TransformNotConstant("reconstruct_J: J(s) is not constant in either rotating frame");
}

Vector stable_direction(const FloquetReport& report) {
  if (report.spectrum.n_neg != 1) {
    throw NoStableDirection("stable_direction: need exactly one negative exponent");
  }
  const numkit::EigenPairs pairs = numkit::eig_pairs(report.j_reconstructed);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < pairs.values.size(); ++i) {
    if (pairs.values[i].real() < pairs.values[idx].real()) idx = i;
  }
  const Eigen::VectorXcd vc = pairs.vectors.col(static_cast<Eigen::Index>(idx));
  // real eigenvalue: rotate the phase away
  Eigen::Index big = 0;
  vc.cwiseAbs().maxCoeff(&big);
  const Complex ph = std::abs(vc[big]) > 0 ? vc[big] / std::abs(vc[big]) : Complex(1.0);
  Vector v = (vc / ph).real();
  v.normalize();
  if (v[0] < 0.0) v = -v;
  return v;
}

Vector transported_tangent(double alpha) {
  // P(0) = I
  return blowup::cycle_tangent(0.0, alpha).to_vector();
}

}  // namespace spiralctl::floquet
