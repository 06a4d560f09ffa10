#include "spiralctl/spiral.hpp"

#include "spiralctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spiralctl::spiral {

namespace {

void check_alpha(double alpha) {
  if (!(std::abs(std::abs(alpha) - kSqrt5) < 1e-12)) {
    throw DomainError("spiral: alpha must be +sqrt5 or -sqrt5");
  }
}

double tau_of(double t, const SpiralFamily& fam) {
  const double tau = fam.t_star - t;
  if (!(tau > 0.0)) throw DomainError("spiral: t must be below the hitting time");
  return tau;
}

}  // namespace

std::array<Complex, 4> a_constants(double alpha, double a0) {
  check_alpha(alpha);
  std::array<Complex, 4> a{};
  a[0] = a0;
  for (int m = 0; m < 3; ++m) {
    a[m + 1] = -a[m] * Complex(4.0 - m, alpha);
  }
  return a;
}

SpiralFamily SpiralFamily::make(double t_star, double alpha, Isometry zeta) {
  if (!(t_star > 0.0) || !std::isfinite(t_star)) {
    throw DomainError("spiral: T* must be positive");
  }
  check_alpha(alpha);
  SpiralFamily fam;
  fam.t_star = t_star;
  fam.alpha = alpha;
  fam.zeta = zeta;
  fam.a = a_constants(alpha);
  return fam;
}

pmp::ZState spiral_state(double t, const SpiralFamily& fam) {
  const double tau = tau_of(t, fam);
  const Complex phase = std::polar(1.0, fam.alpha * std::log(tau));
  pmp::ZState z;
  for (int m = 0; m < 4; ++m) {
    z[m] = fam.zeta.apply(-fam.a[m] * std::pow(tau, 4 - m) * phase);
  }
  return z;
}

pmp::ZState spiral_derivative(double t, const SpiralFamily& fam) {
  const double tau = tau_of(t, fam);
  const Complex phase = std::polar(1.0, fam.alpha * std::log(tau));
  // d/dt [tau^p e^{i alpha log tau}] = -(p + i alpha) tau^{p-1} e^{i alpha log tau}
  pmp::ZState d;
  for (int m = 0; m < 4; ++m) {
    const double p = 4 - m;
    d[m] = fam.zeta.apply(fam.a[m] * Complex(p, fam.alpha) * std::pow(tau, p - 1.0) * phase);
  }
  return d;
}

Planar spiral_control(double t, const SpiralFamily& fam) {
  const double tau = tau_of(t, fam);
  return fam.zeta.apply(std::polar(1.0, fam.alpha * std::log(tau)));
}

pmp::ZState seed_near_origin(double t_hit, double eps, const SpiralFamily& fam,
                             const KMatrix&) {
  if (!(eps > 0.0) || !(eps < t_hit)) {
    throw DomainError("seed_near_origin: need 0 < eps < T");
  }
  SpiralFamily shifted = fam;
  shifted.t_star = t_hit;
  return spiral_state(t_hit - eps, shifted);
}

double winding_number(const numkit::Trajectory& traj, std::size_t re_index, double t0,
                      double t1) {
  if (traj.empty() || static_cast<Eigen::Index>(re_index + 1) >= traj.dimension()) {
    throw DomainError("winding_number: component out of range");
  }
  const double sign = t1 >= t0 ? 1.0 : -1.0;
  if (t0 > t1) std::swap(t0, t1);
  if (!traj.contains(t0) || !traj.contains(t1)) {
    throw DomainError("winding_number: interval outside the trajectory");
  }
  auto value = [&](double t) {
    const numkit::Vector v = traj.at(t);
    const Planar w{v[static_cast<Eigen::Index>(re_index)],
                   v[static_cast<Eigen::Index>(re_index) + 1]};
    if (w == Planar{}) throw DomainError("winding_number: component vanishes");
    return w;
  };

  std::vector<double> grid{t0};
  constexpr int kSub = 4;
  const auto& ts = traj.times();
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = std::max(ts[i], t0);
    const double b = std::min(ts[i + 1], t1);
    if (!(b > a)) continue;
    for (int j = 1; j <= kSub; ++j) grid.push_back(a + (b - a) * j / kSub);
  }
  if (grid.back() != t1) grid.push_back(t1);

  double total = 0.0;
  Planar prev = value(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Planar cur = value(grid[i]);
    const double d = std::arg(cur / prev);
    if (std::abs(d) >= std::numbers::pi / 2.0) {
      throw PhaseJump("winding_number: samples rotate by pi/2 or more");
    }
    total += d;
    prev = cur;
  }
  return sign * total / (2.0 * std::numbers::pi);
}

double hitting_ratio(Planar x0, Planar y0, double t_hit) {
  const double scale = std::max(std::sqrt(std::abs(x0)), std::abs(y0));
  if (!(scale > 0.0)) throw DomainError("hitting_ratio: initial state is the origin");
  return t_hit / scale;
}

double spiral_cost(const SpiralFamily& fam) {
  return std::norm(fam.a[2]) * std::pow(fam.t_star, 5) / 5.0;
}

}  // namespace spiralctl::spiral
