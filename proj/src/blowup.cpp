#include "spiralctl/blowup.hpp"

#include "spiralctl/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

namespace spiralctl::blowup {

namespace {

const std::array<double, 4>& a_moduli() {
  static const std::array<double, 4> mods = [] {
    const auto a = spiral::a_constants(kSqrt5);
    return std::array<double, 4>{std::abs(a[0]), std::abs(a[1]), std::abs(a[2]),
                                 std::abs(a[3])};
  }();
  return mods;
}

int exponent(std::size_t m) { return 4 - static_cast<int>(m); }  // 5 - m, 1-based

}  // namespace

numkit::Vector BlownState::to_vector() const {
  numkit::Vector v(9);
  v[0] = mu;
  for (std::size_t m = 0; m < 4; ++m) {
    v[1 + 2 * m] = zt[m].real();
    v[2 + 2 * m] = zt[m].imag();
  }
  return v;
}

BlownState BlownState::from_vector(const numkit::Vector& v) {
  if (v.size() < 9) throw DomainError("BlownState: expected at least 9 components");
  BlownState b;
  b.mu = v[0];
  for (std::size_t m = 0; m < 4; ++m) b.zt[m] = {v[1 + 2 * m], v[2 + 2 * m]};
  return b;
}

double pi_function(const std::array<Planar, 4>& z) {
  const auto& mods = a_moduli();
  double acc = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    acc += std::pow(std::abs(z[m]) / mods[m], kWeights[m]);
  }
  return acc / kPiNormalization;
}

double pi_residual(const BlownState& b) { return pi_function(b.zt) - 1.0; }

double homogeneous_scale(const pmp::ZState& z) {
  return std::pow(pi_function(z.z), 1.0 / 24.0);
}

BlownState blow_up(const pmp::ZState& z) {
  const double mu = homogeneous_scale(z);
  if (!(mu > 0.0)) throw OriginBlowUp("blow_up: the origin has no blown-up image");
  if (!std::isfinite(mu)) throw NonFiniteState("blow_up: non-finite scale");
  BlownState b;
  b.mu = mu;
  for (std::size_t m = 0; m < 4; ++m) b.zt[m] = z[m] / std::pow(mu, exponent(m));
  return b;
}

pmp::ZState blow_down(const BlownState& b) {
  if (!(b.mu > 0.0)) throw DegenerateScale("blow_down: mu must be positive");
  pmp::ZState z;
  for (std::size_t m = 0; m < 4; ++m) z[m] = std::pow(b.mu, exponent(m)) * b.zt[m];
  return z;
}

Rate m_rate(const BlownState& b, const KMatrix& k, double threshold) {
  const Planar u = pmp::control_law(b.zt[0], threshold);
  const auto& mods = a_moduli();
  const auto& z = b.zt;
  // chain rule on mu^24 = pi_function(z): each term is
  // w r^{w-2} <z~, f> / |A|^2 with r = |z~| / |A|
  auto term = [&](std::size_t m, Planar f) {
    const double r = std::abs(z[m]) / mods[m];
    return kWeights[m] * std::pow(r, kWeights[m] - 2) * inner(z[m], f) / (mods[m] * mods[m]);
  };
  constexpr double scale = 1.0 / (24.0 * kPiNormalization);
  Rate out;
  out.m0 = scale * (term(0, z[1]) + term(1, z[2]) + term(2, z[3]) + term(3, -u));
  out.m1 = scale * (term(1, k.apply(z[0])) + term(3, k.apply(z[2])));
  out.m = out.m0 + b.mu * b.mu * out.m1;
  return out;
}

BlownState blown_rhs(const KMatrix& k, const BlownState& b, double threshold) {
  const Rate r = m_rate(b, k, threshold);
  const Planar u = pmp::control_law(b.zt[0], threshold);
  const double mu2 = b.mu * b.mu;
  const auto& z = b.zt;
  BlownState d;
  d.mu = b.mu * r.m;
  d.zt[0] = z[1] - 4.0 * r.m * z[0];
  d.zt[1] = z[2] + mu2 * k.apply(z[0]) - 3.0 * r.m * z[1];
  d.zt[2] = z[3] - 2.0 * r.m * z[2];
  d.zt[3] = -u + mu2 * k.apply(z[2]) - r.m * z[3];
  return d;
}

numkit::Field blown_field(const KMatrix& k) {
  return [k](double, const numkit::Vector& v) {
    return blown_rhs(k, BlownState::from_vector(v)).to_vector();
  };
}

numkit::Field blown_field_with_time(const KMatrix& k) {
  return [k](double, const numkit::Vector& v) {
    numkit::Vector d(10);
    d.head(9) = blown_rhs(k, BlownState::from_vector(v)).to_vector();
    d[9] = v[0];
    return d;
  };
}

void retract_to_pi(numkit::Vector& v) {
  BlownState b = BlownState::from_vector(v);
  const double g = pi_function(b.zt);
  if (!(g > 0.0) || !std::isfinite(g)) return;
  const double c = std::pow(g, -1.0 / 24.0);
  for (std::size_t m = 0; m < 4; ++m) {
    const double f = std::pow(c, exponent(m));
    v[1 + 2 * m] *= f;
    v[2 + 2 * m] *= f;
  }
  v[0] /= c;
}

BlownState cycle_state(double s, double alpha) {
  const auto a = spiral::a_constants(alpha);
  const Planar phase = std::polar(1.0, -alpha * s);
  BlownState b;
  b.mu = 0.0;
  for (std::size_t m = 0; m < 4; ++m) b.zt[m] = -a[m] * phase;
  return b;
}

BlownState spiral_blown_state(double s, double t_star, double alpha) {
  if (!(t_star > 0.0)) throw DomainError("spiral_blown_state: T* must be positive");
  // e^{i alpha log(T* e^{-s})} carries the extra constant phase alpha log T*
  BlownState b = cycle_state(s - std::log(t_star), alpha);
  b.mu = t_star * std::exp(-s);
  return b;
}

BlownState cycle_tangent(double s, double alpha) {
  BlownState b = cycle_state(s, alpha);
  for (auto& w : b.zt) w *= Planar(0.0, -alpha);
  return b;
}

numkit::Trajectory reparam_t_of_s(const numkit::Trajectory& blown, double t0) {
  if (blown.empty()) throw DomainError("reparam_t_of_s: empty trajectory");
  const auto& ss = blown.times();
  std::vector<double> times(ss.begin(), ss.end());
  std::vector<numkit::Vector> values;
  std::vector<numkit::Vector> rates;
  values.reserve(ss.size());
  rates.reserve(ss.size());
  double t = t0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (i > 0) {
      auto mu = [&](double s) { return blown.at(s)[0]; };
      t += boost::math::quadrature::gauss<double, 7>::integrate(mu, ss[i - 1], ss[i]);
    }
    values.push_back(numkit::Vector::Constant(1, t));
    rates.push_back(numkit::Vector::Constant(1, blown.states()[i][0]));
  }
  return numkit::Trajectory::from_samples(std::move(times), std::move(values), rates);
}

double SeededBranch::time_at(double s) const { return blown.at(s)[9]; }

BlownState SeededBranch::blown_at(double s) const {
  return BlownState::from_vector(blown.at(s));
}

double SeededBranch::s_at_time(double t) const {
  const double a = blown.front_time();
  const double b = blown.back_time();
  const double ta = time_at(a);
  const double tb = time_at(b);
  // endpoints come from event location, so allow a hair of slack there
  const double slack = 1e-9 * (1.0 + std::abs(tb - ta));
  if (t < ta - slack || t > tb + slack) {
    throw DomainError("SeededBranch: time outside the traced branch");
  }
  if (t <= ta) return a;
  if (t >= tb) return b;
  return numkit::locate_root(
      blown, [t](double, const numkit::Vector& v) { return v[9] - t; }, a, b);
}

pmp::ZState SeededBranch::state_at_time(double t) const {
  return blow_down(blown_at(s_at_time(t)));
}

SeededBranch trace_seeded_branch(const KMatrix& k, const spiral::SpiralFamily& fam, double eps,
                                 const BranchOptions& options) {
  const double t_hit = fam.t_star;
  if (!(options.t_start < t_hit - eps)) {
    throw DomainError("trace_seeded_branch: start time must precede the seed");
  }
  const pmp::ZState seed = spiral::seed_near_origin(t_hit, eps, fam, k);
  numkit::Vector y0(10);
  y0.head(9) = blow_up(seed).to_vector();
  y0[9] = t_hit - eps;

  numkit::IntegrateOptions io;
  io.rtol = options.rtol;
  io.atol = options.atol;
  io.project = retract_to_pi;
  const double t_start = options.t_start;
  io.stops.push_back({[t_start](double, const numkit::Vector& v) { return v[9] - t_start; }, -1});
  // mu grows like e^{-s} backward; the span only bounds the search
  const double s_span = 2.0 * std::log(t_hit / eps) + 50.0;
  const numkit::IntegrationResult res =
      numkit::integrate(blown_field_with_time(k), y0, 0.0, -s_span, io);
  if (res.reason != numkit::StopReason::Event) {
    throw NoConvergence("trace_seeded_branch: backward flow did not reach the start time");
  }
  SeededBranch out;
  out.blown = res.trajectory.shifted(-res.trajectory.front_time());
  out.t_hit = t_hit;
  out.eps = eps;
  out.alpha = fam.alpha;
  return out;
}

Planar normalized_ratio(const SeededBranch& branch, int m, double tau) {
  if (m < 1 || m > 4) throw DomainError("normalized_ratio: block index must be 1..4");
  const double s = branch.s_at_time(branch.t_hit - tau);
  const BlownState b = branch.blown_at(s);
  const double p = 5 - m;
  return std::pow(b.mu / tau, p) * b.zt[static_cast<std::size_t>(m - 1)] *
         std::polar(1.0, -branch.alpha * std::log(tau));
}

ScaleFit fit_scale_decay(const numkit::Trajectory& blown, double s0, double s1,
                         std::size_t samples) {
  if (samples < 2 || !(s1 > s0)) throw DomainError("fit_scale_decay: bad sampling");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = s0 + (s1 - s0) * static_cast<double>(i) / (n - 1.0);
    const double mu = blown.at(s)[0];
    if (!(mu > 0.0)) throw DomainError("fit_scale_decay: mu must be positive");
    const double y = std::log(mu);
    sx += s;
    sy += y;
    sxx += s * s;
    sxy += s * y;
  }
  ScaleFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.kappa = std::exp((sy - fit.slope * sx) / n);
  return fit;
}

}  // namespace spiralctl::blowup
