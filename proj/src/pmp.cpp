#include "spiralctl/pmp.hpp"

#include "spiralctl/blowup.hpp"
#include "spiralctl/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace spiralctl::pmp {

numkit::Vector ZState::to_vector() const {
  numkit::Vector v(8);
  for (std::size_t m = 0; m < 4; ++m) {
    v[2 * m] = z[m].real();
    v[2 * m + 1] = z[m].imag();
  }
  return v;
}

ZState ZState::from_vector(const numkit::Vector& v) {
  if (v.size() < 8) throw DomainError("ZState: expected 8 components");
  ZState s;
  for (std::size_t m = 0; m < 4; ++m) s.z[m] = {v[2 * m], v[2 * m + 1]};
  return s;
}

double ZState::norm() const {
  double acc = 0.0;
  for (const auto& w : z) acc += std::norm(w);
  return std::sqrt(acc);
}

ZState ZState::transformed(const Isometry& iso) const {
  ZState out;
  for (std::size_t m = 0; m < 4; ++m) out.z[m] = iso.apply(z[m]);
  return out;
}

ZState ZState::dilated(double lambda) const {
  ZState out;
  double w = lambda;
  for (std::size_t m = 4; m-- > 0;) {
    out.z[m] = w * z[m];
    w *= lambda;
  }
  return out;
}

ZState operator-(const ZState& a, const ZState& b) {
  ZState out;
  for (std::size_t m = 0; m < 4; ++m) out.z[m] = a.z[m] - b.z[m];
  return out;
}

Planar control_law(Planar z1, double threshold) {
  const double r = std::abs(z1);
  if (!(r > threshold) || r == 0.0) {
    throw SingularControl("control undefined: |z1| at or below the singular threshold");
  }
  return z1 / r;
}

double hamiltonian(Planar x, Planar y, Planar phi, Planar psi, Planar u, const KMatrix& k) {
  return -0.5 * inner(x, x) + inner(y, phi) + inner(k.apply(x), psi) + inner(u, psi);
}

double hamiltonian(const ZState& z, const KMatrix& k) {
  const Canonical c = Canonical::from_z(z);
  // <u, psi> = |psi| for the maximizing control, also at psi = 0
  return -0.5 * inner(c.x, c.x) + inner(c.y, c.phi) + inner(k.apply(c.x), c.psi) +
         std::abs(c.psi);
}

ZState ham_rhs_p1(const KMatrix& k, const ZState& z, double threshold) {
  const Planar u = control_law(z[0], threshold);
  return {{z[1], z[2] + k.apply(z[0]), z[3], -u + k.apply(z[2])}};
}

ZState ham_rhs_p2(const ZState& z, double threshold) {
  return ham_rhs_p1(KMatrix::zero(), z, threshold);
}

Canonical canonical_rhs(const KMatrix& k, const Canonical& c, double threshold) {
  const Planar u = control_law(c.psi, threshold);
  Canonical d;
  d.phi = c.x - k.apply(c.psi);
  d.psi = -c.phi;
  d.x = c.y;
  d.y = k.apply(c.x) + u;
  return d;
}

numkit::Field p1_field(const KMatrix& k, double threshold) {
  return [k, threshold](double, const numkit::Vector& v) {
    return ham_rhs_p1(k, ZState::from_vector(v), threshold).to_vector();
  };
}

std::string to_string(StopKind kind) {
  switch (kind) {
    case StopKind::Radius: return "radius";
    case StopKind::SingularLocus: return "singular_locus";
    case StopKind::Handoff: return "handoff";
    case StopKind::Escape: return "escape";
    case StopKind::Horizon: return "horizon";
  }
  return "unknown";
}

namespace {

double tail_norm(const numkit::Vector& v) {
  return std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]);
}

double z1_norm(const numkit::Vector& v) { return std::hypot(v[0], v[1]); }

// Remaining time to the origin from the blown-up rate: near the cycle
// dmu/dt = M, so the scale closes in mu / (-M).
std::optional<double> tail_estimate(const ZState& z, const KMatrix& k) {
  if (z.is_zero()) return 0.0;
  try {
    const blowup::BlownState b = blowup::blow_up(z);
    const blowup::Rate r = blowup::m_rate(b, k, 0.0);
    if (!(r.m < 0.0)) return std::nullopt;
    return b.mu / -r.m;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

}  // namespace

SimulationResult simulate_closed_loop(const ZState& z0, const KMatrix& k,
                                      const SimulationOptions& options) {
  if (!(options.stop_radius >= 0.0) || !(options.singular_threshold >= 0.0) ||
      !(options.t_max > 0.0) || !(options.rtol > 0.0) || !(options.atol > 0.0)) {
    throw DomainError("simulate_closed_loop: tolerances must be positive");
  }
  const numkit::Vector y0 = z0.to_vector();
  if (!y0.allFinite()) throw NonFiniteState("simulate_closed_loop: non-finite initial state");

  SimulationResult out;
  if (z0.is_zero() || tail_norm(y0) <= options.stop_radius) {
    out.trajectory = numkit::Trajectory::from_samples({0.0}, {y0});
    out.reason = StopKind::Radius;
    out.hit_time = 0.0;
    return out;
  }
  if (z1_norm(y0) <= options.singular_threshold) {
    out.trajectory = numkit::Trajectory::from_samples({0.0}, {y0});
    out.reason = StopKind::SingularLocus;
    return out;
  }

  numkit::IntegrateOptions io;
  io.rtol = options.rtol;
  io.atol = options.atol;
  io.stop_on_underflow = true;
  const double radius = options.stop_radius;
  const double thr = options.singular_threshold;
  io.stops.push_back({[radius](double, const numkit::Vector& v) { return tail_norm(v) - radius; },
                      -1});
  io.stops.push_back({[thr](double, const numkit::Vector& v) { return z1_norm(v) - thr; }, -1});
  const double escape = options.escape_radius;
  io.stops.push_back({[escape](double, const numkit::Vector& v) { return v.norm() - escape; }, 1});
  if (options.handoff_ratio > 0.0) {
    const double target = options.handoff_ratio * blowup::homogeneous_scale(z0);
    io.stops.push_back({[target](double, const numkit::Vector& v) {
                          return blowup::homogeneous_scale(ZState::from_vector(v)) - target;
                        },
                        -1});
  }

  // The field is only undefined at z1 = 0 exactly; the threshold is enforced
  // by the event so that the step lands on it.
  const numkit::IntegrationResult res = numkit::integrate(p1_field(k, 0.0), y0, 0.0,
                                                          options.t_max, io);
  out.trajectory = res.trajectory;
  out.stop_time = res.trajectory.back_time();
  if (res.reason == numkit::StopReason::Completed) {
    out.reason = StopKind::Horizon;
    return out;
  }
  if (res.reason == numkit::StopReason::StepUnderflow) {
    out.reason = StopKind::SingularLocus;
  } else {
    switch (*res.event_index) {
      case 0: out.reason = StopKind::Radius; break;
      case 1: out.reason = StopKind::SingularLocus; break;
      case 2: out.reason = StopKind::Escape; break;
      default: out.reason = StopKind::Handoff; break;
    }
  }
  if (out.reason == StopKind::Radius) {
    out.hit_time = out.stop_time;
  } else if (out.reason != StopKind::Escape) {
    const auto tail = tail_estimate(ZState::from_vector(res.trajectory.back_state()), k);
    if (tail) {
      out.tail = *tail;
      out.hit_time = out.stop_time + *tail;
    }
  }
  return out;
}

double cost(const numkit::Trajectory& traj) {
  if (traj.size() < 2) return 0.0;
  const auto& ts = traj.times();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    auto f = [&](double t) {
      const numkit::Vector v = traj.at(t);
      return v[4] * v[4] + v[5] * v[5];
    };
    // dense output is at most quartic, so |z3|^2 has degree 8
    total += boost::math::quadrature::gauss<double, 5>::integrate(f, ts[i], ts[i + 1]);
  }
  return total;
}

bool is_singular(const numkit::Trajectory& traj, double t0, double t1, double tol) {
  if (!(tol > 0.0)) return false;
  if (traj.empty()) return true;
  if (t0 > t1) std::swap(t0, t1);
  t0 = std::max(t0, traj.front_time());
  t1 = std::min(t1, traj.back_time());
  auto check = [&](double t) { return z1_norm(traj.at(t)) < tol; };
  if (!check(t0) || !check(t1)) return false;
  constexpr int kSub = 8;
  for (double t : traj.times()) {
    if (t < t0 || t > t1) continue;
    if (!check(t)) return false;
  }
  const std::size_t i0 = traj.interval_of(t0);
  const std::size_t i1 = traj.interval_of(t1);
  const auto& ts = traj.times();
  for (std::size_t i = i0; i <= i1 && i + 1 < ts.size(); ++i) {
    const double a = std::max(ts[i], t0);
    const double b = std::min(ts[i + 1], t1);
    for (int j = 1; j < kSub; ++j) {
      if (!check(a + (b - a) * j / kSub)) return false;
    }
  }
  return true;
}

}  // namespace spiralctl::pmp
