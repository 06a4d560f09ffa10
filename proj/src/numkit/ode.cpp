#include "spiralctl/numkit/ode.hpp"

#include "spiralctl/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spiralctl::numkit {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants (Hairer, Norsett & Wanner defaults).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;

bool all_finite(const Vector& v) { return v.allFinite(); }

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double rtol,
                  double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sk;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

Vector eval_segment(const Matrix& c, double theta) {
  const double th1 = 1.0 - theta;
  return c.col(0) +
         theta * (c.col(1) + th1 * (c.col(2) + theta * (c.col(3) + th1 * c.col(4))));
}

bool crossed(double g_prev, double g_new, int direction) {
  const bool rising = g_prev < 0.0 && g_new >= 0.0;
  const bool falling = g_prev > 0.0 && g_new <= 0.0;
  if (direction > 0) return rising;
  if (direction < 0) return falling;
  return rising || falling;
}

template <class F>
double bracket_root(F&& fn, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t max_iter = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [lo, hi] = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, max_iter);
  const double flo = fn(lo);
  const double fhi = fn(hi);
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

}  // namespace

// Accumulates steps in integration order and emits an increasing-time
// Trajectory.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(double t0, const Vector& y0) {
    times_.push_back(t0);
    states_.push_back(y0);
  }

  void push(double t1, const Vector& y1, double origin, double step, Matrix coeffs) {
    times_.push_back(t1);
    states_.push_back(y1);
    segments_.push_back({origin, step, std::move(coeffs)});
  }

  Trajectory finish() && {
    Trajectory out;
    if (times_.size() > 1 && times_.back() < times_.front()) {
      std::reverse(times_.begin(), times_.end());
      std::reverse(states_.begin(), states_.end());
      std::reverse(segments_.begin(), segments_.end());
    }
    out.times_ = std::move(times_);
    out.states_ = std::move(states_);
    out.segments_ = std::move(segments_);
    return out;
  }

 private:
  std::vector<double> times_;
  std::vector<Vector> states_;
  std::vector<Trajectory::Segment> segments_;
};

Trajectory Trajectory::from_samples(std::vector<double> times, std::vector<Vector> states,
                                    const std::vector<Vector>& derivatives) {
  if (times.size() != states.size() || times.size() != derivatives.size()) {
    throw DomainError("from_samples: times, states and derivatives differ in length");
  }
  Trajectory out;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double h = times[i + 1] - times[i];
    if (!(h > 0.0)) throw DomainError("from_samples: times must be strictly increasing");
    const Eigen::Index n = states[i].size();
    Matrix c(n, 5);
    const Vector diff = states[i + 1] - states[i];
    const Vector bspl = h * derivatives[i] - diff;
    c.col(0) = states[i];
    c.col(1) = diff;
    c.col(2) = bspl;
    c.col(3) = diff - h * derivatives[i + 1] - bspl;
    c.col(4).setZero();
    out.segments_.push_back({times[i], h, std::move(c)});
  }
  out.times_ = std::move(times);
  out.states_ = std::move(states);
  return out;
}

Trajectory Trajectory::from_samples(std::vector<double> times, std::vector<Vector> states) {
  if (times.size() != states.size()) {
    throw DomainError("from_samples: times and states differ in length");
  }
  Trajectory out;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double h = times[i + 1] - times[i];
    if (!(h > 0.0)) throw DomainError("from_samples: times must be strictly increasing");
    const Eigen::Index n = states[i].size();
    Matrix c = Matrix::Zero(n, 5);
    c.col(0) = states[i];
    c.col(1) = states[i + 1] - states[i];
    out.segments_.push_back({times[i], h, std::move(c)});
  }
  out.times_ = std::move(times);
  out.states_ = std::move(states);
  return out;
}

std::size_t Trajectory::interval_of(double t) const {
  if (!contains(t)) {
    std::ostringstream msg;
    msg << "time " << t << " outside trajectory span";
    throw DomainError(msg.str());
  }
  if (times_.size() == 1) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(times_.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, segments_.size() - 1);
}

Trajectory Trajectory::shifted(double dt) const {
  Trajectory out = *this;
  for (double& t : out.times_) t += dt;
  for (Segment& seg : out.segments_) seg.origin += dt;
  return out;
}

Vector Trajectory::at(double t) const {
  const std::size_t i = interval_of(t);
  if (segments_.empty()) return states_.front();
  if (t == times_[i]) return states_[i];
  if (t == times_[i + 1]) return states_[i + 1];
  const Segment& seg = segments_[i];
  return eval_segment(seg.coeffs, (t - seg.origin) / seg.step);
}

IntegrationResult integrate(const Field& field, const Vector& y0, double t0, double t1,
                            const IntegrateOptions& options) {
  if (t0 == t1) throw DomainError("integrate: empty span");
  if (!all_finite(y0)) throw NonFiniteState("integrate: non-finite initial state");

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double h_min = 1e-14 * span;
  const double h_max = options.max_step > 0.0 ? std::min(options.max_step, span) : span;
  const double rtol = options.rtol;
  const double atol = options.atol;

  IntegrationResult result;
  Vector y = y0;
  if (options.project) options.project(y);
  double t = t0;
  TrajectoryBuilder builder(t, y);

  Vector k1 = field(t, y);
  if (!all_finite(k1)) throw NonFiniteState("integrate: non-finite derivative at start");

  std::vector<double> g_prev(options.stops.size());
  for (std::size_t e = 0; e < options.stops.size(); ++e) g_prev[e] = options.stops[e].g(t, y);

  double h = options.initial_step;
  if (h <= 0.0) {
    const Vector sk = (atol + rtol * y.array().abs()).matrix();
    const double n = static_cast<double>(y.size());
    const double dnf = (k1.array() / sk.array()).square().sum() / n;
    const double dny = (y.array() / sk.array()).square().sum() / n;
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, h_max);
    bool ok = true;
    Vector f1;
    try {
      f1 = field(t + dir * h, y + dir * h * k1);
      ok = all_finite(f1);
    } catch (const NumericError&) {
      ok = false;
    }
    if (ok) {
      const double der2 =
          std::sqrt(((f1 - k1).array() / sk.array()).square().sum() / n) / h;
      const double der12 = std::max(der2, std::sqrt(dnf));
      const double h1 =
          der12 <= 1e-15 ? std::max(1e-6 * span, h * 1e-3) : std::pow(0.01 / der12, 0.2);
      h = std::min({100.0 * h, h1, h_max});
    }
  }

  double fac_old = 1e-4;
  bool last_reject = false;
  enum class Failure { None, Field, NonFinite } last_failure = Failure::None;
  std::string failure_message;

  for (std::size_t step = 0; step < options.max_steps; ++step) {
    if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
    if (h < h_min || (h < 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t))) {
      std::ostringstream msg;
      msg << "step size underflow at t=" << t;
      if (!failure_message.empty()) msg << " (" << failure_message << ")";
      if (last_failure == Failure::NonFinite) throw NonFiniteState(msg.str());
      if (options.stop_on_underflow) {
        result.reason = StopReason::StepUnderflow;
        result.message = msg.str();
        result.trajectory = std::move(builder).finish();
        return result;
      }
      throw StepUnderflow(msg.str());
    }

    const double hs = dir * h;
    Vector k2, k3, k4, k5, k6, k7, y_new, err;
    bool trial_ok = true;
    try {
      k2 = field(t + c2 * hs, y + hs * (a21 * k1));
      k3 = field(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      k4 = field(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = field(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = field(t + hs,
                 y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = field(t + hs, y_new);
      err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      if (!all_finite(y_new) || !all_finite(k7) || !all_finite(err)) {
        trial_ok = false;
        last_failure = Failure::NonFinite;
        failure_message = "non-finite trial state";
      }
    } catch (const NumericError& ex) {
      trial_ok = false;
      last_failure = Failure::Field;
      failure_message = ex.what();
    }
    if (!trial_ok) {
      h *= 0.25;
      last_reject = true;
      continue;
    }

    const double e = error_norm(err, y, y_new, rtol, atol);
    const double expo1 = 0.2 - kBeta * 0.75;
    const double fac11 = std::pow(std::max(e, 1e-300), expo1);
    if (e > 1.0) {
      h /= std::min(1.0 / kFacMin, fac11 / kSafety);
      last_reject = true;
      continue;
    }

    // accepted
    double fac = fac11 / std::pow(fac_old, kBeta);
    fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
    double h_next = std::min(h / fac, h_max);
    if (last_reject) h_next = std::min(h_next, h);
    fac_old = std::max(e, 1e-4);
    last_reject = false;
    last_failure = Failure::None;
    failure_message.clear();

    const double t_new = (h == std::abs(t1 - t)) ? t1 : t + hs;
    if (options.project) {
      options.project(y_new);
      k7 = field(t_new, y_new);
    }

    Matrix coeffs(y.size(), 5);
    const Vector diff = y_new - y;
    const Vector bspl = hs * k1 - diff;
    coeffs.col(0) = y;
    coeffs.col(1) = diff;
    coeffs.col(2) = bspl;
    coeffs.col(3) = diff - hs * k7 - bspl;
    coeffs.col(4) = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    // terminal events
    std::optional<std::size_t> hit;
    double t_hit = t_new;
    for (std::size_t ev = 0; ev < options.stops.size(); ++ev) {
      const StopEvent& stop = options.stops[ev];
      const double g_new = stop.g(t_new, y_new);
      if (crossed(g_prev[ev], g_new, stop.direction)) {
        auto fn = [&](double tt) { return stop.g(tt, eval_segment(coeffs, (tt - t) / hs)); };
        const double root = bracket_root(fn, t, t_new, g_prev[ev], g_new);
        if (!hit || dir * (root - t_hit) < 0.0) {
          hit = ev;
          t_hit = root;
        }
      }
      g_prev[ev] = g_new;
    }
    if (hit) {
      const Vector y_hit = eval_segment(coeffs, (t_hit - t) / hs);
      if (t_hit != t) builder.push(t_hit, y_hit, t, hs, std::move(coeffs));
      result.reason = StopReason::Event;
      result.event_index = hit;
      result.trajectory = std::move(builder).finish();
      return result;
    }

    builder.push(t_new, y_new, t, hs, std::move(coeffs));
    t = t_new;
    y = std::move(y_new);
    k1 = std::move(k7);
    h = h_next;
    if (t == t1) {
      result.reason = StopReason::Completed;
      result.trajectory = std::move(builder).finish();
      return result;
    }
  }
  throw StepUnderflow("integrate: step budget exhausted");
}

Trajectory integrate_adaptive(const Field& field, const Vector& y0,
                              std::pair<double, double> span, double rtol, double atol) {
  IntegrateOptions opts;
  opts.rtol = rtol;
  opts.atol = atol;
  return integrate(field, y0, span.first, span.second, opts).trajectory;
}

double locate_root(const Trajectory& traj, const EventFunction& g, double a, double b) {
  auto fn = [&](double tt) { return g(tt, traj.at(tt)); };
  return bracket_root(fn, a, b, fn(a), fn(b));
}

std::optional<EventHit> find_event(const Trajectory& traj, const EventFunction& g,
                                   int direction) {
  if (traj.size() < 2) return std::nullopt;
  const auto& ts = traj.times();
  const auto& ys = traj.states();
  double g_prev = g(ts[0], ys[0]);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double g_new = g(ts[i], ys[i]);
    if (crossed(g_prev, g_new, direction)) {
      const double root = locate_root(traj, g, ts[i - 1], ts[i]);
      return EventHit{root, traj.at(root)};
    }
    g_prev = g_new;
  }
  return std::nullopt;
}

}  // namespace spiralctl::numkit
