#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spiralctl::numkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// State derivative f(t, y).
using Field = std::function<Vector(double, const Vector&)>;

/// Scalar event function g(t, y).
using EventFunction = std::function<double(double, const Vector&)>;

/// Sampled solution with a continuous interpolant.
///
/// Nodes are stored with strictly increasing times regardless of the
/// direction of integration. Each interval between consecutive nodes keeps
/// the quartic continuous extension of the Runge-Kutta step that produced
/// it (or a cubic Hermite / linear interpolant for trajectories assembled
/// from samples), evaluated in the step's own parametrization so that
/// truncated and reversed steps interpolate exactly.
class Trajectory {
 public:
  Trajectory() = default;

  /// Piecewise cubic Hermite interpolant through samples with derivatives.
  static Trajectory from_samples(std::vector<double> times, std::vector<Vector> states,
                                 const std::vector<Vector>& derivatives);
  /// Piecewise linear interpolant through samples.
  static Trajectory from_samples(std::vector<double> times, std::vector<Vector> states);

  [[nodiscard]] std::size_t size() const { return times_.size(); }
  [[nodiscard]] bool empty() const { return times_.empty(); }
  [[nodiscard]] Eigen::Index dimension() const {
    return states_.empty() ? 0 : states_.front().size();
  }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<Vector>& states() const { return states_; }
  [[nodiscard]] double front_time() const { return times_.front(); }
  [[nodiscard]] double back_time() const { return times_.back(); }
  [[nodiscard]] const Vector& front_state() const { return states_.front(); }
  [[nodiscard]] const Vector& back_state() const { return states_.back(); }
  [[nodiscard]] bool contains(double t) const {
    return !empty() && t >= times_.front() && t <= times_.back();
  }

  /// Interpolated state; throws DomainError outside [front_time, back_time].
  [[nodiscard]] Vector at(double t) const;

  /// Index i of the interval [t_i, t_{i+1}] that contains t.
  [[nodiscard]] std::size_t interval_of(double t) const;

  /// The same trajectory with every time shifted by dt.
  [[nodiscard]] Trajectory shifted(double dt) const;

 private:
  friend class TrajectoryBuilder;

  // y(theta) = c0 + theta (c1 + (1-theta) (c2 + theta (c3 + (1-theta) c4))),
  // theta = (t - origin) / step.
  struct Segment {
    double origin = 0.0;
    double step = 1.0;
    Matrix coeffs;  // n x 5
  };

  std::vector<double> times_;
  std::vector<Vector> states_;
  std::vector<Segment> segments_;  // size() - 1 entries
};

/// Terminal stopping condition: integration halts at the first root of g
/// crossed in the requested direction (+1 rising, -1 falling, 0 either).
struct StopEvent {
  EventFunction g;
  int direction = 0;
};

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 2'000'000;
  std::vector<StopEvent> stops;
  /// Applied to every accepted state (retraction onto an invariant manifold).
  std::function<void(Vector&)> project;
  /// Return with StopReason::StepUnderflow instead of throwing when the step
  /// collapses (typically on approach to a non-smooth locus).
  bool stop_on_underflow = false;
};

enum class StopReason { Completed, Event, StepUnderflow };

struct IntegrationResult {
  Trajectory trajectory;
  StopReason reason = StopReason::Completed;
  std::optional<std::size_t> event_index;
  std::string message;
};

/// Dormand-Prince 5(4) with PI step-size control and dense output.
/// Backward spans (t1 < t0) are allowed.
IntegrationResult integrate(const Field& field, const Vector& y0, double t0, double t1,
                            const IntegrateOptions& options = {});

/// Convenience form; throws StepUnderflow / NonFiniteState on failure.
Trajectory integrate_adaptive(const Field& field, const Vector& y0,
                              std::pair<double, double> span, double rtol, double atol);

struct EventHit {
  double t;
  Vector state;
};

/// First root of g along traj (in increasing time) with the requested
/// crossing direction, located by bracketing on the dense output.
std::optional<EventHit> find_event(const Trajectory& traj, const EventFunction& g,
                                   int direction = 0);

/// Root of g on the interval [a, b] of traj, given a sign change at the ends.
double locate_root(const Trajectory& traj, const EventFunction& g, double a, double b);

}  // namespace spiralctl::numkit
