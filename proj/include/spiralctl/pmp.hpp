#pragma once

#include "spiralctl/numkit/ode.hpp"
#include "spiralctl/planar.hpp"

#include <array>
#include <optional>
#include <string>

namespace spiralctl::pmp {

/// Below this |z1| the feedback u = z1/|z1| is undefined.
inline constexpr double kSingularThreshold = 1e-13;
inline constexpr double kStopRadius = 1e-8;

/// Extremal state z = (z1, z2, z3, z4) with z1 = psi, z2 = -phi, z3 = -x,
/// z4 = -y. Packed into R^8 as (Re z1, Im z1, ..., Re z4, Im z4).
struct ZState {
  std::array<Planar, 4> z{};

  [[nodiscard]] Planar& operator[](std::size_t m) { return z[m]; }
  [[nodiscard]] const Planar& operator[](std::size_t m) const { return z[m]; }

  [[nodiscard]] numkit::Vector to_vector() const;
  [[nodiscard]] static ZState from_vector(const numkit::Vector& v);
  [[nodiscard]] double norm() const;
  [[nodiscard]] bool is_zero() const { return norm() == 0.0; }

  /// Applies the same planar isometry to every block.
  [[nodiscard]] ZState transformed(const Isometry& iso) const;
  /// Weighted dilation (lambda^4 z1, lambda^3 z2, lambda^2 z3, lambda z4).
  [[nodiscard]] ZState dilated(double lambda) const;

  friend ZState operator-(const ZState& a, const ZState& b);
};

/// The original variables (x, y, phi, psi).
struct Canonical {
  Planar x, y, phi, psi;

  [[nodiscard]] ZState to_z() const { return {{psi, -phi, -x, -y}}; }
  [[nodiscard]] static Canonical from_z(const ZState& z) {
    return {-z[2], -z[3], -z[1], z[0]};
  }
};

/// u = z1 / |z1|; throws SingularControl when |z1| <= threshold.
Planar control_law(Planar z1, double threshold = kSingularThreshold);

/// H = -<x,x>/2 + <y,phi> + <Kx,psi> + <u,psi>.
double hamiltonian(Planar x, Planar y, Planar phi, Planar psi, Planar u, const KMatrix& k);

/// H evaluated with the maximizing control.
double hamiltonian(const ZState& z, const KMatrix& k);

/// z1' = z2, z2' = z3 + K z1, z3' = z4, z4' = -u + K z3, u = z1/|z1|.
ZState ham_rhs_p1(const KMatrix& k, const ZState& z, double threshold = kSingularThreshold);

/// The model system (K = 0).
ZState ham_rhs_p2(const ZState& z, double threshold = kSingularThreshold);

/// Canonical-form field phi' = x - K psi, psi' = -phi, x' = y, y' = K x + u.
Canonical canonical_rhs(const KMatrix& k, const Canonical& c,
                        double threshold = kSingularThreshold);

/// ham_rhs_p1 packed as an ODE field on R^8.
numkit::Field p1_field(const KMatrix& k, double threshold = kSingularThreshold);

enum class StopKind {
  Radius,         // |(z3, z4)| reached the stop radius
  SingularLocus,  // |z1| reached the singular threshold or the step collapsed there
  Handoff,        // blown-up scale fell below handoff_ratio of its initial value
  Escape,         // |z| exceeded the escape radius
  Horizon,        // t_max reached
};

std::string to_string(StopKind kind);

struct SimulationOptions {
  double stop_radius = kStopRadius;
  double singular_threshold = kSingularThreshold;
  double rtol = 1e-12;
  double atol = 1e-24;
  double t_max = 100.0;
  double escape_radius = 1e6;
  /// When > 0, stop once the homogeneous scale mu(z) drops below this
  /// fraction of mu(z0) and close the remaining time with the tail estimate.
  double handoff_ratio = 0.0;
};

struct SimulationResult {
  numkit::Trajectory trajectory;
  StopKind reason = StopKind::Horizon;
  double stop_time = 0.0;
  /// Time to the origin: the radius event time, or stop_time plus the
  /// blown-up tail mu / (-M) when the state is still contracting.
  std::optional<double> hit_time;
  double tail = 0.0;
};

/// Forward integration of the closed-loop extremal flow of Problem 1.
SimulationResult simulate_closed_loop(const ZState& z0, const KMatrix& k,
                                      const SimulationOptions& options = {});

/// Integral of |x|^2 = |z3|^2 over the trajectory (Gauss-Legendre on the
/// dense output).
double cost(const numkit::Trajectory& traj);

/// True iff sup |z1| < tol on [t0, t1].
bool is_singular(const numkit::Trajectory& traj, double t0, double t1, double tol);

}  // namespace spiralctl::pmp
