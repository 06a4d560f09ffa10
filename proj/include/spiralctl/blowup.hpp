#pragma once

#include "spiralctl/numkit/ode.hpp"
#include "spiralctl/planar.hpp"
#include "spiralctl/pmp.hpp"
#include "spiralctl/spiral.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace spiralctl::blowup {

/// Weights w_m of |z_m / A_{m-1}| in the scale function; w_m (5 - m) = 24.
inline constexpr std::array<int, 4> kWeights{6, 8, 12, 24};

/// Each weighted term equals (T - t)^24 on the self-similar spiral, so the
/// sum is divided by the number of terms to put that spiral on Pi with
/// mu = T - t.
inline constexpr double kPiNormalization = 4.0;

/// Point (mu, z~) of the cylinder Q = R x Pi, where
/// Pi = { (1/4) sum_m |z~_m / A_{m-1}|^{w_m} = 1 }.
/// Packed into R^9 as (mu, Re z~1, Im z~1, ..., Re z~4, Im z~4).
struct BlownState {
  double mu = 0.0;
  std::array<Planar, 4> zt{};

  [[nodiscard]] numkit::Vector to_vector() const;
  [[nodiscard]] static BlownState from_vector(const numkit::Vector& v);
};

/// (1/4) sum_m |z_m / A_{m-1}|^{w_m}; homogeneous of degree 24 under the
/// weighted dilation.
double pi_function(const std::array<Planar, 4>& z);

/// pi_function(z~) - 1.
double pi_residual(const BlownState& b);

/// mu(z) = pi_function(z)^{1/24}.
double homogeneous_scale(const pmp::ZState& z);

/// z~_m = z_m / mu^{5-m}. Throws OriginBlowUp at z = 0.
BlownState blow_up(const pmp::ZState& z);

/// z_m = mu^{5-m} z~_m. Throws DegenerateScale at mu = 0.
pmp::ZState blow_down(const BlownState& b);

struct Rate {
  double m = 0.0;   // M = M0 + mu^2 M1
  double m0 = 0.0;
  double m1 = 0.0;
};

/// mu' = mu M, where M is the logarithmic rate of the scale function along
/// the extremal flow (chain rule on mu^24 = pi_function(z)).
Rate m_rate(const BlownState& b, const KMatrix& k,
            double threshold = pmp::kSingularThreshold);

/// The desingularized field in the slow time s (ds = dt / mu):
///   mu'  = mu M
///   z~1' = z~2 - 4 M z~1
///   z~2' = z~3 + mu^2 K z~1 - 3 M z~2
///   z~3' = z~4 - 2 M z~3
///   z~4' = -u + mu^2 K z~3 - M z~4,   u = z~1 / |z~1|.
BlownState blown_rhs(const KMatrix& k, const BlownState& b,
                     double threshold = pmp::kSingularThreshold);

/// blown_rhs on R^9.
numkit::Field blown_field(const KMatrix& k);

/// blown_rhs on R^10, the last component carrying t with t' = mu.
numkit::Field blown_field_with_time(const KMatrix& k);

/// Weighted-dilation retraction onto Pi of a packed state (R^9 or R^10).
/// It leaves the physical state blow_down(b) unchanged.
void retract_to_pi(numkit::Vector& v);

/// Cycle xi0(s) = (0, -A_{m-1} e^{-i alpha s}) of both blown-up systems.
BlownState cycle_state(double s, double alpha = kSqrt5);

/// The model spiral in slow time: mu = T* e^{-s}, z~ = cycle_state(s - log T*).
BlownState spiral_blown_state(double s, double t_star, double alpha = kSqrt5);

/// d/ds of cycle_state (closed form).
BlownState cycle_tangent(double s, double alpha = kSqrt5);

inline double cycle_period(double alpha = kSqrt5) {
  return 2.0 * std::numbers::pi / std::abs(alpha);
}

/// t(s) = t0 + int_{s0}^{s} mu ds along a slow-time trajectory (component 0
/// is mu), as a one-dimensional trajectory over s.
numkit::Trajectory reparam_t_of_s(const numkit::Trajectory& blown, double t0 = 0.0);

/// Solution of Problem 1 on the stable manifold of the cycle, traced
/// backward in s from a leading-order seed at mu = eps. The trajectory is
/// over s in [0, s_seed] with states (mu, z~, t) and t(0) = t_start.
struct SeededBranch {
  numkit::Trajectory blown;
  double t_hit = 1.0;
  double eps = 0.0;
  double alpha = kSqrt5;

  [[nodiscard]] double s_seed() const { return blown.back_time(); }
  /// Slow time at which the physical time equals t.
  [[nodiscard]] double s_at_time(double t) const;
  [[nodiscard]] BlownState blown_at(double s) const;
  [[nodiscard]] double time_at(double s) const;
  [[nodiscard]] pmp::ZState state_at_time(double t) const;
};

struct BranchOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double t_start = 0.0;
};

SeededBranch trace_seeded_branch(const KMatrix& k, const spiral::SpiralFamily& fam, double eps,
                                 const BranchOptions& options = {});

/// z_m(t) / ((T - t)^{5-m} e^{i alpha log(T - t)}), m in 1..4.
Planar normalized_ratio(const SeededBranch& branch, int m, double tau);

struct ScaleFit {
  double slope = 0.0;
  double kappa = 0.0;
};

/// Least-squares fit log mu(s) = log kappa + slope * s over [s0, s1].
ScaleFit fit_scale_decay(const numkit::Trajectory& blown, double s0, double s1,
                         std::size_t samples = 101);

}  // namespace spiralctl::blowup
