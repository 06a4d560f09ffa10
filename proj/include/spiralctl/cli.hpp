#pragma once

#include "spiralctl/pendulum.hpp"
#include "spiralctl/planar.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spiralctl::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kConfigError = 2,
  kNumericError = 3,
  kTransformNotConstant = 4,
};

struct RunConfig {
  std::string problem = "p2";  // p1 | p2
  std::optional<KMatrix> k;
  std::optional<pendulum::PendulumParams> pendulum;

  // spiral family and start
  double t_star = 1.0;
  double alpha = kSqrt5;
  double zeta_angle = 0.0;
  bool zeta_reflect = false;
  std::string start = "spiral";  // spiral | seeded | zero | custom
  double lambda = 1.0;           // weighted dilation of the start state
  double eps = 1e-3;             // seed distance for start = seeded
  std::array<double, 8> z0{};    // start = custom
  double t_eval = 0.0;           // blowup command: time on the spiral

  // tolerances
  double rtol = 1e-12;
  double atol = 1e-24;
  double stop_radius = 1e-8;
  double singular_threshold = 1e-13;
  double t_max = 100.0;
  double handoff_ratio = 1e-2;  // 0 disables; forward z-flow is unstable near the origin

  // output
  std::string output;
  bool blown = false;
  int spiral_points = 201;

  // floquet
  int samples = 16;
  bool paper_matrix = false;
  std::string convention = "chain_rule";

  // sweep grid
  std::vector<double> sweep_lambda{1.0, 2.0, 4.0};
  std::vector<double> sweep_zeta{0.0};
  std::vector<double> sweep_t_star{1.0};

  /// K from the pendulum when given (k = g (M + m) / (M l) on both axes),
  /// else the explicit K, else zero. Problem p2 always uses K = 0.
  [[nodiscard]] KMatrix effective_k() const;
  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig from_json(const nlohmann::json& j);

/// Applies `--key value` pairs to a JSON config. Values are parsed as JSON
/// when possible, else taken as strings; dotted keys address nested objects.
void apply_overrides(nlohmann::json& j, const std::vector<std::pair<std::string, std::string>>& kv);

/// Splits leftover arguments into key/value pairs ("--key value" or
/// "--key=value"). Throws ConfigError on a dangling key.
std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& args);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Default thread budget: SPIRALCTL_THREADS or 1.
unsigned default_threads();

}  // namespace spiralctl::cli
