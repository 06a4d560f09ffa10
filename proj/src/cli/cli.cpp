#include "spiralctl/cli.hpp"

#include "spiralctl/acceptance.hpp"
#include "spiralctl/blowup.hpp"
#include "spiralctl/errors.hpp"
#include "spiralctl/floquet.hpp"
#include "spiralctl/pmp.hpp"
#include "spiralctl/spiral.hpp"

#include <CLI11.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace spiralctl::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json complex_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

json matrix_json(const numkit::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// 17 significant digits, "nan" for missing values
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : file_(path) {
    if (!file_) throw ConfigError("cannot open output file " + path);
    file_ << std::setprecision(17);
  }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) file_ << (i ? "," : "") << cols[i];
    file_ << "\n";
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) file_ << ",";
      if (std::isnan(vals[i])) {
        file_ << "nan";
      } else {
        file_ << vals[i];
      }
    }
    file_ << "\n";
  }

 private:
  std::ofstream file_;
};

std::vector<std::string> trajectory_columns(bool blown) {
  std::vector<std::string> cols{"t",    "x1",   "x2",   "y1",   "y2",   "u1",    "u2",
                                "phi1", "phi2", "psi1", "psi2", "norm_x", "winding_u"};
  if (blown) {
    for (const char* c : {"mu", "zt1_1", "zt1_2", "zt2_1", "zt2_2", "zt3_1", "zt3_2", "zt4_1",
                          "zt4_2"}) {
      cols.emplace_back(c);
    }
  }
  return cols;
}

// Accumulates the unwrapped phase of u across rows.
struct PhaseTracker {
  std::optional<Planar> prev;
  double turns = 0.0;
  double push(Planar u) {
    if (u == Planar{}) return turns;
    if (prev) turns += std::arg(u / *prev) / (2.0 * std::numbers::pi);
    prev = u;
    return turns;
  }
};

std::vector<double> trajectory_row(double t, const pmp::ZState& z, PhaseTracker& phase,
                                   bool blown) {
  const pmp::Canonical c = pmp::Canonical::from_z(z);
  const double r = std::abs(c.psi);
  const Planar u = r > 0.0 ? c.psi / r : Planar{};
  const double turns = phase.push(u);
  std::vector<double> row{t,
                          c.x.real(),
                          c.x.imag(),
                          c.y.real(),
                          c.y.imag(),
                          u.real(),
                          u.imag(),
                          c.phi.real(),
                          c.phi.imag(),
                          c.psi.real(),
                          c.psi.imag(),
                          std::abs(c.x),
                          turns};
  if (blown) {
    if (z.is_zero()) {
      row.insert(row.end(), 9, kNaN);
    } else {
      const numkit::Vector b = blowup::blow_up(z).to_vector();
      row.insert(row.end(), b.data(), b.data() + b.size());
    }
  }
  return row;
}

spiral::SpiralFamily family_of(const RunConfig& c) {
  return spiral::SpiralFamily::make(c.t_star, c.alpha, Isometry{c.zeta_angle, c.zeta_reflect});
}

pmp::ZState start_state(const RunConfig& c) {
  if (c.start == "zero") return {};
  if (c.start == "custom") {
    numkit::Vector v(8);
    for (int i = 0; i < 8; ++i) v[i] = c.z0[static_cast<std::size_t>(i)];
    return pmp::ZState::from_vector(v).dilated(c.lambda);
  }
  return spiral::spiral_state(0.0, family_of(c)).dilated(c.lambda);
}

pmp::SimulationOptions sim_options(const RunConfig& c) {
  pmp::SimulationOptions o;
  o.rtol = c.rtol;
  o.atol = c.atol;
  o.stop_radius = c.stop_radius;
  o.singular_threshold = c.singular_threshold;
  o.t_max = c.t_max;
  o.handoff_ratio = c.handoff_ratio;
  return o;
}

json hit_json(const std::optional<double>& hit) { return hit ? json(*hit) : json(nullptr); }

// Forward run or backward-seeded branch; returns the JSON summary.
json simulate(const RunConfig& c) {
  const KMatrix k = c.effective_k();
  json out{{"schema_version", kSchemaVersion}, {"command", "simulate"}, {"problem", c.problem},
           {"K", json::array({k.k1, k.k2})}, {"start", c.start}};
  std::optional<CsvWriter> csv;
  if (!c.output.empty()) {
    csv.emplace(c.output);
    csv->header(trajectory_columns(c.blown));
  }
  PhaseTracker phase;

  if (c.start == "seeded") {
    const auto fam = family_of(c);
    const auto br = blowup::trace_seeded_branch(k, fam, c.eps);
    const auto& ss = br.blown.times();
    double cost = 0.0;
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const numkit::Vector& v = br.blown.states()[i];
      if (csv) {
        csv->row(trajectory_row(v[9], blowup::blow_down(blowup::BlownState::from_vector(v)),
                                phase, c.blown));
      }
      if (i > 0) {
        auto integrand = [&](double s) {
          const numkit::Vector w = br.blown.at(s);
          return std::pow(w[0], 5) * (w[5] * w[5] + w[6] * w[6]);
        };
        cost += boost::math::quadrature::gauss<double, 7>::integrate(integrand, ss[i - 1], ss[i]);
      }
    }
    const double winding = spiral::winding_number(br.blown, 1, 0.0, br.s_seed());
    out["hit_time"] = br.t_hit;
    out["stop_reason"] = "seed";
    out["stop_time"] = br.t_hit - br.eps;
    out["tail"] = br.eps;
    out["cost"] = cost;
    out["winding"] = winding;
    out["nodes"] = ss.size();
    return out;
  }

  const pmp::ZState z0 = start_state(c);
  const pmp::SimulationResult res = pmp::simulate_closed_loop(z0, k, sim_options(c));
  const auto& traj = res.trajectory;
  if (z0.is_zero()) {
    out["hit_time"] = 0.0;
    out["stop_reason"] = pmp::to_string(res.reason);
    out["stop_time"] = 0.0;
    out["tail"] = 0.0;
    out["cost"] = 0.0;
    out["winding"] = 0.0;
    out["nodes"] = 0;
    return out;
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const pmp::ZState z = pmp::ZState::from_vector(traj.states()[i]);
    const auto row = trajectory_row(traj.times()[i], z, phase, c.blown);
    if (csv) csv->row(row);
  }
  out["hit_time"] = hit_json(res.hit_time);
  out["stop_reason"] = pmp::to_string(res.reason);
  out["stop_time"] = res.stop_time;
  out["tail"] = res.tail;
  out["cost"] = pmp::cost(traj);
  out["winding"] = phase.turns;
  out["nodes"] = traj.size();
  return out;
}

json spiral_cmd(const RunConfig& c) {
  const auto fam = family_of(c);
  json a = json::array();
  for (const auto& am : fam.a) a.push_back(complex_json(am));
  const auto closure = fam.a[3] * std::complex<double>(1.0, fam.alpha);
  if (!c.output.empty()) {
    CsvWriter csv(c.output);
    csv.header(trajectory_columns(c.blown));
    PhaseTracker phase;
    const int n = std::max(2, c.spiral_points);
    for (int i = 0; i < n; ++i) {
      const double t = 0.99 * c.t_star * i / (n - 1);
      csv.row(trajectory_row(t, spiral::spiral_state(t, fam), phase, c.blown));
    }
  }
  const pmp::ZState z0 = spiral::spiral_state(0.0, fam);
  return {{"schema_version", kSchemaVersion},
          {"command", "spiral"},
          {"T_star", fam.t_star},
          {"alpha", fam.alpha},
          {"zeta", {{"angle", fam.zeta.angle}, {"reflect", fam.zeta.reflect}}},
          {"A", a},
          {"A3_times_1_plus_i_alpha", complex_json(closure)},
          {"cost", spiral::spiral_cost(fam)},
          {"hitting_ratio", spiral::hitting_ratio(-z0[2], -z0[3], fam.t_star)}};
}

json blowup_cmd(const RunConfig& c) {
  const KMatrix k = c.effective_k();
  const auto fam = family_of(c);
  const pmp::ZState z = c.start == "custom" ? start_state(c)
                                            : spiral::spiral_state(c.t_eval, fam).dilated(c.lambda);
  const blowup::BlownState b = blowup::blow_up(z);
  const blowup::Rate r = blowup::m_rate(b, k);
  json zt = json::array();
  for (const auto& w : b.zt) zt.push_back(complex_json(w));
  return {{"schema_version", kSchemaVersion},
          {"command", "blowup"},
          {"mu", b.mu},
          {"zt", zt},
          {"pi_residual", blowup::pi_residual(b)},
          {"M", r.m},
          {"M0", r.m0},
          {"M1", r.m1},
          {"cycle_period", blowup::cycle_period(fam.alpha)}};
}

floquet::RateConvention convention_of(const std::string& s) {
  if (s == "chain_rule") return floquet::RateConvention::ChainRule;
  if (s == "unnormalized_gradient") return floquet::RateConvention::UnnormalizedGradient;
  throw ConfigError("convention must be chain_rule or unnormalized_gradient");
}

json floquet_cmd(const RunConfig& c, unsigned threads) {
  floquet::FloquetReport rep;
  if (c.paper_matrix) {
    rep = floquet::analyze_matrix(floquet::paper_J());
  } else {
    floquet::ReconstructOptions o;
    o.convention = convention_of(c.convention);
    o.threads = threads;
    rep = floquet::reconstruct_J(c.effective_k(), static_cast<std::size_t>(c.samples), o);
  }
  json spec = json::array();
  for (const auto& l : rep.spectrum.eigenvalues) spec.push_back(complex_json(l));
  json cyl = json::array();
  for (const auto& l : rep.cylinder_spectrum) cyl.push_back(complex_json(l));
  json out{{"schema_version", kSchemaVersion},
           {"command", "floquet"},
           {"source", c.paper_matrix ? "paper_matrix" : "reconstruction"},
           {"J", matrix_json(rep.j_reconstructed)},
           {"spectrum", spec},
           {"classification", rep.classification},
           {"spectral_gap_to_paper", rep.spectral_gap_to_paper},
           {"cylinder_spectrum", c.paper_matrix ? json(nullptr) : cyl},
           {"transverse_exponent",
            c.paper_matrix ? json(nullptr) : json(rep.transverse_exponent)}};
  if (!c.paper_matrix) {
    out["constancy_residual"] = rep.constancy_residual;
    out["samples"] = rep.samples;
    out["frame_rate"] = rep.frame_rate;
    out["convention"] = floquet::to_string(rep.convention);
  }
  try {
    const numkit::Vector v = floquet::stable_direction(rep);
    out["stable_direction"] = std::vector<double>(v.data(), v.data() + v.size());
  } catch (const NoStableDirection&) {
    out["stable_direction"] = nullptr;
  }
  return out;
}

struct SweepRow {
  std::size_t index = 0;
  double lambda = 0, zeta = 0, t_star = 0;
  double hit = kNaN, ratio = kNaN, cost = kNaN, winding = kNaN;
  bool ok = false;
};

SweepRow sweep_row(const RunConfig& base, std::size_t idx, double lam, double zeta,
                   double t_star) {
  SweepRow r{idx, lam, zeta, t_star};
  try {
    RunConfig c = base;
    c.lambda = lam;
    c.zeta_angle = zeta;
    c.t_star = t_star;
    c.output.clear();
    const json s = simulate(c);
    if (s["hit_time"].is_null()) return r;
    r.hit = s["hit_time"].get<double>();
    const pmp::ZState z0 = start_state(c);
    r.ratio = spiral::hitting_ratio(-z0[2], -z0[3], r.hit);
    r.cost = s["cost"].get<double>();
    r.winding = s["winding"].get<double>();
    r.ok = true;
  } catch (const Error&) {
    r.ok = false;
  }
  return r;
}

json sweep_cmd(const RunConfig& c, unsigned threads) {
  struct Point {
    double lam, zeta, t_star;
  };
  std::vector<Point> grid;
  for (double t : c.sweep_t_star) {
    for (double z : c.sweep_zeta) {
      for (double l : c.sweep_lambda) grid.push_back({l, z, t});
    }
  }
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      rows[i] = sweep_row(c, i, grid[i].lam, grid[i].zeta, grid[i].t_star);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (!c.output.empty()) {
    CsvWriter csv(c.output);
    csv.header({"index", "lambda", "zeta_angle", "T_star", "hit_time", "hitting_ratio", "cost",
                "winding"});
    for (const auto& r : rows) {
      csv.row({static_cast<double>(r.index), r.lambda, r.zeta, r.t_star, r.hit, r.ratio, r.cost,
               r.winding});
    }
  }
  std::size_t failures = 0;
  double rmin = kNaN, rmax = kNaN;
  json table = json::array();
  for (const auto& r : rows) {
    if (!r.ok) {
      ++failures;
    } else {
      rmin = std::isnan(rmin) ? r.ratio : std::min(rmin, r.ratio);
      rmax = std::isnan(rmax) ? r.ratio : std::max(rmax, r.ratio);
    }
    table.push_back({{"index", r.index},
                     {"lambda", r.lambda},
                     {"zeta_angle", r.zeta},
                     {"T_star", r.t_star},
                     {"hit_time", r.ok ? json(r.hit) : json(nullptr)}});
  }
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return {{"schema_version", kSchemaVersion},
          {"command", "sweep"},
          {"rows", rows.size()},
          {"failures", failures},
          {"hitting_ratio_min", num(rmin)},
          {"hitting_ratio_max", num(rmax)},
          {"table", table}};
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
}

template <class T>
void read(const json& j, const char* key, T& field) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config key '") + key + "': " + ex.what());
  }
}

}  // namespace

KMatrix RunConfig::effective_k() const {
  if (problem == "p2") return KMatrix::zero();
  if (pendulum) return KMatrix::scalar(pendulum->stiffness());
  return k.value_or(KMatrix::zero());
}

void RunConfig::validate() const {
  if (problem != "p1" && problem != "p2") throw ConfigError("problem must be p1 or p2");
  if (k && pendulum) throw ConfigError("give either K or pendulum, not both");
  if (pendulum) {
    try {
      pendulum->validate();
    } catch (const DomainError& ex) {
      throw ConfigError(ex.what());
    }
  }
  if (problem == "p1" && !effective_k().is_nondegenerate()) {
    throw ConfigError("problem p1 needs a nondegenerate K (both entries nonzero)");
  }
  for (double v : {rtol, atol, stop_radius, singular_threshold, t_max, t_star, eps, lambda}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("tolerances, times, eps and lambda must be positive and finite");
    }
  }
  if (handoff_ratio < 0.0 || handoff_ratio >= 1.0) {
    throw ConfigError("handoff_ratio must lie in [0, 1)");
  }
  if (!(std::abs(std::abs(alpha) - kSqrt5) < 1e-12)) {
    throw ConfigError("alpha must be +sqrt5 or -sqrt5");
  }
  if (start != "spiral" && start != "seeded" && start != "zero" && start != "custom") {
    throw ConfigError("start must be spiral, seeded, zero or custom");
  }
  if (start == "seeded" && !(eps < t_star)) throw ConfigError("eps must be below T_star");
  if (samples < 8) throw ConfigError("samples must be at least 8");
  convention_of(convention);
}

json to_json(const RunConfig& c) {
  json j{{"problem", c.problem},
         {"T_star", c.t_star},
         {"alpha", c.alpha},
         {"zeta_angle", c.zeta_angle},
         {"zeta_reflect", c.zeta_reflect},
         {"start", c.start},
         {"lambda", c.lambda},
         {"eps", c.eps},
         {"z0", c.z0},
         {"t", c.t_eval},
         {"rtol", c.rtol},
         {"atol", c.atol},
         {"stop_radius", c.stop_radius},
         {"singular_threshold", c.singular_threshold},
         {"t_max", c.t_max},
         {"handoff_ratio", c.handoff_ratio},
         {"output", c.output},
         {"blown", c.blown},
         {"spiral_points", c.spiral_points},
         {"samples", c.samples},
         {"paper_matrix", c.paper_matrix},
         {"convention", c.convention},
         {"sweep_lambda", c.sweep_lambda},
         {"sweep_zeta", c.sweep_zeta},
         {"sweep_T_star", c.sweep_t_star}};
  j["K"] = c.k ? json::array({c.k->k1, c.k->k2}) : json(nullptr);
  if (c.pendulum) {
    j["pendulum"] = {{"M", c.pendulum->M}, {"m", c.pendulum->m}, {"l", c.pendulum->l},
                     {"g", c.pendulum->g}};
  } else {
    j["pendulum"] = nullptr;
  }
  return j;
}

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{
      "problem", "K", "pendulum", "T_star", "alpha", "zeta_angle", "zeta_reflect", "start",
      "lambda", "eps", "z0", "t", "rtol", "atol", "stop_radius", "singular_threshold", "t_max",
      "handoff_ratio", "output", "blown", "spiral_points", "samples", "paper_matrix",
      "convention", "sweep_lambda", "sweep_zeta", "sweep_T_star"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  RunConfig c;
  read(j, "problem", c.problem);
  if (j.contains("K") && !j["K"].is_null()) {
    std::array<double, 2> kk{};
    read(j, "K", kk);
    c.k = KMatrix{kk[0], kk[1]};
  }
  if (j.contains("pendulum") && !j["pendulum"].is_null()) {
    const json& p = j["pendulum"];
    if (!p.is_object()) throw ConfigError("pendulum must be an object");
    pendulum::PendulumParams pp;
    read(p, "M", pp.M);
    read(p, "m", pp.m);
    read(p, "l", pp.l);
    read(p, "g", pp.g);
    c.pendulum = pp;
  }
  read(j, "T_star", c.t_star);
  read(j, "alpha", c.alpha);
  read(j, "zeta_angle", c.zeta_angle);
  read(j, "zeta_reflect", c.zeta_reflect);
  read(j, "start", c.start);
  read(j, "lambda", c.lambda);
  read(j, "eps", c.eps);
  read(j, "z0", c.z0);
  read(j, "t", c.t_eval);
  read(j, "rtol", c.rtol);
  read(j, "atol", c.atol);
  read(j, "stop_radius", c.stop_radius);
  read(j, "singular_threshold", c.singular_threshold);
  read(j, "t_max", c.t_max);
  read(j, "handoff_ratio", c.handoff_ratio);
  read(j, "output", c.output);
  read(j, "blown", c.blown);
  read(j, "spiral_points", c.spiral_points);
  read(j, "samples", c.samples);
  read(j, "paper_matrix", c.paper_matrix);
  read(j, "convention", c.convention);
  read(j, "sweep_lambda", c.sweep_lambda);
  read(j, "sweep_zeta", c.sweep_zeta);
  read(j, "sweep_T_star", c.sweep_t_star);
  return c;
}

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() <= 2) {
      throw ConfigError("unexpected argument '" + a + "'");
    }
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      kv.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (i + 1 >= args.size()) throw ConfigError("missing value for --" + body);
    kv.emplace_back(body, args[++i]);
  }
  return kv;
}

void apply_overrides(json& j, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [key, raw] : kv) {
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    json* node = &j;
    std::string rest = key;
    for (auto dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
      json& child = (*node)[rest.substr(0, dot)];
      if (!child.is_object()) child = json::object();
      node = &child;
      rest = rest.substr(dot + 1);
    }
    (*node)[rest] = value;
  }
}

unsigned default_threads() {
  if (const char* env = std::getenv("SPIRALCTL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-time optimal stabilization: spiral extremals, blow-up and Floquet tools"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config file");

  unsigned threads = default_threads();
  bool paper_matrix = false;
  bool blown = false;
  std::vector<std::string> only;
  std::optional<double> a0;
  std::optional<int> samples;

  auto* sim = app.add_subcommand("simulate", "forward closed-loop run or backward-seeded branch");
  sim->add_flag("--blown", blown, "add blown-up columns to the CSV");
  auto* spi = app.add_subcommand("spiral", "closed-form spiral family");
  spi->add_flag("--blown", blown, "add blown-up columns to the CSV");
  auto* blw = app.add_subcommand("blowup", "blow-up of a spiral state and its rate M");
  auto* flq = app.add_subcommand("floquet", "constant matrix of the cycle and its spectrum");
  flq->add_flag("--paper-matrix", paper_matrix, "analyze the published matrix");
  flq->add_option("--samples", samples, "samples over one period");
  flq->add_option("--threads", threads, "thread budget");
  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  ver->add_option("--only", only, "criterion ids or groups")->delimiter(',');
  ver->add_option("--a0", a0, "override A0 in the spiral residual check");
  ver->add_option("--threads", threads, "thread budget");
  auto* swp = app.add_subcommand("sweep", "hitting times over a grid of scaled spirals");
  swp->add_option("--threads", threads, "thread budget");
  for (auto* sub : {sim, spi, blw, flq, swp}) {
    sub->allow_extras();
    sub->add_option("-c,--config", config_path, "JSON config file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (ver->parsed()) {
      acceptance::AcceptanceOptions o;
      o.only = only;
      o.a0_override = a0;
      o.threads = threads;
      bool all = true;
      for (const auto& r : acceptance::run(o)) {
        out << acceptance::format(r) << "\n";
        all = all && r.passed;
      }
      return all ? kOk : kVerifyFailed;
    }

    CLI::App* active = app.get_subcommands().front();
    json cfg = config_path.empty() ? json::object() : read_json_file(config_path);
    apply_overrides(cfg, parse_overrides(active->remaining()));
    if (blown) cfg["blown"] = true;
    if (paper_matrix) cfg["paper_matrix"] = true;
    if (samples) cfg["samples"] = *samples;
    const RunConfig c = from_json(cfg);
    c.validate();

    json result;
    if (active == sim) {
      result = simulate(c);
    } else if (active == spi) {
      result = spiral_cmd(c);
    } else if (active == blw) {
      result = blowup_cmd(c);
    } else if (active == flq) {
      result = floquet_cmd(c, threads);
    } else {
      result = sweep_cmd(c, threads);
      out << result.dump(2) << "\n";
      return result["failures"].get<std::size_t>() == result["rows"].get<std::size_t>() &&
                     result["rows"].get<std::size_t>() > 0
                 ? kNumericError
                 : kOk;
    }
    out << result.dump(2) << "\n";
    return kOk;
  } catch (const TransformNotConstant& ex) {
    err << "error: " << ex.what() << "\n";
    return kTransformNotConstant;
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const NumericError& ex) {
    err << "error: " << ex.what() << "\n";
    return kNumericError;
  }
}

}  // namespace spiralctl::cli
