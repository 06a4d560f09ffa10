#include "spiralctl/cli.hpp"
#include "spiralctl/errors.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace spiralctl;
using namespace spiralctl::cli;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "spiralctl");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("spiralctl_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  const RunConfig back = from_json(to_json(c));
  EXPECT_EQ(back.problem, c.problem);
  EXPECT_EQ(back.t_star, c.t_star);
  EXPECT_EQ(back.sweep_lambda, c.sweep_lambda);
  EXPECT_FALSE(back.k);
  EXPECT_NO_THROW(back.validate());
}

TEST(Config, PendulumSetsStiffness) {
  const RunConfig c = from_json(json::parse(R"({"problem":"p1","pendulum":{"M":1,"m":1,"l":1,"g":1}})"));
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_k().k1, 2.0);
  EXPECT_EQ(c.effective_k().k2, 2.0);
}

TEST(Config, Rejections) {
  EXPECT_THROW(from_json(json::parse(R"({"nope":1})")), ConfigError);
  EXPECT_THROW(from_json(json::parse(R"({"T_star":"x"})")), ConfigError);
  EXPECT_THROW(from_json(json::array()), ConfigError);
  auto invalid = [](const char* text) { from_json(json::parse(text)).validate(); };
  EXPECT_THROW(invalid(R"({"problem":"p1","K":[2,2],"pendulum":{"M":1}})"), ConfigError);
  EXPECT_THROW(invalid(R"({"problem":"p1","K":[0,2]})"), ConfigError);
  EXPECT_THROW(invalid(R"({"rtol":-1})"), ConfigError);
  EXPECT_THROW(invalid(R"({"alpha":2})"), ConfigError);
  EXPECT_THROW(invalid(R"({"problem":"p3"})"), ConfigError);
  EXPECT_THROW(invalid(R"({"pendulum":{"l":0}})"), ConfigError);
  EXPECT_THROW(invalid(R"({"convention":"other"})"), ConfigError);
}

TEST(Overrides, ParseAndApply) {
  const auto kv = parse_overrides({"--T_star", "2", "--pendulum.M=3", "--output", "a.csv"});
  ASSERT_EQ(kv.size(), 3u);
  json j = json::object();
  apply_overrides(j, kv);
  EXPECT_EQ(j["T_star"], 2);
  EXPECT_EQ(j["pendulum"]["M"], 3);
  EXPECT_EQ(j["output"], "a.csv");
  EXPECT_THROW(parse_overrides({"--dangling"}), ConfigError);
  EXPECT_THROW(parse_overrides({"loose"}), ConfigError);
}

TEST(Threads, EnvironmentDefault) {
  ::setenv("SPIRALCTL_THREADS", "3", 1);
  EXPECT_EQ(default_threads(), 3u);
  ::setenv("SPIRALCTL_THREADS", "junk", 1);
  EXPECT_EQ(default_threads(), 1u);
  ::unsetenv("SPIRALCTL_THREADS");
  EXPECT_EQ(default_threads(), 1u);
}

TEST(Run, SimulateModelSpiral) {
  const auto path = temp_path("sim.csv");
  const auto r = invoke({"simulate", "--output", path});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_NEAR(j["hit_time"].get<double>(), 1.0, 1e-3);
  const std::string csv = slurp(path);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "t,x1,x2,y1,y2,u1,u2,phi1,phi2,psi1,psi2,norm_x,winding_u");
  std::remove(path.c_str());
}

TEST(Run, SimulateZeroState) {
  const auto r = invoke({"simulate", "--start", "zero"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["hit_time"], 0.0);
}

TEST(Run, SimulateSeededPendulum) {
  const auto r = invoke({"simulate", "--problem", "p1", "--pendulum", R"({"M":1,"m":1,"l":1,"g":1})",
                         "--start", "seeded", "--eps", "1e-4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["hit_time"].get<double>(), 1.0, 1e-12);
  EXPECT_GT(std::abs(j["winding"].get<double>()), 3.0);
}

TEST(Run, SimulateEscapeGivesNullHit) {
  const auto r = invoke({"simulate", "--start", "custom", "--z0", "[1,0,10,0,100,0,1000,0]",
                         "--problem", "p1", "--K", "[2,2]", "--t_max", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["hit_time"].is_null());
}

TEST(Run, CsvIsDeterministic) {
  const auto a = temp_path("det_a.csv"), b = temp_path("det_b.csv");
  ASSERT_EQ(invoke({"simulate", "--blown", "--output", a}).code, 0);
  ASSERT_EQ(invoke({"simulate", "--blown", "--output", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a).find("mu"), std::string::npos);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Run, SpiralAndBlowup) {
  auto r = invoke({"spiral"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_NEAR(j["A3_times_1_plus_i_alpha"][0].get<double>(), -1.0, 1e-14);
  r = invoke({"blowup", "--t", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  EXPECT_NEAR(j["mu"].get<double>(), 0.75, 1e-14);
  EXPECT_NEAR(j["M0"].get<double>(), -1.0, 1e-12);
}

TEST(Run, FloquetReports) {
  auto r = invoke({"floquet", "--paper-matrix"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j["source"], "paper_matrix");
  EXPECT_EQ(j["classification"], json::array({1, 1, 7}));
  r = invoke({"floquet", "--samples", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  EXPECT_LT(j["constancy_residual"].get<double>(), 1e-6);
  EXPECT_EQ(j["stable_direction"].size(), 9u);
}

TEST(Run, SweepScalesLinearly) {
  const auto path = temp_path("sweep.csv");
  const auto r = invoke({"sweep", "--threads", "3", "--output", path});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["rows"], 3);
  const double h1 = j["table"][0]["hit_time"];
  for (int i = 1; i < 3; ++i) {
    const double lam = j["table"][i]["lambda"];
    EXPECT_NEAR(j["table"][i]["hit_time"].get<double>() / (lam * h1), 1.0, 1e-3);
  }
  EXPECT_LT(j["hitting_ratio_max"].get<double>() / j["hitting_ratio_min"].get<double>(), 1.001);
  // serial and threaded sweeps write the same table
  const auto serial = temp_path("sweep1.csv");
  ASSERT_EQ(invoke({"sweep", "--threads", "1", "--output", serial}).code, 0);
  EXPECT_EQ(slurp(path), slurp(serial));
  std::remove(path.c_str());
  std::remove(serial.c_str());
}

TEST(Run, VerifyFilterAndCorruptedConstant) {
  auto r = invoke({"verify", "--only", "4"});
  EXPECT_EQ(r.code, 0) << r.out;
  r = invoke({"verify", "--only", "4", "--a0", "-0.008"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("[FAIL] 4"), std::string::npos);
  r = invoke({"verify", "--only", "pendulum"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[PASS] 10"), std::string::npos);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kConfigError);
  EXPECT_EQ(invoke({"simulate", "--bogus", "1"}).code, kConfigError);
  EXPECT_EQ(invoke({"verify", "--only", "nothing"}).code, kConfigError);
  EXPECT_EQ(invoke({"simulate", "--config", "/nonexistent.json"}).code, kConfigError);
  EXPECT_EQ(invoke({"blowup", "--start", "custom"}).code, kNumericError);  // origin
}

TEST(Run, ConfigFileWithOverride) {
  const auto path = temp_path("cfg.json");
  {
    std::ofstream f(path);
    f << R"({"T_star": 2.0, "start": "spiral"})";
  }
  const auto r = invoke({"spiral", "--config", path, "--T_star", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["T_star"], 3.0);
  std::remove(path.c_str());
}
