#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oba/error.hpp"
#include "oba/harness.hpp"

using namespace oba;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("oba_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

TraceRow row(double t, double yaw_arcmin) {
  TraceRow r;
  r.time = t;
  r.error = Vec3(1.0, 2.0, yaw_arcmin);
  r.yaw_error_raw = yaw_arcmin;
  return r;
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig cfg = parse("");
  EXPECT_EQ(cfg.methods.size(), 4u);
  EXPECT_EQ(cfg.window, 100u);
  EXPECT_DOUBLE_EQ(cfg.duration, 100.0);
  EXPECT_EQ(cfg.grade, "navigation");
  EXPECT_TRUE(cfg.warnings.empty());
  EXPECT_NE(echo_config(cfg).find("methods.window = 100"), std::string::npos);
}

TEST(Config, ParsesSections) {
  const RunConfig cfg = parse(
      "[scenario]\nprofile = circle\nduration = 250\nseed = 9\n"
      "[sensors]\ngrade = low\nbias_mode = random_sign\n"
      "[methods]\nrun = filter-partial, q-full\nwindow = 50\n"
      "[filter]\nkappa = -2\n");
  EXPECT_DOUBLE_EQ(cfg.duration, 250.0);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.grade, "low");
  EXPECT_EQ(cfg.bias_mode, BiasMode::kRandomSign);
  ASSERT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.methods[0], Method::kFilterPartial);
  EXPECT_EQ(cfg.window, 50u);
  EXPECT_DOUBLE_EQ(cfg.ukf.kappa, -2.0);
}

TEST(Config, DuplicateMethodWarns) {
  const RunConfig cfg = parse("[methods]\nrun = q-full, q-full, filter-full\n");
  EXPECT_EQ(cfg.methods.size(), 2u);
  ASSERT_EQ(cfg.warnings.size(), 1u);
  EXPECT_NE(cfg.warnings[0].find("q-full"), std::string::npos);
}

TEST(Config, ErrorsNameTheKey) {
  const auto key_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(key_of("[methods]\nwindow = 0\n"), "methods.window");
  EXPECT_EQ(key_of("[scenario]\nradius_m = 5\n"), "scenario.radius_m");
  EXPECT_EQ(key_of("[bogus]\nx = 1\n"), "bogus");
  EXPECT_EQ(key_of("[methods]\nrun = q-whole\n"), "methods.run");
  EXPECT_EQ(key_of("[sensors]\ngrade = tactical\n"), "sensors.grade");
  EXPECT_EQ(key_of("[scenario]\nduration = soon\n"), "scenario.duration");
  EXPECT_EQ(key_of("[filter]\nkappa = -6\n"), "filter.kappa");
  EXPECT_THROW(load_config("/nonexistent/oba.ini"), ConfigError);
}

TEST(Summary, FinalTenPercent) {
  std::vector<TraceRow> trace;
  for (int i = 0; i < 100; ++i) trace.push_back(row(i + 1.0, i < 90 ? 1000.0 : 6.0));
  const SummaryRow s = summarize(Method::kQFull, trace);
  EXPECT_EQ(s.rows, 100u);
  EXPECT_DOUBLE_EQ(s.error.z(), 6.0);
  EXPECT_DOUBLE_EQ(s.error.x(), 1.0);
  EXPECT_TRUE(s.converged);
  EXPECT_FALSE(s.bias_error.has_value());

  const SummaryRow one = summarize(Method::kQFull, {row(1.0, 95.0 * 60.0)});
  EXPECT_DOUBLE_EQ(one.error.z(), 95.0 * 60.0);
  EXPECT_FALSE(one.converged);

  const SummaryRow none = summarize(Method::kQFull, {});
  EXPECT_FALSE(none.converged);
  EXPECT_EQ(none.rows, 0u);
}

TEST(Summary, EulerErrorWrapsYaw) {
  const Quaternion a = quat_from_euler({0.0, 0.0, 179.0 * kDeg});
  const Quaternion b = quat_from_euler({0.0, 0.0, -179.0 * kDeg});
  EXPECT_NEAR(euler_error(a, b).z(), -2.0 * kDeg, 1e-12);
  EXPECT_NEAR(euler_error(b, a).z(), 2.0 * kDeg, 1e-12);
}

TEST(Summary, EmptyFileHasHeader) {
  const fs::path dir = scratch("empty");
  fs::create_directories(dir);
  write_summary_csv(dir / "summary.csv", {});
  EXPECT_EQ(slurp(dir / "summary.csv").rfind("method,", 0), 0u);
}

TEST(Outputs, TracesSummaryAndManifest) {
  RunConfig cfg = parse("[scenario]\nduration = 30\n");
  const Comparison cmp = run_comparison(cfg);
  ASSERT_EQ(cmp.results.size(), 4u);
  ASSERT_EQ(cmp.summary.size(), 4u);
  const fs::path dir = scratch("outputs");
  emit_outputs(cmp, cfg, dir);
  for (const char* name : {"q-full", "q-partial", "filter-full", "filter-partial"}) {
    const std::string text = slurp(dir / (std::string(name) + ".csv"));
    EXPECT_EQ(text.rfind("#", 0), 0u) << name;
    EXPECT_NE(text.find("time,est_pitch"), std::string::npos);
  }
  const std::string summary = slurp(dir / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(dir / "manifest.txt"));
  EXPECT_TRUE(fs::exists(dir / "timing.csv"));
  // The filter traces carry bias columns, the static ones do not.
  EXPECT_NE(slurp(dir / "filter-full.csv").find("bias_x"), std::string::npos);
  EXPECT_EQ(slurp(dir / "q-full.csv").find("bias_x"), std::string::npos);
}

TEST(Outputs, DeterministicForSeed) {
  RunConfig cfg = parse("[scenario]\nduration = 20\nseed = 5\n[sensors]\ngrade = low\nbias_mode = random_sign\n");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  emit_outputs(run_comparison(cfg), cfg, a);
  emit_outputs(run_comparison(cfg), cfg, b);
  for (const char* name : {"q-full.csv", "q-partial.csv", "filter-full.csv", "filter-partial.csv", "summary.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  cfg.seed = 6;
  const fs::path c = scratch("det_c");
  emit_outputs(run_comparison(cfg), cfg, c);
  EXPECT_NE(slurp(a / "q-full.csv"), slurp(c / "q-full.csv"));
}

TEST(Outputs, UnwritableDirectory) {
  const fs::path file = scratch("file");
  fs::create_directories(file.parent_path());
  std::ofstream(file) << "x";
  EXPECT_THROW(check_output_dir(file / "sub"), DataError);
  fs::remove(file);
}

TEST(Scenario, RandomSignBiasesFollowSeed) {
  RunConfig cfg = parse("[sensors]\ngrade = low\nbias_mode = random_sign\n");
  const SensorSpec a = applied_sensor_spec(cfg);
  EXPECT_EQ(a.gyro_bias.cwiseAbs(), cfg.sensors.gyro_bias.cwiseAbs());
  EXPECT_EQ(applied_sensor_spec(cfg).gyro_bias, a.gyro_bias);
  cfg.bias_mode = BiasMode::kFixed;
  EXPECT_EQ(applied_sensor_spec(cfg).gyro_bias, cfg.sensors.gyro_bias);
}

TEST(Scenario, NavigationGradeOrdering) {
  // With navigation-grade sensors the filter at least matches the full
  // q-method after 100 s.
  RunConfig cfg = parse("[scenario]\nseed = 2\n[methods]\nrun = q-full, filter-full\n");
  const Comparison cmp = run_comparison(cfg);
  ASSERT_EQ(cmp.summary.size(), 2u);
  const auto norm = [](const SummaryRow& s) { return s.error.norm(); };
  EXPECT_LT(norm(cmp.summary[1]), 1.5 * norm(cmp.summary[0]));
  EXPECT_LT(norm(cmp.summary[1]), 5.0);  // arcmin
}
