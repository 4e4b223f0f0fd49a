#pragma once

// Comparison harness: configuration, scenario synthesis, scoring against
// truth, and CSV/manifest emission.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oba/alignment.hpp"
#include "oba/dynamic_oba.hpp"
#include "oba/sensors.hpp"
#include "oba/static_oba.hpp"
#include "oba/trajectory.hpp"

namespace oba {

enum class BiasMode {
  kFixed,       // preset bias on every axis with a positive sign
  kRandomSign,  // preset magnitude, sign drawn per axis from the seed
};

struct LogInputs {
  std::filesystem::path imu;
  std::filesystem::path gnss;
  std::filesystem::path truth;  // optional; errors are NaN without it
};

struct RunConfig {
  TrajectorySpec trajectory;
  double duration = 100.0;  // s
  std::uint64_t seed = 1;

  std::string grade = "navigation";
  SensorSpec sensors = sensor_preset(SensorGrade::kNavigation);
  BiasMode bias_mode = BiasMode::kFixed;
  GnssSpec gnss;

  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::size_t window = 100;  // IMU samples
  double update_interval = 1.0;  // s
  AccumulatorOptions accumulator;

  UkfConfig ukf;
  DynamicInit init;
  // Overrides of the sensor-derived measurement noise terms.
  std::optional<double> r_white, r_bias, r_gyro;

  std::filesystem::path output_dir = "out";
  std::optional<LogInputs> logs;

  std::vector<std::string> warnings;  // filled by the loader
};

/// "ideal", "navigation" or "low".
std::optional<SensorGrade> parse_grade(std::string_view name);

/// INI-style "key = value" text with [section] headers; '#' and ';' start
/// comments. Throws ConfigError naming the offending key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical "section.key = value" listing of the effective configuration.
std::string echo_config(const RunConfig& cfg);

/// Synthesized (or loaded) streams shared by every method of a comparison.
struct ScenarioData {
  std::vector<NavTruthState> truth;
  std::vector<ImuSample> imu;
  std::vector<GnssSample> gnss;
  std::vector<Vec3> gyro_bias;  // true bias at each IMU sample (empty for logs)
  SensorSpec applied;           // sensor model after bias signs were drawn
};

ScenarioData build_scenario(const RunConfig& cfg);

/// Sensor model with the configured bias signs applied.
SensorSpec applied_sensor_spec(const RunConfig& cfg);

DynamicOptions dynamic_options(const RunConfig& cfg, Method method);

/// Per-epoch row of a method trace. Angles in degrees, errors in arcmin,
/// biases in deg/h.
struct TraceRow {
  double time = 0.0;
  EulerAngles estimate;  // degrees
  Vec3 error = Vec3::Zero();       // pitch, roll, yaw; arcmin, yaw wrapped to (-180, 180] deg
  double yaw_error_raw = 0.0;      // arcmin, unwrapped difference
  std::optional<Vec3> bias;        // deg/h
  std::optional<Vec3> bias_error;  // deg/h
};

/// Attitude error of an estimate against truth, per Euler axis in radians
/// (pitch, roll, yaw) with roll and yaw wrapped to (-pi, pi].
Vec3 euler_error(const Quaternion& estimate, const Quaternion& truth);

std::vector<TraceRow> score_run(const AlignmentRun& run, const ScenarioData& data);

struct SummaryRow {
  Method method = Method::kQFull;
  Vec3 error = Vec3::Zero();  // steady-state mean, arcmin
  double yaw_error_raw = 0.0;
  std::optional<Vec3> bias_error;  // steady-state mean, deg/h
  bool converged = true;           // |yaw| <= 90 deg
  std::size_t rows = 0;
};

/// Mean over the final 10% of rows (at least one row).
SummaryRow summarize(Method method, const std::vector<TraceRow>& trace);

struct MethodResult {
  Method method = Method::kQFull;
  AlignmentRun run;
  std::vector<TraceRow> trace;
  std::optional<std::string> failure;
  bool numerical_failure = false;
};

struct Comparison {
  std::vector<MethodResult> results;
  std::vector<SummaryRow> summary;  // succeeded methods only
};

Comparison run_method_set(const RunConfig& cfg, const ScenarioData& data);
Comparison run_comparison(const RunConfig& cfg);

/// Throws DataError when `dir` cannot be created or written.
void check_output_dir(const std::filesystem::path& dir);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace, bool with_bias);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& summary);

/// Writes <method>.csv traces, summary.csv, manifest.txt and timing.csv.
void emit_outputs(const Comparison& cmp, const RunConfig& cfg, const std::filesystem::path& dir);

}  // namespace oba
