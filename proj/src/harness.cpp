#include "oba/harness.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "oba/error.hpp"
#include "oba/observation.hpp"
#include "oba/static_oba.hpp"
#include "oba/version.hpp"

namespace oba {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

bool is_numerical(const std::exception& e) {
  return dynamic_cast<const NumericalFailure*>(&e) || dynamic_cast<const RankDeficiency*>(&e) ||
         dynamic_cast<const AmbiguousAverage*>(&e) || dynamic_cast<const SingularityError*>(&e);
}

}  // namespace

SensorSpec applied_sensor_spec(const RunConfig& cfg) {
  SensorSpec spec = cfg.sensors;
  if (cfg.bias_mode == BiasMode::kRandomSign) {
    std::mt19937_64 rng(cfg.seed ^ 0x5bd1e9955bd1e995ULL);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 3; ++i) {
      if (coin(rng)) spec.gyro_bias[i] = -spec.gyro_bias[i];
    }
    for (int i = 0; i < 3; ++i) {
      if (coin(rng)) spec.accel_bias[i] = -spec.accel_bias[i];
    }
  }
  return spec;
}

ScenarioData build_scenario(const RunConfig& cfg) {
  ScenarioData data;
  if (cfg.logs) {
    data.imu = read_imu_csv(cfg.logs->imu);
    data.gnss = read_gnss_csv(cfg.logs->gnss);
    if (!cfg.logs->truth.empty()) data.truth = read_truth_csv(cfg.logs->truth);
    data.applied = cfg.sensors;
    return data;
  }
  data.applied = applied_sensor_spec(cfg);
  data.truth = simulate_trajectory(cfg.trajectory, cfg.duration, cfg.sensors.sample_rate);
  data.imu = synthesize_imu(data.truth, data.applied, cfg.seed, &data.gyro_bias);
  data.gnss = synthesize_gnss(data.truth, cfg.gnss, cfg.seed);
  return data;
}

DynamicOptions dynamic_options(const RunConfig& cfg, Method method) {
  DynamicOptions opt;
  opt.mode = method == Method::kFilterFull ? DynamicMode::kFull : DynamicMode::kPartial;
  opt.window = cfg.window;
  opt.ukf = cfg.ukf;
  opt.init = cfg.init;
  opt.noise = NoiseConfig::from_sensor(cfg.sensors, cfg.update_interval);
  if (cfg.r_white) opt.noise.r_white = *cfg.r_white;
  if (cfg.r_bias) opt.noise.r_bias = *cfg.r_bias;
  if (cfg.r_gyro) opt.noise.r_gyro = *cfg.r_gyro;
  return opt;
}

Vec3 euler_error(const Quaternion& estimate, const Quaternion& truth) {
  const EulerAngles e = euler_from_quat(estimate);
  const EulerAngles t = euler_from_quat(truth);
  return {e.pitch - t.pitch, wrap_pi(e.roll - t.roll), wrap_pi(e.yaw - t.yaw)};
}

std::vector<TraceRow> score_run(const AlignmentRun& run, const ScenarioData& data) {
  std::vector<TraceRow> rows;
  rows.reserve(run.estimates.size());
  const double rate = data.imu.size() > 1 ? 1.0 / (data.imu[1].time - data.imu[0].time) : 1.0;
  for (const EpochEstimate& est : run.estimates) {
    TraceRow row;
    row.time = est.time;
    const EulerAngles e = euler_from_quat(est.attitude);
    row.estimate = {e.pitch / kDeg, e.roll / kDeg, e.yaw / kDeg};
    row.error = Vec3::Constant(kNaN);
    row.yaw_error_raw = kNaN;

    auto it = std::lower_bound(data.truth.begin(), data.truth.end(), est.time - 1e-6,
                               [](const NavTruthState& s, double t) { return s.time < t; });
    if (it != data.truth.end() && std::abs(it->time - est.time) <= 1e-6) {
      row.error = euler_error(est.attitude, it->attitude) / kArcmin;
      row.yaw_error_raw = (e.yaw - euler_from_quat(it->attitude).yaw) / kArcmin;
    }
    if (est.bias) {
      row.bias = *est.bias / kDegPerHour;
      if (!data.gyro_bias.empty() && !data.imu.empty()) {
        const auto k = static_cast<std::size_t>(std::llround((est.time - data.imu.front().time) * rate));
        if (k < data.gyro_bias.size()) row.bias_error = (*est.bias - data.gyro_bias[k]) / kDegPerHour;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

SummaryRow summarize(Method method, const std::vector<TraceRow>& trace) {
  SummaryRow s;
  s.method = method;
  s.rows = trace.size();
  if (trace.empty()) {
    s.error = Vec3::Constant(kNaN);
    s.yaw_error_raw = kNaN;
    s.converged = false;
    return s;
  }
  const std::size_t tail = std::max<std::size_t>(1, (trace.size() + 9) / 10);
  Vec3 err = Vec3::Zero();
  double raw = 0.0;
  Vec3 bias = Vec3::Zero();
  bool have_bias = true;
  for (std::size_t i = trace.size() - tail; i < trace.size(); ++i) {
    err += trace[i].error;
    raw += trace[i].yaw_error_raw;
    if (trace[i].bias_error) {
      bias += *trace[i].bias_error;
    } else {
      have_bias = false;
    }
  }
  const double n = static_cast<double>(tail);
  s.error = err / n;
  s.yaw_error_raw = raw / n;
  if (have_bias) s.bias_error = bias / n;
  s.converged = std::abs(s.error.z()) <= 90.0 * 60.0;
  return s;
}

Comparison run_method_set(const RunConfig& cfg, const ScenarioData& data) {
  const std::vector<EpochInput> epochs = make_epochs(data.imu, data.gnss, cfg.update_interval);
  Comparison cmp;
  for (Method method : cfg.methods) {
    MethodResult r;
    r.method = method;
    try {
      if (method == Method::kQFull || method == Method::kQPartial) {
        StaticOptions opt;
        opt.mode = method == Method::kQFull ? StaticMode::kFull : StaticMode::kPartial;
        opt.window = cfg.window;
        opt.accumulator = cfg.accumulator;
        r.run = run_static_alignment(epochs, opt);
      } else {
        r.run = run_dynamic_alignment(epochs, dynamic_options(cfg, method));
      }
      r.trace = score_run(r.run, data);
      cmp.summary.push_back(summarize(method, r.trace));
    } catch (const Error& e) {
      r.failure = e.what();
      r.numerical_failure = is_numerical(e);
    }
    cmp.results.push_back(std::move(r));
  }
  return cmp;
}

Comparison run_comparison(const RunConfig& cfg) { return run_method_set(cfg, build_scenario(cfg)); }

void check_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw DataError("output directory " + dir.string() + " cannot be created");
  }
  const auto probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw DataError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace, bool with_bias) {
  std::ofstream out = open_for_write(path);
  out << "# time s; est_* deg; err_* arcmin (estimate minus truth, roll/yaw wrapped to (-180,180] deg)";
  if (with_bias) out << "; bias_* deg/h";
  out << '\n' << "time,est_pitch,est_roll,est_yaw,err_pitch,err_roll,err_yaw";
  if (with_bias) out << ",bias_x,bias_y,bias_z";
  out << '\n';
  for (const TraceRow& r : trace) {
    out << fmt(r.time) << ',' << fmt(r.estimate.pitch) << ',' << fmt(r.estimate.roll) << ',' << fmt(r.estimate.yaw)
        << ',' << fmt(r.error.x()) << ',' << fmt(r.error.y()) << ',' << fmt(r.error.z());
    if (with_bias) {
      const Vec3 b = r.bias.value_or(Vec3::Constant(kNaN));
      out << ',' << fmt(b.x()) << ',' << fmt(b.y()) << ',' << fmt(b.z());
    }
    out << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& summary) {
  std::ofstream out = open_for_write(path);
  out << "method,pitch_err_arcmin,roll_err_arcmin,yaw_err_arcmin,yaw_err_raw_arcmin,"
         "bias_err_x_deg_h,bias_err_y_deg_h,bias_err_z_deg_h,converged\n";
  for (const SummaryRow& s : summary) {
    out << method_name(s.method) << ',' << fmt(s.error.x()) << ',' << fmt(s.error.y()) << ',' << fmt(s.error.z())
        << ',' << fmt(s.yaw_error_raw);
    if (s.bias_error) {
      out << ',' << fmt(s.bias_error->x()) << ',' << fmt(s.bias_error->y()) << ',' << fmt(s.bias_error->z());
    } else {
      out << ",,,";
    }
    out << ',' << (s.converged ? "yes" : "no") << '\n';
  }
}

void emit_outputs(const Comparison& cmp, const RunConfig& cfg, const std::filesystem::path& dir) {
  check_output_dir(dir);
  for (const MethodResult& r : cmp.results) {
    if (r.failure) continue;
    const bool with_bias = r.method == Method::kFilterFull || r.method == Method::kFilterPartial;
    write_trace_csv(dir / (std::string(method_name(r.method)) + ".csv"), r.trace, with_bias);
  }
  write_summary_csv(dir / "summary.csv", cmp.summary);

  std::ofstream manifest = open_for_write(dir / "manifest.txt");
  manifest << "oba_version = " << kVersion << '\n'
           << "eigen_version = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION
           << '\n'
           << "boost_version = " << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.'
           << BOOST_VERSION % 100 << '\n'
#if defined(__VERSION__)
           << "compiler = " << __VERSION__ << '\n'
#endif
           << "seed = " << cfg.seed << '\n'
           << "source = " << (cfg.logs ? "logs" : "simulation") << '\n'
           << echo_config(cfg);
  for (const MethodResult& r : cmp.results) {
    manifest << "status." << method_name(r.method) << " = "
             << (r.failure ? "failed: " + *r.failure : std::string("ok")) << '\n';
  }
  for (const std::string& w : cfg.warnings) manifest << "warning = " << w << '\n';

  std::ofstream timing = open_for_write(dir / "timing.csv");
  timing << "method,runtime_s\n";
  for (const MethodResult& r : cmp.results) {
    if (!r.failure) timing << method_name(r.method) << ',' << fmt(r.run.runtime_seconds) << '\n';
  }
}

}  // namespace oba
