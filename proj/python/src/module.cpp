#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "oba/error.hpp"
#include "oba/harness.hpp"
#include "oba/static_oba.hpp"
#include "oba/version.hpp"

namespace py = pybind11;
using namespace oba;

namespace {

using RowsX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using RowsX4 = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

Quaternion quat(const Vec4& xyzw) { return Quaternion::from_coeffs(xyzw); }

RunConfig config_from(const std::string& text, std::optional<std::uint64_t> seed) {
  std::istringstream in(text);
  RunConfig cfg = parse_config(in);
  if (seed) cfg.seed = *seed;
  return cfg;
}

py::dict scenario_dict(const ScenarioData& data) {
  const auto n = static_cast<Eigen::Index>(data.imu.size());
  Eigen::VectorXd time(n);
  RowsX3 gyro(n, 3), accel(n, 3), bias(data.gyro_bias.size(), 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    time[i] = data.imu[i].time;
    gyro.row(i) = data.imu[i].gyro;
    accel.row(i) = data.imu[i].accel;
  }
  for (std::size_t i = 0; i < data.gyro_bias.size(); ++i) bias.row(i) = data.gyro_bias[i];
  RowsX4 attitude(data.truth.size(), 4);
  RowsX3 velocity(data.truth.size(), 3);
  for (std::size_t i = 0; i < data.truth.size(); ++i) {
    attitude.row(i) = data.truth[i].attitude.coeffs();
    velocity.row(i) = data.truth[i].velocity;
  }
  Eigen::VectorXd gnss_time(data.gnss.size());
  RowsX3 gnss_velocity(data.gnss.size(), 3);
  for (std::size_t i = 0; i < data.gnss.size(); ++i) {
    gnss_time[i] = data.gnss[i].time;
    gnss_velocity.row(i) = data.gnss[i].velocity;
  }
  py::dict d;
  d["time"] = time;
  d["gyro"] = gyro;
  d["accel"] = accel;
  d["gyro_bias"] = bias;
  d["attitude"] = attitude;
  d["velocity"] = velocity;
  d["gnss_time"] = gnss_time;
  d["gnss_velocity"] = gnss_velocity;
  return d;
}

py::dict trace_dict(const MethodResult& r) {
  const auto n = static_cast<Eigen::Index>(r.trace.size());
  Eigen::VectorXd time(n);
  RowsX3 estimate(n, 3), error(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TraceRow& row = r.trace[i];
    time[i] = row.time;
    estimate.row(i) << row.estimate.pitch, row.estimate.roll, row.estimate.yaw;
    error.row(i) = row.error;
  }
  py::dict d;
  d["time"] = time;
  d["estimate_deg"] = estimate;
  d["error_arcmin"] = error;
  if (n > 0 && r.trace.front().bias) {
    RowsX3 bias(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) bias.row(i) = r.trace[i].bias.value_or(Vec3::Constant(NAN));
    d["bias_deg_h"] = bias;
  }
  d["runtime_s"] = r.run.runtime_seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimization-based in-motion alignment";
  m.attr("__version__") = std::string(kVersion);

  auto base = py::register_exception<Error>(m, "AlignmentError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<RankDeficiency>(m, "RankDeficiency", base.ptr());
  py::register_exception<InvalidRotation>(m, "InvalidRotation", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<AmbiguousAverage>(m, "AmbiguousAverage", base.ptr());
  py::register_exception<DegeneratePair>(m, "DegeneratePair", base.ptr());

  // Quaternions are [x, y, z, w] arrays.
  m.def("quat_multiply", [](const Vec4& a, const Vec4& b) { return (quat(a) * quat(b)).coeffs(); });
  m.def("dcm_from_quat", [](const Vec4& q) { return dcm_from_quat(quat(q)); });
  m.def("quat_from_dcm", [](const Mat3& c) { return quat_from_dcm(c).coeffs(); });
  m.def("quat_from_euler", [](double pitch, double roll, double yaw) {
    return quat_from_euler({pitch, roll, yaw}).coeffs();
  }, py::arg("pitch"), py::arg("roll"), py::arg("yaw"), "Radians; returns [x, y, z, w].");
  m.def("euler_from_quat", [](const Vec4& q) {
    const EulerAngles e = euler_from_quat(quat(q));
    return Vec3(e.pitch, e.roll, e.yaw);
  }, "Returns [pitch, roll, yaw] in radians.");
  m.def("angle_between", [](const Vec4& a, const Vec4& b) { return angle_between(quat(a), quat(b)); });
  m.def(
      "quat_average",
      [](const RowsX4& quats, const Eigen::VectorXd& weights) {
        if (weights.size() != quats.rows()) throw std::invalid_argument("one weight per quaternion");
        std::vector<Quaternion> qs;
        for (Eigen::Index i = 0; i < quats.rows(); ++i) qs.push_back(quat(quats.row(i).transpose()));
        std::vector<double> w(weights.data(), weights.data() + weights.size());
        return quat_average(qs, w).coeffs();
      },
      py::arg("quats"), py::arg("weights"));
  m.def(
      "grp_from_error_quat", [](const Vec4& dq, double a, double f) { return grp_from_error_quat(quat(dq), {a, f}); },
      py::arg("dq"), py::arg("a") = 1.0, py::arg("f") = 4.0);
  m.def(
      "error_quat_from_grp",
      [](const Vec3& dp, double a, double f) { return error_quat_from_grp(dp, {a, f}).coeffs(); }, py::arg("dp"),
      py::arg("a") = 1.0, py::arg("f") = 4.0);

  m.def(
      "wahba_solve",
      [](const RowsX3& alpha, const RowsX3& beta, std::optional<Eigen::VectorXd> weights, bool normalize) {
        if (alpha.rows() != beta.rows()) throw std::invalid_argument("alpha and beta need the same number of rows");
        if (weights && weights->size() != alpha.rows()) throw std::invalid_argument("one weight per pair");
        AccumulatorOptions opt;
        opt.normalize = normalize;
        opt.median_gate = 0.0;
        DavenportAccumulator acc(opt);
        for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
          acc.accumulate(alpha.row(i).transpose(), beta.row(i).transpose(), weights ? (*weights)[i] : 1.0);
        }
        const StaticAlignment s = solve(acc);
        py::dict d;
        d["quat"] = s.attitude.coeffs();
        d["eigenvalue"] = s.eigenvalue;
        d["gap"] = s.gap;
        return d;
      },
      py::arg("alpha"), py::arg("beta"), py::arg("weights") = py::none(), py::arg("normalize") = true,
      "Attitude C with C alpha = beta in the least-squares sense (Davenport q-method).");

  m.def(
      "echo_config", [](const std::string& text) { return echo_config(config_from(text, std::nullopt)); },
      py::arg("config") = "", "Effective configuration as 'section.key = value' lines.");
  m.def(
      "simulate",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        const RunConfig cfg = config_from(text, seed);
        ScenarioData data;
        {
          py::gil_scoped_release release;
          data = build_scenario(cfg);
        }
        return scenario_dict(data);
      },
      py::arg("config") = "", py::arg("seed") = py::none(), "Synthesized IMU, GNSS and truth streams.");
  m.def(
      "run",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out) {
        const RunConfig cfg = config_from(text, seed);
        Comparison cmp;
        {
          py::gil_scoped_release release;
          cmp = run_comparison(cfg);
          if (out) emit_outputs(cmp, cfg, *out);
        }
        py::dict traces, failures;
        for (const MethodResult& r : cmp.results) {
          const std::string name(method_name(r.method));
          if (r.failure) {
            failures[name.c_str()] = *r.failure;
          } else {
            traces[name.c_str()] = trace_dict(r);
          }
        }
        py::list summary;
        for (const SummaryRow& s : cmp.summary) {
          py::dict row;
          row["method"] = std::string(method_name(s.method));
          row["error_arcmin"] = s.error;
          row["converged"] = s.converged;
          row["bias_error_deg_h"] = s.bias_error ? py::cast(*s.bias_error) : py::none();
          summary.append(row);
        }
        py::dict d;
        d["summary"] = summary;
        d["traces"] = traces;
        d["failures"] = failures;
        return d;
      },
      py::arg("config") = "", py::arg("seed") = py::none(), py::arg("out") = py::none(),
      "Runs every configured method on one scenario; writes the CSV outputs when `out` is given.");
}
