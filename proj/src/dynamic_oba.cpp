#include "oba/dynamic_oba.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "oba/earth.hpp"
#include "oba/error.hpp"
#include "oba/static_oba.hpp"

namespace oba {

void UkfConfig::validate() const {
  if (!(n + kappa > 0.0)) throw ConfigError("kappa", "n + kappa must be positive");
  if (!(condition_limit > 1.0)) throw ConfigError("condition_limit", "must exceed 1");
}

Mat3 NoiseConfig::measurement_covariance(double t) const {
  if (r_override) return *r_override;
  const double t2 = t * t;
  return (r_white * t + r_bias * t2 + r_gyro * t2 * t2) * Mat3::Identity();
}

NoiseConfig NoiseConfig::from_sensor(const SensorSpec& spec, double dt) {
  NoiseConfig n;
  n.Q.topLeftCorner<3, 3>() = spec.gyro_arw * spec.gyro_arw * dt * Mat3::Identity();
  n.Q.bottomRightCorner<3, 3>() = spec.gyro_rrw * spec.gyro_rrw * dt * Mat3::Identity();
  n.r_white = std::max(spec.accel_vrw * spec.accel_vrw, 1e-10);
  const double ba = spec.accel_bias.cwiseAbs().maxCoeff();
  n.r_bias = ba * ba;
  const double eg = 0.5 * spec.gyro_bias.cwiseAbs().maxCoeff() * wgs84::kGammaEquator;
  n.r_gyro = eg * eg;
  return n;
}

Mat6 symmetric_sqrt(const Mat6& p) {
  if (!p.allFinite()) throw NumericalFailure("covariance is not finite");
  Eigen::SelfAdjointEigenSolver<Mat6> eig(0.5 * (p + p.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalFailure("covariance eigendecomposition failed");
  Vec6 lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-9 * scale) {
    throw NumericalFailure("covariance is not positive semidefinite (min eigenvalue " +
                           std::to_string(lambda.minCoeff()) + ", max " + std::to_string(lambda.maxCoeff()) + ")");
  }
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

SigmaSet make_sigma_points(const Vec6& mean, const Mat6& cov, const UkfConfig& cfg) {
  cfg.validate();
  constexpr int n = UkfConfig::n;
  const double spread = n + cfg.kappa;
  const Mat6 s = symmetric_sqrt(spread * cov);
  SigmaSet set;
  set.points.reserve(2 * n + 1);
  set.weights.reserve(2 * n + 1);
  if (cfg.weights == SigmaWeights::kStandard) {
    set.points.push_back(mean);
    set.weights.push_back(cfg.kappa / spread);
  }
  const double w = cfg.weights == SigmaWeights::kStandard ? 0.5 / spread : 0.5 / n;
  for (int i = 0; i < n; ++i) {
    set.points.push_back(mean + s.col(i));
    set.weights.push_back(w);
    set.points.push_back(mean - s.col(i));
    set.weights.push_back(w);
  }
  return set;
}

namespace {

Mat6 symmetrized(const Mat6& p) { return 0.5 * (p + p.transpose()); }

// Second moments are taken about the transformed center point when its
// weight is negative, which keeps them positive semidefinite.
template <class V>
V moment_center(const std::vector<V>& values, const V& mean, const std::vector<double>& weights) {
  return weights.front() < 0.0 ? values.front() : mean;
}

Quaternion nav_rotation(const EpochInput& epoch) {
  Quaternion q;
  for (std::size_t j = 0; j + 1 < epoch.nav.size(); ++j) {
    const double h = epoch.imu[j + 1].time - epoch.imu[j].time;
    q = q * rotation_vector_from_rates(epoch.nav[j].nav_rate(), epoch.nav[j + 1].nav_rate(), h).to_quaternion();
  }
  return q;
}

Quaternion body_rotation(const EpochInput& epoch, const Vec3& bias) {
  Quaternion q;
  for (std::size_t j = 0; j + 1 < epoch.imu.size(); ++j) {
    const double h = epoch.imu[j + 1].time - epoch.imu[j].time;
    q = q * rotation_vector_from_rates(epoch.imu[j].gyro - bias, epoch.imu[j + 1].gyro - bias, h).to_quaternion();
  }
  return q;
}

}  // namespace

FilterState time_update(const FilterState& state, const EpochInput& epoch, const UkfConfig& cfg,
                        const NoiseConfig& noise) {
  if (epoch.imu.size() < 2 || epoch.nav.size() != epoch.imu.size()) {
    throw DataError("epoch needs matching IMU and navigation samples");
  }
  const SigmaSet sigma = make_sigma_points(state.x, state.P, cfg);
  const Quaternion dn_conj = nav_rotation(epoch).conjugate();
  const Quaternion reference = dn_conj * state.q * body_rotation(epoch, state.bias());

  const std::size_t count = sigma.points.size();
  std::vector<Quaternion> chi(count);
  std::vector<double> avg_weights(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec6& pt = sigma.points[i];
    const Quaternion start = error_quat_from_grp(pt.head<3>(), cfg.grp) * state.q;
    chi[i] = dn_conj * start * body_rotation(epoch, pt.tail<3>());
    if (chi[i].dot(reference) < 0.0) chi[i] = -chi[i];
    avg_weights[i] = std::max(sigma.weights[i], 0.0);
  }
  Quaternion mean_q = quat_average(chi, avg_weights);
  if (mean_q.dot(reference) < 0.0) mean_q = -mean_q;

  std::vector<Vec6> err(count);
  Vec6 mean = Vec6::Zero();
  const Quaternion inv = mean_q.conjugate();
  for (std::size_t i = 0; i < count; ++i) {
    Quaternion dq = chi[i] * inv;
    if (dq.w() < 0.0) dq = -dq;
    err[i].head<3>() = grp_from_error_quat(dq, cfg.grp);
    err[i].tail<3>() = sigma.points[i].tail<3>();
    mean += sigma.weights[i] * err[i];
  }
  const Vec6 about = moment_center(err, mean, sigma.weights);
  Mat6 cov = noise.Q;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec6 d = err[i] - about;
    cov += sigma.weights[i] * d * d.transpose();
  }

  FilterState out;
  out.x = mean;
  out.P = symmetrized(cov);
  out.q = mean_q;
  out.epoch = state.epoch + 1;
  return out;
}

UpdateResult measurement_update(const FilterState& predicted, const ObservationPair& pair, const UkfConfig& cfg,
                                const NoiseConfig& noise) {
  if (pair.kind != PairKind::kDynamic) throw std::invalid_argument("measurement update needs a dynamic pair");
  const SigmaSet sigma = make_sigma_points(predicted.x, predicted.P, cfg);
  const std::size_t count = sigma.points.size();

  std::vector<Vec3> y(count);
  Vec3 y_mean = Vec3::Zero();
  Vec6 x_mean = Vec6::Zero();
  for (std::size_t i = 0; i < count; ++i) {
    const Quaternion q = error_quat_from_grp(sigma.points[i].head<3>(), cfg.grp) * predicted.q;
    const Vec3 alpha =
        cfg.bias_corrected_pairs ? Vec3(pair.alpha + pair.bias_jacobian * sigma.points[i].tail<3>()) : pair.alpha;
    y[i] = q.rotate(alpha);
    y_mean += sigma.weights[i] * y[i];
    x_mean += sigma.weights[i] * sigma.points[i];
  }
  const Vec3 y_about = moment_center(y, y_mean, sigma.weights);
  const Vec6 x_about = moment_center(sigma.points, x_mean, sigma.weights);
  Mat3 py = noise.measurement_covariance(pair.window_seconds);
  Eigen::Matrix<double, 6, 3> pxy = Eigen::Matrix<double, 6, 3>::Zero();
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 dy = y[i] - y_about;
    py += sigma.weights[i] * dy * dy.transpose();
    pxy += sigma.weights[i] * (sigma.points[i] - x_about) * dy.transpose();
  }
  py = 0.5 * (py + py.transpose());

  UpdateResult result;
  result.state = predicted;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(py, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()[0];
  const double hi = eig.eigenvalues()[2];
  result.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!py.allFinite() || !(result.condition <= cfg.condition_limit)) {
    result.applied = false;
    return result;
  }
  const Eigen::LDLT<Mat3> ldlt(py);
  const Eigen::Matrix<double, 6, 3> gain = ldlt.solve(pxy.transpose()).transpose();
  result.state.x = predicted.x + gain * (pair.beta - y_mean);
  result.state.P = symmetrized(predicted.P - gain * py * gain.transpose());
  return result;
}

FilterState fold_and_reset(const FilterState& posterior, const UkfConfig& cfg) {
  FilterState out = posterior;
  out.q = error_quat_from_grp(posterior.grp(), cfg.grp) * posterior.q;
  out.x.head<3>().setZero();
  return out;
}

AlignmentRun run_dynamic_alignment(std::span<const EpochInput> epochs, const DynamicOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  options.ukf.validate();
  if (options.window == 0) throw ConfigError("window", "must be at least 1");
  const bool partial = options.mode == DynamicMode::kPartial;

  AlignmentRun run;
  run.method = partial ? Method::kFilterPartial : Method::kFilterFull;
  ChainState chains(partial ? options.window : 1);

  FilterState state;
  state.P.setZero();
  const double sa = options.init.attitude_sigma;
  const double sb = options.init.bias_sigma;
  // GRP with f = 2(a + 1) is close to the rotation angle for small errors.
  const double grp_scale = options.ukf.grp.f() / (options.ukf.grp.a() + 1.0);
  state.P.topLeftCorner<3, 3>() = std::pow(grp_scale * std::tan(0.5 * sa), 2) * Mat3::Identity();
  state.P.bottomRightCorner<3, 3>() = sb * sb * Mat3::Identity();

  bool running = options.init.attitude.has_value();
  if (running) state.q = *options.init.attitude;
  DavenportAccumulator coarse;

  for (const EpochInput& epoch : epochs) {
    if (running) state = time_update(state, epoch, options.ukf, options.noise);
    chains.advance(epoch);

    if (!running) {
      // The coarse solve uses the method's own integration procedure.
      try {
        coarse.accumulate(partial ? build_partial_pair(chains, window_start(chains, options.window))
                                  : build_full_pair(chains));
      } catch (const DegeneratePair&) {
        ++run.skipped_pairs;
      }
      if (chains.epochs() < std::max<std::size_t>(options.init.coarse_epochs, 1)) continue;
      try {
        state.q = reconstruct_attitude(solve(coarse).attitude, chains);
      } catch (const RankDeficiency&) {
        continue;
      }
      running = true;
    } else {
      const std::size_t m = partial ? window_start(chains, options.window) : 0;
      const UpdateResult r = measurement_update(state, build_dynamic_pair(chains, m), options.ukf, options.noise);
      if (!r.applied) ++run.skipped_updates;
      state = fold_and_reset(r.state, options.ukf);
    }

    EpochEstimate e;
    e.time = chains.time();
    e.attitude = state.q;
    e.bias = state.bias();
    e.covariance_trace = state.P.trace();
    run.estimates.push_back(e);
  }
  run.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return run;
}

}  // namespace oba
