#pragma once

// Shared fixtures for the test binaries: random rotations, an SVD Wahba
// solver used as an independent oracle, and small scenario builders.

#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "oba/attitude.hpp"
#include "oba/observation.hpp"
#include "oba/sensors.hpp"
#include "oba/trajectory.hpp"

namespace oba_test {

using oba::Mat3;
using oba::Quaternion;
using oba::Vec3;

inline Vec3 random_vec(std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  return {n(rng), n(rng), n(rng)};
}

inline Vec3 random_unit(std::mt19937_64& rng) { return random_vec(rng).normalized(); }

/// Uniformly distributed rotation.
inline Quaternion random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Quaternion::from_coeffs(oba::Vec4(n(rng), n(rng), n(rng), n(rng)));
}

/// Angle of a^T b, robust near zero.
inline double rotation_angle(const Mat3& a, const Mat3& b) {
  const Mat3 d = a.transpose() * b;
  const Vec3 s(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
  return std::atan2(0.5 * s.norm(), 0.5 * (d.trace() - 1.0));
}

/// Rotation maximizing tr(R^T B) via the SVD of B (Markley's method).
inline Mat3 svd_wahba(const Mat3& b) {
  Eigen::JacobiSVD<Mat3> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  const double d = u.determinant() * v.determinant();
  return u * Eigen::Vector3d(1.0, 1.0, d).asDiagonal() * v.transpose();
}

struct Scenario {
  std::vector<oba::NavTruthState> truth;
  std::vector<oba::ImuSample> imu;
  std::vector<oba::GnssSample> gnss;
  std::vector<Vec3> bias;
  std::vector<oba::EpochInput> epochs;
};

inline oba::TrajectorySpec circle(double radius = 800.0, double speed = 15.0, double amplitude = 12.0,
                                  double yaw_deg = 30.0) {
  oba::TrajectorySpec spec;
  oba::profile::Circle c;
  c.radius = radius;
  c.speed = speed;
  c.speed_amplitude = amplitude;
  spec.motion = c;
  spec.initial_attitude.yaw = yaw_deg * oba::kDeg;
  return spec;
}

inline Scenario simulate(const oba::TrajectorySpec& spec, const oba::SensorSpec& sensors, double duration,
                         std::uint64_t seed = 1, const oba::GnssSpec& gnss = {}) {
  Scenario s;
  s.truth = oba::simulate_trajectory(spec, duration, sensors.sample_rate);
  s.imu = oba::synthesize_imu(s.truth, sensors, seed, &s.bias);
  s.gnss = oba::synthesize_gnss(s.truth, gnss, seed);
  s.epochs = oba::make_epochs(s.imu, s.gnss, 1.0);
  return s;
}

inline constexpr double kStep = 0.01;

// Epoch of n sample intervals built from callables, with nav terms that can
// exclude the earth entirely.
inline oba::EpochInput make_epoch(double t0, int n, const std::function<oba::ImuSample(double)>& imu,
                                  const std::function<oba::NavTerms(double)>& nav) {
  oba::EpochInput e;
  e.t_start = t0;
  e.t_end = t0 + n * kStep;
  for (int k = 0; k <= n; ++k) {
    const double t = t0 + k * kStep;
    e.imu.push_back(imu(t));
    e.nav.push_back(nav(t));
  }
  return e;
}

inline oba::NavTerms flat_nav(double gamma) {
  oba::NavTerms n;
  n.gravity = Vec3(0, 0, -gamma);
  return n;
}

// Random smooth-ish epoch with every nav term populated.
inline oba::EpochInput random_epoch(std::mt19937_64& rng, double t0) {
  const Vec3 w0 = random_vec(rng, 0.3), w1 = random_vec(rng, 0.3);
  const Vec3 f0 = random_vec(rng, 3.0) + Vec3(0, 0, 9.8), f1 = random_vec(rng, 3.0);
  const Vec3 v0 = random_vec(rng, 10.0), v1 = random_vec(rng, 1.0);
  const Vec3 we = random_vec(rng, 1e-4), wn = random_vec(rng, 1e-5), g = random_vec(rng, 0.01) - Vec3(0, 0, 9.8);
  return make_epoch(
      t0, 100,
      [&](double t) {
        const double s = std::sin(t);
        return oba::ImuSample{t, w0 + s * w1, f0 + s * f1};
      },
      [&](double t) {
        oba::NavTerms n;
        n.velocity = v0 + std::cos(t) * v1;
        n.earth_rate = we;
        n.transport_rate = wn;
        n.gravity = g;
        return n;
      });
}

/// Truth state at time t (samples share the IMU grid).
inline const oba::NavTruthState& truth_at(const Scenario& s, double t) {
  const double h = s.truth[1].time - s.truth[0].time;
  return s.truth.at(static_cast<std::size_t>(std::llround((t - s.truth.front().time) / h)));
}

}  // namespace oba_test
