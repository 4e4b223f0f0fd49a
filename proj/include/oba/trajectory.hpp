#pragma once

// Ground-truth trajectory generation. Attitude and velocity come from
// closed-form profiles; body rate and specific force are back-solved from
// them so the truth channels cannot drift apart.

#include <variant>
#include <vector>

#include "oba/attitude.hpp"
#include "oba/earth.hpp"

namespace oba {

struct NavTruthState {
  double time = 0.0;
  Quaternion attitude;  // body -> nav
  Vec3 velocity = Vec3::Zero();
  GeodeticPosition position;
  Vec3 body_rate = Vec3::Zero();       // w_ib^b, rad/s
  Vec3 specific_force = Vec3::Zero();  // f^b, m/s^2
};

namespace profile {

struct Stationary {};

/// Constant acceleration along the initial heading until max_speed.
struct StraightAccelerate {
  double acceleration = 1.0;  // m/s^2
  double max_speed = 20.0;    // m/s
};

/// Level counter-clockwise circle entered at t = 0. The speed is
/// speed + speed_amplitude * sin(2 pi t / speed_period); with a zero
/// amplitude the turn is steady.
struct Circle {
  double radius = 800.0;          // m
  double speed = 15.0;            // m/s
  double speed_amplitude = 12.0;  // m/s
  double speed_period = 60.0;     // s
};

/// Sinusoidal pitch/roll/yaw about the initial attitude, no translation.
struct Swaying {
  Vec3 amplitudes = Vec3(2.0 * kDeg, 3.0 * kDeg, 1.0 * kDeg);  // pitch, roll, yaw (rad)
  Vec3 periods = Vec3(7.0, 5.0, 11.0);                          // s
};

}  // namespace profile

using MotionProfile =
    std::variant<profile::Stationary, profile::StraightAccelerate, profile::Circle, profile::Swaying>;

struct TrajectorySpec {
  MotionProfile motion = profile::Stationary{};
  GeodeticPosition start{30.5 * kDeg, 114.3 * kDeg, 20.0};
  EulerAngles initial_attitude;
};

/// Analytic attitude/velocity of the profile at time t (no earth terms).
struct ProfileKinematics {
  EulerAngles euler;
  Vec3 euler_rates = Vec3::Zero();  // d/dt (pitch, roll, yaw)
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};
ProfileKinematics profile_kinematics(const TrajectorySpec& spec, double t);

/// Samples the truth at `rate` Hz over [0, duration] (both ends included).
/// Throws ConfigError for non-positive duration/rate or an invalid profile.
std::vector<NavTruthState> simulate_trajectory(const TrajectorySpec& spec, double duration, double rate);

}  // namespace oba
