#include "oba/trajectory.hpp"

#include <cmath>

#include "oba/error.hpp"

namespace oba {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec3 forward_enu(double yaw) { return {-std::sin(yaw), std::cos(yaw), 0.0}; }

void validate(const MotionProfile& motion) {
  std::visit(Overloaded{
                 [](const profile::Stationary&) {},
                 [](const profile::StraightAccelerate& p) {
                   if (!(p.acceleration > 0.0)) throw ConfigError("acceleration", "must be positive");
                   if (!(p.max_speed > 0.0)) throw ConfigError("max_speed", "must be positive");
                 },
                 [](const profile::Circle& p) {
                   if (!(p.radius > 0.0)) throw ConfigError("radius", "circle radius must be positive");
                   if (!(p.speed > 0.0)) throw ConfigError("speed", "circle speed must be positive");
                   if (!(p.speed_amplitude >= 0.0 && p.speed_amplitude < p.speed)) {
                     throw ConfigError("speed_amplitude", "must be in [0, speed)");
                   }
                   if (!(p.speed_period > 0.0)) throw ConfigError("speed_period", "must be positive");
                 },
                 [](const profile::Swaying& p) {
                   if (!(p.periods.minCoeff() > 0.0)) throw ConfigError("sway_periods", "must be positive");
                 },
             },
             motion);
}

// w_nb^b for C = Rz(yaw) Rx(pitch) Ry(roll).
Vec3 body_rate_from_euler(const EulerAngles& e, const Vec3& rates) {
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double pitch_dot = rates[0], roll_dot = rates[1], yaw_dot = rates[2];
  // Rx(pitch)^T * (0, 0, yaw_dot) + (pitch_dot, 0, 0)
  const Vec3 u(pitch_dot, sp * yaw_dot, cp * yaw_dot);
  // Ry(roll)^T * u + (0, roll_dot, 0)
  return Vec3(cr * u.x() - sr * u.z(), u.y() + roll_dot, sr * u.x() + cr * u.z());
}

}  // namespace

ProfileKinematics profile_kinematics(const TrajectorySpec& spec, double t) {
  ProfileKinematics k;
  k.euler = spec.initial_attitude;
  std::visit(Overloaded{
                 [](const profile::Stationary&) {},
                 [&](const profile::StraightAccelerate& p) {
                   const double t_max = p.max_speed / p.acceleration;
                   const Vec3 fwd = forward_enu(k.euler.yaw) * std::cos(k.euler.pitch) +
                                    Vec3(0.0, 0.0, std::sin(k.euler.pitch));
                   if (t < t_max) {
                     k.velocity = p.acceleration * t * fwd;
                     k.acceleration = p.acceleration * fwd;
                   } else {
                     k.velocity = p.max_speed * fwd;
                   }
                 },
                 [&](const profile::Circle& p) {
                   const double w = 2.0 * kPi / p.speed_period;
                   const double speed = p.speed + p.speed_amplitude * std::sin(w * t);
                   const double speed_dot = p.speed_amplitude * w * std::cos(w * t);
                   const double distance = p.speed * t + p.speed_amplitude * (1.0 - std::cos(w * t)) / w;
                   const double yaw_rate = speed / p.radius;
                   k.euler.pitch = 0.0;
                   k.euler.roll = 0.0;
                   k.euler.yaw = spec.initial_attitude.yaw + distance / p.radius;
                   k.euler_rates[2] = yaw_rate;
                   const Vec3 fwd = forward_enu(k.euler.yaw);
                   k.velocity = speed * fwd;
                   k.acceleration = speed_dot * fwd +
                                    speed * yaw_rate * Vec3(-std::cos(k.euler.yaw), -std::sin(k.euler.yaw), 0.0);
                 },
                 [&](const profile::Swaying& p) {
                   const Vec3 w = 2.0 * kPi * p.periods.cwiseInverse();
                   k.euler.pitch += p.amplitudes[0] * std::sin(w[0] * t);
                   k.euler.roll += p.amplitudes[1] * std::sin(w[1] * t);
                   k.euler.yaw += p.amplitudes[2] * std::sin(w[2] * t);
                   k.euler_rates = p.amplitudes.cwiseProduct(w).cwiseProduct(
                       Vec3(std::cos(w[0] * t), std::cos(w[1] * t), std::cos(w[2] * t)));
                 },
             },
             spec.motion);
  return k;
}

std::vector<NavTruthState> simulate_trajectory(const TrajectorySpec& spec, double duration, double rate) {
  if (!(duration > 0.0)) throw ConfigError("duration", "must be positive");
  if (!(rate > 0.0)) throw ConfigError("rate", "must be positive");
  validate(spec.motion);
  spec.start.validate();

  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  const double h = 1.0 / rate;
  std::vector<NavTruthState> out;
  out.reserve(n + 1);

  // Position is the only channel integrated numerically (RK4 on the analytic velocity).
  Vec3 pos(spec.start.latitude, spec.start.longitude, spec.start.height);
  auto as_geo = [](const Vec3& p) { return GeodeticPosition{p[0], p[1], p[2]}; };
  auto vel_at = [&](double t) { return profile_kinematics(spec, t).velocity; };

  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * h;
    if (i > 0) {
      const double t0 = static_cast<double>(i - 1) * h;
      const Vec3 k1 = position_rate(vel_at(t0), as_geo(pos));
      const Vec3 k2 = position_rate(vel_at(t0 + 0.5 * h), as_geo(pos + 0.5 * h * k1));
      const Vec3 k3 = position_rate(vel_at(t0 + 0.5 * h), as_geo(pos + 0.5 * h * k2));
      const Vec3 k4 = position_rate(vel_at(t), as_geo(pos + h * k3));
      pos += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const ProfileKinematics k = profile_kinematics(spec, t);
    NavTruthState s;
    s.time = t;
    s.position = as_geo(pos);
    s.attitude = quat_from_euler(k.euler);
    s.velocity = k.velocity;
    const Vec3 wie = earth_rate_n(s.position);
    const Vec3 wen = transport_rate_n(k.velocity, s.position);
    const Mat3 cnb = dcm_from_quat(s.attitude).transpose();
    s.body_rate = body_rate_from_euler(k.euler, k.euler_rates) + cnb * (wie + wen);
    s.specific_force = cnb * (k.acceleration + (2.0 * wie + wen).cross(k.velocity) - gravity_n(s.position));
    out.push_back(s);
  }
  return out;
}

}  // namespace oba
