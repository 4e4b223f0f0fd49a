#pragma once

// Inertial-frame attitude chains and vector-observation construction.
//
// Notation used below (all matrices are rotations):
//   Cb(k) = C_{b(t_k)}^{b(0)}  body frame at sample k relative to the frozen body frame b(0)
//   Cn(k) = C_{n(t_k)}^{n(0)}  navigation frame at sample k relative to n(0)
// Any pair built here satisfies  C * alpha = beta  for the attitude matrix C
// named by its kind.
//
// Sample indices count IMU sample intervals from the start of the run. The
// chains are advanced one update interval (epoch) at a time; every sample
// inside the epoch leaves a prefix-sum record so that windows may start at
// any sample still held in the history ring.

#include <cstddef>
#include <span>
#include <vector>

#include "oba/attitude.hpp"
#include "oba/earth.hpp"
#include "oba/sensors.hpp"

namespace oba {

/// Navigation-frame quantities at one IMU sample time, evaluated from the
/// linearly interpolated GNSS velocity and position.
struct NavTerms {
  Vec3 velocity = Vec3::Zero();
  Vec3 earth_rate = Vec3::Zero();      // w_ie^n
  Vec3 transport_rate = Vec3::Zero();  // w_en^n
  Vec3 gravity = Vec3::Zero();         // g^n

  Vec3 nav_rate() const { return earth_rate + transport_rate; }  // w_in^n
};

/// One update interval [t_start, t_end]: the IMU samples at both ends and
/// everything in between, plus GNSS-derived terms at the same instants.
struct EpochInput {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<ImuSample> imu;  // imu.front().time == t_start, imu.back().time == t_end
  std::vector<NavTerms> nav;   // same length as imu
  GeodeticPosition position_start;
  GeodeticPosition position_end;

  double duration() const { return t_end - t_start; }
  const Vec3& velocity_start() const { return nav.front().velocity; }
  const Vec3& velocity_end() const { return nav.back().velocity; }
};

/// Splits synchronized streams into epochs of `interval` seconds starting at
/// the first IMU sample. An IMU sample must fall on every epoch boundary.
/// Throws DataError on gaps or GNSS coverage problems.
std::vector<EpochInput> make_epochs(std::span<const ImuSample> imu, std::span<const GnssSample> gnss,
                                    double interval = 1.0);

enum class PairKind { kAcceleration, kVelocityFull, kVelocityPartial, kShifted, kDynamic };

const char* to_string(PairKind kind);

struct ObservationPair {
  Vec3 alpha = Vec3::Zero();
  Vec3 beta = Vec3::Zero();
  std::size_t start = 0;  // m
  std::size_t end = 0;    // M
  PairKind kind = PairKind::kVelocityFull;
  double time = 0.0;            // t_M
  double window_seconds = 0.0;  // t_M - t_m
  // Dynamic pairs only: first-order change of alpha for a gyro bias eps
  // removed from the rates used by the chains, alpha(eps) = alpha + G eps.
  Mat3 bias_jacobian = Mat3::Zero();
};

/// Integral over [0, h] of exp(theta(t) x) u(t), with theta(t) = a t + b t^2/2
/// and u(t) = c + d t; exact to second order in the rotation.
Vec3 rotating_integral(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double h);

class ChainState {
 public:
  /// `history` is the number of past samples whose records stay available
  /// to the windowed pair builders (the partial window length).
  explicit ChainState(std::size_t history = 100);

  /// Advances both chains through one epoch. Throws DataError if the epoch
  /// does not start where the previous one ended.
  void advance(const EpochInput& epoch);

  std::size_t index() const { return index_; }   // M, samples processed
  std::size_t epochs() const { return epochs_; }
  double time() const { return back().time; }
  bool started() const { return !ring_.empty(); }
  std::size_t history() const { return history_; }

  Quaternion body_chain_quat(std::size_t m) const { return record(m).body; }
  Quaternion nav_chain_quat(std::size_t m) const { return record(m).nav; }
  Mat3 body_chain(std::size_t m) const { return dcm_from_quat(record(m).body); }  // Cb(m)
  Mat3 nav_chain(std::size_t m) const { return dcm_from_quat(record(m).nav); }    // Cn(m)
  Mat3 body_chain() const { return body_chain(index_); }
  Mat3 nav_chain() const { return nav_chain(index_); }
  double time_at(std::size_t m) const { return record(m).time; }

  /// Oldest sample index a window may start from (0 is always allowed).
  std::size_t oldest_index() const;

  // Building blocks of the pair formulas, exposed for the builders.
  struct Record {
    double time = 0.0;
    Quaternion body;  // Cb
    Quaternion nav;   // Cn
    Vec3 sum_alpha = Vec3::Zero();     // sum_k Cb(k) int C_{b(t)}^{b(t_k)} f dt
    Vec3 sum_coriolis = Vec3::Zero();  // sum_k Cn(k) int C_{n(t)}^{n(t_k)} (w_ie x v) dt
    Vec3 sum_gravity = Vec3::Zero();   // sum_k Cn(k) int C_{n(t)}^{n(t_k)} g dt
    Vec3 velocity = Vec3::Zero();
    Mat3 sum_rotation = Mat3::Zero();       // int Cb ds
    Mat3 sum_skew_rotation = Mat3::Zero();  // int [sum_alpha x] Cb ds
  };
  /// Throws DataError when m is outside the retained history.
  const Record& record(std::size_t m) const;

  // Latest-sample values used by the acceleration-form pair.
  const Vec3& last_specific_force() const { return last_force_; }
  const NavTerms& last_nav() const { return last_nav_; }
  const Vec3& last_acceleration() const { return last_accel_; }

 private:
  const Record& back() const;
  void push(const Record& r);

  std::size_t history_;
  std::size_t index_ = 0;
  std::size_t epochs_ = 0;
  Record initial_;
  std::vector<Record> ring_;  // circular, capacity history_ + 1
  std::size_t head_ = 0;      // slot of the newest record
  Vec3 last_force_ = Vec3::Zero();
  Vec3 last_accel_ = Vec3::Zero();
  NavTerms last_nav_;
};

/// Pure form of ChainState::advance.
ChainState advance_chains(ChainState state, const EpochInput& epoch);

/// Instantaneous pair at the latest sample, paired with Cb^n(0):
/// alpha = Cb(M) f^b, beta = Cn(M) (dv/dt + (2 w_ie + w_en) x v - g).
ObservationPair build_acceleration_pair(const ChainState& state);

/// Velocity pair over [0, t] for Cb^n(0).
ObservationPair build_full_pair(const ChainState& state);

/// Velocity-increment pair over [t_m, t] for Cb^n(0).
ObservationPair build_partial_pair(const ChainState& state, std::size_t m);

/// Same window expressed in the frames frozen at t_m; pairs with Cb^n(t_m).
ObservationPair build_shifted_pair(const ChainState& state, std::size_t m);

/// Same window expressed in the frames at t; pairs with Cb^n(t). Also fills
/// the bias Jacobian of alpha.
ObservationPair build_dynamic_pair(const ChainState& state, std::size_t m);

/// Start index for a window of `window` samples ending at the current sample.
std::size_t window_start(const ChainState& state, std::size_t window);

}  // namespace oba
