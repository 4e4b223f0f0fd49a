#include "oba/observation.hpp"

#include <cmath>
#include <string>

#include "oba/error.hpp"

namespace oba {

std::vector<EpochInput> make_epochs(std::span<const ImuSample> imu, std::span<const GnssSample> gnss,
                                    double interval) {
  if (!(interval > 0.0)) throw ConfigError("interval", "must be positive");
  if (imu.size() < 2) throw DataError("need at least two IMU samples");
  if (gnss.empty()) throw DataError("need GNSS samples");
  const double h = imu[1].time - imu[0].time;
  if (!(h > 0.0)) throw DataError("IMU timestamps must increase");
  const double ratio = interval / h;
  const auto per_epoch = static_cast<std::size_t>(std::llround(ratio));
  if (per_epoch < 1 || std::abs(ratio - static_cast<double>(per_epoch)) > 1e-6) {
    throw DataError("update interval must be a whole number of IMU samples");
  }
  const double t0 = imu.front().time;
  for (std::size_t i = 1; i < imu.size(); ++i) {
    const double expected = t0 + static_cast<double>(i) * h;
    if (std::abs(imu[i].time - expected) > 1e-6 * h + 1e-9) {
      throw DataError("IMU stream discontinuity at t = " + std::to_string(imu[i].time));
    }
  }

  std::vector<EpochInput> epochs;
  for (std::size_t first = 0; first + per_epoch < imu.size(); first += per_epoch) {
    const std::size_t last = first + per_epoch;
    if (imu[last].time > gnss.back().time + 1e-9) break;
    EpochInput e;
    e.t_start = imu[first].time;
    e.t_end = imu[last].time;
    e.imu.assign(imu.begin() + static_cast<std::ptrdiff_t>(first),
                 imu.begin() + static_cast<std::ptrdiff_t>(last + 1));
    e.nav.reserve(e.imu.size());
    for (const ImuSample& s : e.imu) {
      const auto [v, pos] = interpolate_gnss(gnss, s.time);
      NavTerms t;
      t.velocity = v;
      t.earth_rate = earth_rate_n(pos);
      t.transport_rate = transport_rate_n(v, pos);
      t.gravity = gravity_n(pos);
      e.nav.push_back(t);
    }
    e.position_start = interpolate_gnss(gnss, e.t_start).second;
    e.position_end = interpolate_gnss(gnss, e.t_end).second;
    epochs.push_back(std::move(e));
  }
  return epochs;
}

const char* to_string(PairKind kind) {
  switch (kind) {
    case PairKind::kAcceleration:
      return "acceleration";
    case PairKind::kVelocityFull:
      return "velocity-full";
    case PairKind::kVelocityPartial:
      return "velocity-partial";
    case PairKind::kShifted:
      return "shifted";
    case PairKind::kDynamic:
      return "dynamic";
  }
  return "unknown";
}

Vec3 rotating_integral(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double h) {
  const double h2 = h * h;
  const double h3 = h2 * h;
  return c * h + d * (0.5 * h2) + a.cross(c) * (0.5 * h2) + (a.cross(d) + 0.5 * b.cross(c)) * (h3 / 3.0) +
         b.cross(d) * (0.125 * h2 * h2) + a.cross(a.cross(c)) * (h3 / 6.0);
}

// ChainState -----------------------------------------------------------------

ChainState::ChainState(std::size_t history) : history_(history) {
  if (history == 0) throw ConfigError("window", "history must hold at least one sample");
}

const ChainState::Record& ChainState::back() const {
  if (ring_.empty()) throw DataError("chain state has not been started");
  return ring_[head_];
}

void ChainState::push(const Record& r) {
  const std::size_t capacity = history_ + 1;
  if (ring_.size() < capacity) {
    ring_.push_back(r);
    head_ = ring_.size() - 1;
  } else {
    head_ = (head_ + 1) % capacity;
    ring_[head_] = r;
  }
}

std::size_t ChainState::oldest_index() const { return index_ >= history_ ? index_ - history_ : 0; }

const ChainState::Record& ChainState::record(std::size_t m) const {
  if (ring_.empty()) throw DataError("chain state has not been started");
  if (m == 0) return initial_;
  if (m > index_ || m < oldest_index()) {
    throw DataError("sample index " + std::to_string(m) + " outside retained history [" +
                    std::to_string(oldest_index()) + ", " + std::to_string(index_) + "]");
  }
  const std::size_t capacity = history_ + 1;
  const std::size_t back_steps = index_ - m;
  return ring_[(head_ + capacity - back_steps % capacity) % capacity];
}

void ChainState::advance(const EpochInput& epoch) {
  if (epoch.imu.size() < 2 || epoch.nav.size() != epoch.imu.size()) {
    throw DataError("epoch needs matching IMU and navigation samples");
  }
  if (ring_.empty()) {
    initial_.time = epoch.t_start;
    initial_.velocity = epoch.velocity_start();
    push(initial_);
  } else if (std::abs(epoch.t_start - time()) > 1e-6) {
    throw DataError("epoch starts at t = " + std::to_string(epoch.t_start) + " but chains are at t = " +
                    std::to_string(time()));
  }

  Record cur = back();
  for (std::size_t j = 0; j + 1 < epoch.imu.size(); ++j) {
    const ImuSample& s0 = epoch.imu[j];
    const ImuSample& s1 = epoch.imu[j + 1];
    const NavTerms& n0 = epoch.nav[j];
    const NavTerms& n1 = epoch.nav[j + 1];
    const double h = s1.time - s0.time;

    const Vec3 wb0 = s0.gyro;
    const Vec3 wb_slope = (s1.gyro - s0.gyro) / h;
    const Vec3 dv_body = rotating_integral(wb0, wb_slope, s0.accel, (s1.accel - s0.accel) / h, h);

    const Vec3 wn0 = n0.nav_rate();
    const Vec3 wn_slope = (n1.nav_rate() - wn0) / h;
    const Vec3 cor0 = n0.earth_rate.cross(n0.velocity);
    const Vec3 cor1 = n1.earth_rate.cross(n1.velocity);
    const Vec3 d_cor = rotating_integral(wn0, wn_slope, cor0, (cor1 - cor0) / h, h);
    const Vec3 d_grav = rotating_integral(wn0, wn_slope, n0.gravity, (n1.gravity - n0.gravity) / h, h);

    const Mat3 cb0 = dcm_from_quat(cur.body);
    const Mat3 skew0 = skew(cur.sum_alpha) * cb0;
    cur.sum_alpha += cur.body.rotate(dv_body);
    cur.sum_coriolis += cur.nav.rotate(d_cor);
    cur.sum_gravity += cur.nav.rotate(d_grav);
    cur.body = cur.body * rotation_vector_from_rates(s0.gyro, s1.gyro, h).to_quaternion();
    const Mat3 cb1 = dcm_from_quat(cur.body);
    cur.sum_rotation += 0.5 * h * (cb0 + cb1);
    cur.sum_skew_rotation += 0.5 * h * (skew0 + skew(cur.sum_alpha) * cb1);
    cur.nav = cur.nav * rotation_vector_from_rates(wn0, n1.nav_rate(), h).to_quaternion();
    cur.velocity = n1.velocity;
    cur.time = s1.time;
    ++index_;
    push(cur);
  }
  last_force_ = epoch.imu.back().accel;
  last_nav_ = epoch.nav.back();
  last_accel_ = (epoch.velocity_end() - epoch.velocity_start()) / epoch.duration();
  ++epochs_;
}

ChainState advance_chains(ChainState state, const EpochInput& epoch) {
  state.advance(epoch);
  return state;
}

// Pair builders --------------------------------------------------------------

namespace {

void require_started(const ChainState& s) {
  if (s.index() == 0) throw DataError("pairs need at least one processed interval");
}

ObservationPair window_pair(const ChainState& s, std::size_t m, PairKind kind) {
  require_started(s);
  const std::size_t M = s.index();
  if (m >= M) throw DataError("window start must precede the current sample");
  const auto& rm = s.record(m);
  const auto& rM = s.record(M);
  ObservationPair p;
  p.alpha = rM.sum_alpha - rm.sum_alpha;
  p.beta = rM.nav.rotate(rM.velocity) - rm.nav.rotate(rm.velocity) + (rM.sum_coriolis - rm.sum_coriolis) -
           (rM.sum_gravity - rm.sum_gravity);
  p.start = m;
  p.end = M;
  p.kind = kind;
  p.time = rM.time;
  p.window_seconds = rM.time - rm.time;
  return p;
}

}  // namespace

std::size_t window_start(const ChainState& state, std::size_t window) {
  return state.index() > window ? state.index() - window : 0;
}

ObservationPair build_acceleration_pair(const ChainState& state) {
  require_started(state);
  const auto& r = state.record(state.index());
  const NavTerms& n = state.last_nav();
  ObservationPair p;
  p.alpha = r.body.rotate(state.last_specific_force());
  p.beta = r.nav.rotate(state.last_acceleration() + (2.0 * n.earth_rate + n.transport_rate).cross(n.velocity) -
                        n.gravity);
  p.start = state.index();
  p.end = state.index();
  p.kind = PairKind::kAcceleration;
  p.time = r.time;
  return p;
}

ObservationPair build_full_pair(const ChainState& state) {
  return window_pair(state, 0, PairKind::kVelocityFull);
}

ObservationPair build_partial_pair(const ChainState& state, std::size_t m) {
  return window_pair(state, m, PairKind::kVelocityPartial);
}

ObservationPair build_shifted_pair(const ChainState& state, std::size_t m) {
  ObservationPair p = window_pair(state, m, PairKind::kShifted);
  const auto& rm = state.record(m);
  p.alpha = rm.body.conjugate().rotate(p.alpha);
  p.beta = rm.nav.conjugate().rotate(p.beta);
  return p;
}

ObservationPair build_dynamic_pair(const ChainState& state, std::size_t m) {
  ObservationPair p = window_pair(state, m, PairKind::kDynamic);
  const auto& rm = state.record(m);
  const auto& rM = state.record(state.index());
  p.alpha = rM.body.conjugate().rotate(p.alpha);
  p.beta = rM.nav.conjugate().rotate(p.beta);
  // Removing eps from the rates perturbs C_{b(tau)}^{b(t)} by -phi x with
  // phi = -int_tau^t C_{b(u)}^{b(t)} du eps; swapping the integration order
  // leaves prefix sums only.
  const Mat3 inner = (rM.sum_skew_rotation - rm.sum_skew_rotation) -
                     skew(rm.sum_alpha) * (rM.sum_rotation - rm.sum_rotation);
  p.bias_jacobian = -dcm_from_quat(rM.body).transpose() * inner;
  return p;
}

}  // namespace oba
