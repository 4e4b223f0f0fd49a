#include "oba/attitude.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oba/error.hpp"

namespace oba {

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

// Quaternion -----------------------------------------------------------------

Quaternion Quaternion::from_coeffs(const Vec4& xyzw) {
  const double n = xyzw.norm();
  if (!std::isfinite(n) || n < 1e-300) {
    throw InvalidRotation("quaternion with zero or non-finite norm");
  }
  return Quaternion(xyzw / n);
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-300) {
    throw InvalidRotation("zero rotation axis");
  }
  return RotationVector(axis / n * angle).to_quaternion();
}

Quaternion Quaternion::conjugate() const {
  return Quaternion(Vec4(-c_[0], -c_[1], -c_[2], c_[3]));
}

Quaternion Quaternion::operator-() const { return Quaternion(Vec4(-c_)); }

Quaternion Quaternion::operator*(const Quaternion& rhs) const {
  const Vec3 v1 = vec();
  const Vec3 v2 = rhs.vec();
  const double w1 = w();
  const double w2 = rhs.w();
  Vec4 out;
  out.head<3>() = w1 * v2 + w2 * v1 + v1.cross(v2);
  out[3] = w1 * w2 - v1.dot(v2);
  return Quaternion(out / out.norm());
}

Vec3 Quaternion::rotate(const Vec3& v) const {
  const Vec3 u = vec();
  const Vec3 t = 2.0 * u.cross(v);
  return v + w() * t + u.cross(t);
}

bool Quaternion::same_rotation(const Quaternion& other, double tol) const {
  return std::min((c_ - other.c_).cwiseAbs().maxCoeff(), (c_ + other.c_).cwiseAbs().maxCoeff()) <= tol;
}

Quaternion quat_multiply(const Quaternion& q1, const Quaternion& q2) { return q1 * q2; }

Mat3 dcm_from_quat(const Quaternion& q) {
  const Vec3 v = q.vec();
  const double w = q.w();
  return (w * w - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() + 2.0 * w * skew(v);
}

Quaternion quat_from_dcm(const Mat3& c) {
  if (!c.allFinite()) {
    throw InvalidRotation("non-finite attitude matrix");
  }
  const double defect = (c.transpose() * c - Mat3::Identity()).norm();
  if (defect > 1e-6 || c.determinant() < 0.0) {
    throw InvalidRotation("attitude matrix is not a proper rotation (orthonormality defect " +
                          std::to_string(defect) + ")");
  }
  const double t = c.trace();
  const double cand[4] = {1.0 + c(0, 0) - c(1, 1) - c(2, 2), 1.0 - c(0, 0) + c(1, 1) - c(2, 2),
                          1.0 - c(0, 0) - c(1, 1) + c(2, 2), 1.0 + t};
  const int pivot = static_cast<int>(std::max_element(cand, cand + 4) - cand);
  Vec4 q;
  const double s = 0.5 * std::sqrt(std::max(cand[pivot], 0.0));
  const double k = 0.25 / s;
  switch (pivot) {
    case 0:
      q << s, (c(0, 1) + c(1, 0)) * k, (c(0, 2) + c(2, 0)) * k, (c(2, 1) - c(1, 2)) * k;
      break;
    case 1:
      q << (c(0, 1) + c(1, 0)) * k, s, (c(1, 2) + c(2, 1)) * k, (c(0, 2) - c(2, 0)) * k;
      break;
    case 2:
      q << (c(0, 2) + c(2, 0)) * k, (c(1, 2) + c(2, 1)) * k, s, (c(1, 0) - c(0, 1)) * k;
      break;
    default:
      q << (c(2, 1) - c(1, 2)) * k, (c(0, 2) - c(2, 0)) * k, (c(1, 0) - c(0, 1)) * k, s;
      break;
  }
  if (q[3] < 0.0) q = -q;
  return Quaternion::from_coeffs(q);
}

double angle_between(const Quaternion& a, const Quaternion& b) {
  return RotationVector::from_quaternion(a.conjugate() * b).angle();
}

// Rotation vectors -----------------------------------------------------------

RotationVector RotationVector::wrapped() const {
  const double a = angle();
  if (a <= kPi) return *this;
  const double reduced = std::remainder(a, 2.0 * kPi);
  return RotationVector(v_ / a * reduced);
}

Quaternion RotationVector::to_quaternion() const {
  const double a = angle();
  if (a < 1e-8) {
    const double a2 = a * a;
    return Quaternion::from_parts(0.5 * (1.0 - a2 / 24.0) * v_, 1.0 - a2 / 8.0);
  }
  return Quaternion::from_parts(std::sin(0.5 * a) / a * v_, std::cos(0.5 * a));
}

RotationVector RotationVector::from_quaternion(const Quaternion& q) {
  Vec3 v = q.vec();
  double w = q.w();
  if (w < 0.0) {
    v = -v;
    w = -w;
  }
  const double s = v.norm();
  if (s < 1e-8) {
    return RotationVector(2.0 / w * v);
  }
  return RotationVector(2.0 * std::atan2(s, w) / s * v);
}

Quaternion integrate_attitude(const Quaternion& q, std::span<const RotationVector> body_increments) {
  Quaternion out = q;
  std::size_t i = 0;
  for (; i + 1 < body_increments.size(); i += 2) {
    const Vec3& d1 = body_increments[i].value();
    const Vec3& d2 = body_increments[i + 1].value();
    const Vec3 phi = d1 + d2 + (2.0 / 3.0) * d1.cross(d2);
    out = out * RotationVector(phi).to_quaternion();
  }
  if (i < body_increments.size()) {
    out = out * body_increments[i].to_quaternion();
  }
  return out;
}

RotationVector rotation_vector_from_rates(const Vec3& w0, const Vec3& w1, double h) {
  return RotationVector(0.5 * h * (w0 + w1) + (h * h / 12.0) * w0.cross(w1));
}

// GRP ------------------------------------------------------------------------

GrpParams::GrpParams(double a, double f) : a_(a), f_(f) {
  if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("grp_a", "must lie in [0, 1]");
  if (!(f > 0.0)) throw ConfigError("grp_f", "must be positive");
}

Vec3 grp_from_error_quat(const Quaternion& dq, const GrpParams& p) {
  const double den = p.a() + dq.w();
  if (den <= 1e-12) {
    throw SingularityError("GRP singularity: a + dq4 = " + std::to_string(den));
  }
  return p.f() * dq.vec() / den;
}

Quaternion error_quat_from_grp(const Vec3& dp, const GrpParams& p) {
  const double a = p.a();
  const double f = p.f();
  const double n2 = dp.squaredNorm();
  const double dq4 = (-a * n2 + f * std::sqrt(f * f + (1.0 - a * a) * n2)) / (f * f + n2);
  const Vec3 drho = (a + dq4) / f * dp;
  return Quaternion::from_parts(drho, dq4);
}

// Averaging ------------------------------------------------------------------

Quaternion quat_average(std::span<const Quaternion> quats, std::span<const double> weights) {
  if (quats.empty()) throw std::invalid_argument("quat_average: no quaternions");
  if (quats.size() != weights.size()) throw std::invalid_argument("quat_average: size mismatch");
  Mat4 a = Mat4::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < quats.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("quat_average: negative weight");
    a.noalias() += weights[i] * quats[i].coeffs() * quats[i].coeffs().transpose();
    total += weights[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("quat_average: weights sum to zero");

  Eigen::SelfAdjointEigenSolver<Mat4> es(a);
  const Vec4& ev = es.eigenvalues();
  if (ev[3] - ev[2] <= 1e-12 * std::max(1.0, ev[3])) {
    throw AmbiguousAverage("quaternion average is not unique");
  }
  Vec4 q = es.eigenvectors().col(3);
  if (q.dot(quats[0].coeffs()) < 0.0) q = -q;
  return Quaternion::from_coeffs(q);
}

// Euler ----------------------------------------------------------------------

namespace {

Mat3 rot_x(double a) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return m;
}
Mat3 rot_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}
Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

}  // namespace

Mat3 dcm_from_euler(const EulerAngles& e) { return rot_z(e.yaw) * rot_x(e.pitch) * rot_y(e.roll); }

Quaternion quat_from_euler(const EulerAngles& e) {
  return Quaternion::from_axis_angle(Vec3::UnitZ(), e.yaw) * Quaternion::from_axis_angle(Vec3::UnitX(), e.pitch) *
         Quaternion::from_axis_angle(Vec3::UnitY(), e.roll);
}

EulerAngles euler_from_quat(const Quaternion& q) {
  const Mat3 c = dcm_from_quat(q);
  EulerAngles e;
  e.pitch = std::asin(std::clamp(c(2, 1), -1.0, 1.0));
  e.roll = wrap_pi(std::atan2(-c(2, 0), c(2, 2)));
  e.yaw = wrap_pi(std::atan2(-c(0, 1), c(1, 1)));
  return e;
}

double wrap_pi(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace oba
