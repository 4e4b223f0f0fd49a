#pragma once

// Attitude algebra shared by the alignment code.
//
// Conventions (fixed for the whole library):
//  * quaternions are stored vector part first, scalar last: [x y z w];
//  * C(q) is the active rotation taking body-frame vectors into the
//    navigation frame, C(q) = (w^2 - |v|^2) I + 2 v v^T + 2 w [v x];
//  * composition matches matrix products: C(a * b) = C(a) C(b).

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

namespace oba {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDeg = kPi / 180.0;
inline constexpr double kArcmin = kDeg / 60.0;
inline constexpr double kDegPerHour = kDeg / 3600.0;

/// Skew-symmetric cross-product matrix, skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

class RotationVector;

/// Unit quaternion. Every factory and operation returns a normalized value.
class Quaternion {
 public:
  Quaternion() : c_(0.0, 0.0, 0.0, 1.0) {}

  static Quaternion identity() { return {}; }
  /// Normalizes its input; throws InvalidRotation for a zero or non-finite vector.
  static Quaternion from_coeffs(const Vec4& xyzw);
  static Quaternion from_parts(const Vec3& vec, double w) {
    return from_coeffs(Vec4(vec.x(), vec.y(), vec.z(), w));
  }
  static Quaternion from_axis_angle(const Vec3& axis, double angle);

  const Vec4& coeffs() const { return c_; }
  Vec3 vec() const { return c_.head<3>(); }
  double w() const { return c_[3]; }

  Quaternion conjugate() const;
  Quaternion operator-() const;
  Quaternion operator*(const Quaternion& rhs) const;

  Vec3 rotate(const Vec3& v) const;
  double dot(const Quaternion& other) const { return c_.dot(other.c_); }

  /// Same rotation, sign-insensitive.
  bool same_rotation(const Quaternion& other, double tol) const;

 private:
  explicit Quaternion(const Vec4& unit) : c_(unit) {}
  Vec4 c_;
};

Quaternion quat_multiply(const Quaternion& q1, const Quaternion& q2);
Mat3 dcm_from_quat(const Quaternion& q);
/// Largest-pivot extraction. Throws InvalidRotation when ||C^T C - I||_F > 1e-6
/// or det(C) < 0.
Quaternion quat_from_dcm(const Mat3& c);

/// Angle of the relative rotation between two attitudes, in [0, pi].
double angle_between(const Quaternion& a, const Quaternion& b);

/// Rotation vector in radians.
class RotationVector {
 public:
  RotationVector() : v_(Vec3::Zero()) {}
  explicit RotationVector(const Vec3& v) : v_(v) {}

  const Vec3& value() const { return v_; }
  double angle() const { return v_.norm(); }
  /// Equivalent rotation vector with magnitude <= pi.
  RotationVector wrapped() const;

  Quaternion to_quaternion() const;
  /// Principal rotation vector of q (magnitude <= pi).
  static RotationVector from_quaternion(const Quaternion& q);

 private:
  Vec3 v_;
};

/// Propagates q through a sequence of body angular increments. Increments
/// are consumed in pairs with the two-sample coning correction
/// phi = d1 + d2 + (2/3) d1 x d2; a trailing odd increment is applied alone.
Quaternion integrate_attitude(const Quaternion& q, std::span<const RotationVector> body_increments);

/// Rotation vector over [t0, t0 + h] for a rate varying linearly from w0 to
/// w1 (trapezoidal angle plus the corresponding coning term h^2/12 w0 x w1).
RotationVector rotation_vector_from_rates(const Vec3& w0, const Vec3& w1, double h);

// Generalized Rodrigues parameters -------------------------------------------

class GrpParams {
 public:
  /// Defaults a = 1, f = 2(a + 1) = 4.
  GrpParams() = default;
  /// Throws ConfigError unless a in [0, 1] and f > 0.
  GrpParams(double a, double f);

  double a() const { return a_; }
  double f() const { return f_; }

 private:
  double a_ = 1.0;
  double f_ = 4.0;
};

/// dp = f * drho / (a + dq4). Throws SingularityError when a + dq4 <= 1e-12.
Vec3 grp_from_error_quat(const Quaternion& dq, const GrpParams& p);
/// Inverse map:
///   dq4  = (-a |dp|^2 + f sqrt(f^2 + (1 - a^2)|dp|^2)) / (f^2 + |dp|^2)
///   drho = (a + dq4) dp / f
Quaternion error_quat_from_grp(const Vec3& dp, const GrpParams& p);

// Averaging ------------------------------------------------------------------

/// argmax_q q^T A q with A = sum w_i q_i q_i^T. The result is the unit
/// dominant eigenvector of A, signed to have a nonnegative dot product with
/// quats[0]. Throws AmbiguousAverage when the top eigenvalue is not simple
/// (gap <= 1e-12 * max(1, lambda_max)), std::invalid_argument on bad input.
Quaternion quat_average(std::span<const Quaternion> quats, std::span<const double> weights);

// Euler angles (reporting only) ----------------------------------------------

/// C_b^n = Rz(yaw) * Rx(pitch) * Ry(roll) with body axes right-forward-up
/// and an East-North-Up navigation frame. Yaw is counter-clockwise about Up,
/// zero when the body forward axis points north.
struct EulerAngles {
  double pitch = 0.0;  // [-pi/2, pi/2]
  double roll = 0.0;   // (-pi, pi]
  double yaw = 0.0;    // (-pi, pi]
};

Quaternion quat_from_euler(const EulerAngles& e);
Mat3 dcm_from_euler(const EulerAngles& e);
EulerAngles euler_from_quat(const Quaternion& q);

/// Wraps an angle to (-pi, pi].
double wrap_pi(double angle);

}  // namespace oba
