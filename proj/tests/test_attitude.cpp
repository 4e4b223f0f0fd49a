#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "oba/attitude.hpp"
#include "oba/error.hpp"
#include "support.hpp"

using namespace oba;
using oba_test::random_quat;
using oba_test::random_unit;
using oba_test::random_vec;
using oba_test::rotation_angle;

namespace {

Mat3 rz(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

void expect_unit(const Quaternion& q) { EXPECT_LE(std::abs(q.coeffs().norm() - 1.0), 1e-12); }

}  // namespace

TEST(Quaternion, IdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const Quaternion q = random_quat(rng);
  EXPECT_TRUE((Quaternion::identity() * q).same_rotation(q, 1e-15));
  EXPECT_TRUE((q * Quaternion::identity()).same_rotation(q, 1e-15));
}

TEST(Quaternion, InverseGivesIdentity) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const Quaternion q = random_quat(rng);
    const Quaternion p = quat_multiply(q, q.conjugate());
    EXPECT_TRUE(p.same_rotation(Quaternion::identity(), 1e-15));
    expect_unit(p);
  }
}

TEST(Quaternion, TwoQuarterTurnsAboutZ) {
  const Quaternion q90 = Quaternion::from_axis_angle(Vec3::UnitZ(), kPi / 2);
  const Mat3 c = dcm_from_quat(q90 * q90);
  EXPECT_LE((c - rz(kPi / 2) * rz(kPi / 2)).norm(), 1e-15);
  EXPECT_LE((c - rz(kPi)).norm(), 1e-15);
}

TEST(Quaternion, FactoryRejectsZeroAndNonFinite) {
  EXPECT_THROW(Quaternion::from_coeffs(Vec4::Zero()), InvalidRotation);
  EXPECT_THROW(Quaternion::from_coeffs(Vec4(NAN, 0, 0, 1)), InvalidRotation);
  expect_unit(Quaternion::from_coeffs(Vec4(1, 2, 3, 4)));
}

TEST(Dcm, ClosedForms) {
  EXPECT_LE((dcm_from_quat(Quaternion::identity()) - Mat3::Identity()).norm(), 0.0);
  const Quaternion q = Quaternion::from_axis_angle(Vec3::UnitZ(), kPi / 2);
  EXPECT_LE((dcm_from_quat(q) - rz(kPi / 2)).norm(), 1e-15);
  // Body x (right) maps to nav north under a +90 deg turn about up.
  EXPECT_LE((q.rotate(Vec3::UnitX()) - Vec3::UnitY()).norm(), 1e-15);
}

TEST(Dcm, HomomorphismAndRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion a = random_quat(rng);
    const Quaternion b = random_quat(rng);
    EXPECT_LE((dcm_from_quat(a * b) - dcm_from_quat(a) * dcm_from_quat(b)).norm(), 1e-12);
    const Quaternion back = quat_from_dcm(dcm_from_quat(a));
    EXPECT_TRUE(back.same_rotation(a, 1e-12));
    expect_unit(back);
    const Vec3 v = random_vec(rng);
    EXPECT_LE((a.rotate(v) - dcm_from_quat(a) * v).norm(), 1e-12);
  }
}

TEST(Dcm, NearHalfTurnRoundTrip) {
  for (const Vec3& axis : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1).normalized()}) {
    const Quaternion q = Quaternion::from_axis_angle(axis, kPi - 1e-9);
    EXPECT_TRUE(quat_from_dcm(dcm_from_quat(q)).same_rotation(q, 1e-12));
  }
}

TEST(Dcm, RejectsNonRotations) {
  EXPECT_THROW(quat_from_dcm(2.0 * Mat3::Identity()), InvalidRotation);
  EXPECT_THROW(quat_from_dcm(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), InvalidRotation);
}

TEST(RotationVector, QuaternionRoundTrip) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const Vec3 v = random_unit(rng) * std::uniform_real_distribution<double>(0.0, kPi - 1e-6)(rng);
    const RotationVector r(v);
    EXPECT_LE((RotationVector::from_quaternion(r.to_quaternion()).value() - v).norm(), 1e-12);
  }
  EXPECT_LE(RotationVector(Vec3(3 * kPi / 2, 0, 0)).wrapped().angle(), kPi);
}

TEST(IntegrateAttitude, ZeroIncrementsLeaveInputUnchanged) {
  std::mt19937_64 rng(5);
  const Quaternion q = random_quat(rng);
  const std::vector<RotationVector> zero(7);
  EXPECT_TRUE(integrate_attitude(q, zero).same_rotation(q, 1e-15));
}

TEST(IntegrateAttitude, ConstantRateAboutZ) {
  const double w = 0.3;
  const double h = 0.01;
  const std::vector<RotationVector> inc(1000, RotationVector(Vec3(0, 0, w * h)));
  const Quaternion q = integrate_attitude(Quaternion::identity(), inc);
  EXPECT_NEAR(euler_from_quat(q).yaw, wrap_pi(w * h * 1000), 1e-9);
  expect_unit(q);
}

TEST(IntegrateAttitude, ConingMatchesFineSingleStep) {
  // Classical coning: rate (A cos Wt, A sin Wt, 0).
  const double amp = 0.1;
  const double omega = 2.0 * kPi;
  const auto increment = [&](double t0, double t1) {
    return RotationVector(Vec3(amp / omega * (std::sin(omega * t1) - std::sin(omega * t0)),
                               -amp / omega * (std::cos(omega * t1) - std::cos(omega * t0)), 0.0));
  };
  const double h = 0.01;
  std::vector<RotationVector> coarse;
  for (int k = 0; k < 100; ++k) coarse.push_back(increment(k * h, (k + 1) * h));
  const Quaternion q = integrate_attitude(Quaternion::identity(), coarse);

  Quaternion ref;
  const double hf = h / 100.0;
  for (int k = 0; k < 10000; ++k) ref = ref * increment(k * hf, (k + 1) * hf).to_quaternion();
  EXPECT_LE(angle_between(q, ref), 1e-8);
  // The coning term matters at this amplitude: plain summation is far worse.
  Quaternion plain;
  for (const auto& r : coarse) plain = plain * r.to_quaternion();
  EXPECT_GT(angle_between(plain, ref), 10 * angle_between(q, ref));
}

TEST(IntegrateAttitude, RatesToRotationVectorSingleAxis) {
  const RotationVector r = rotation_vector_from_rates(Vec3(0, 0, 0.1), Vec3(0, 0, 0.3), 0.5);
  EXPECT_NEAR(r.value().z(), 0.1, 1e-15);
  EXPECT_NEAR(r.value().head<2>().norm(), 0.0, 1e-15);
}

TEST(Grp, IdentityMapsToZero) {
  EXPECT_LE(grp_from_error_quat(Quaternion::identity(), GrpParams()).norm(), 0.0);
  const Quaternion q = error_quat_from_grp(Vec3::Zero(), GrpParams());
  EXPECT_EQ(q.coeffs(), Vec4(0, 0, 0, 1));
}

TEST(Grp, WorkedExample) {
  const double w = std::sqrt(0.99);
  const Quaternion dq = Quaternion::from_parts(Vec3(0.1, 0, 0), w);
  const Vec3 dp = grp_from_error_quat(dq, GrpParams(1.0, 4.0));
  EXPECT_NEAR(dp.x(), 0.4 / (1.0 + w), 1e-15);
  EXPECT_EQ(dp.y(), 0.0);
  EXPECT_EQ(dp.z(), 0.0);
  EXPECT_TRUE(error_quat_from_grp(dp, GrpParams(1.0, 4.0)).same_rotation(dq, 1e-15));
}

TEST(Grp, AntipodalNearIdentityIsSingular) {
  EXPECT_THROW(grp_from_error_quat(-Quaternion::identity(), GrpParams()), SingularityError);
}

TEST(Grp, RoundTripOverRegularRegion) {
  std::mt19937_64 rng(6);
  for (const GrpParams& p : {GrpParams(), GrpParams(0.0, 1.0), GrpParams(0.5, 3.0)}) {
    for (int i = 0; i < 2000; ++i) {
      const Vec3 dp = random_unit(rng) * std::uniform_real_distribution<double>(0.0, p.f())(rng);
      const Quaternion q = error_quat_from_grp(dp, p);
      expect_unit(q);
      EXPECT_LE((grp_from_error_quat(q, p) - dp).norm(), 1e-12 * std::max(1.0, dp.norm()));
    }
  }
}

TEST(Grp, SmallAngleMatchesRotationVector) {
  const Vec3 angle(1e-4, -2e-4, 3e-4);
  const Vec3 dp = grp_from_error_quat(RotationVector(angle).to_quaternion(), GrpParams());
  EXPECT_LE((dp - angle).norm(), 1e-11);
}

TEST(Grp, ParameterValidation) {
  EXPECT_THROW(GrpParams(-0.1, 1.0), ConfigError);
  EXPECT_THROW(GrpParams(1.1, 1.0), ConfigError);
  EXPECT_THROW(GrpParams(0.5, 0.0), ConfigError);
}

TEST(QuatAverage, CopiesAndSigns) {
  std::mt19937_64 rng(7);
  const Quaternion q = random_quat(rng);
  const std::vector<Quaternion> same(5, q);
  const std::vector<double> w(5, 1.0);
  EXPECT_TRUE(quat_average(same, w).same_rotation(q, 1e-12));
  const std::vector<Quaternion> flipped{q, -q};
  const std::vector<double> w2{1.0, 1.0};
  EXPECT_TRUE(quat_average(flipped, w2).same_rotation(q, 1e-12));
}

TEST(QuatAverage, MatchesIndependentEigensolver) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Quaternion center = random_quat(rng);
    std::vector<Quaternion> qs;
    std::vector<double> ws;
    Mat4 a = Mat4::Zero();
    for (int i = 0; i < 12; ++i) {
      Quaternion q = center * RotationVector(random_vec(rng, 0.2)).to_quaternion();
      if (i % 3 == 0) q = -q;
      const double w = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
      qs.push_back(q);
      ws.push_back(w);
      a += w * q.coeffs() * q.coeffs().transpose();
    }
    // General (non-symmetric) solver as the oracle.
    Eigen::EigenSolver<Mat4> es(a);
    Eigen::Index best = 0;
    es.eigenvalues().real().maxCoeff(&best);
    Vec4 v = es.eigenvectors().col(best).real().normalized();
    if (v.dot(qs[0].coeffs()) < 0) v = -v;
    const Quaternion avg = quat_average(qs, ws);
    EXPECT_LE((avg.coeffs() - v).norm(), 1e-10);
    expect_unit(avg);

    // Invariance under sign flips and uniform weight scaling.
    std::vector<Quaternion> qf(qs);
    std::vector<double> wf(ws);
    for (std::size_t i = 1; i < qf.size(); i += 2) qf[i] = -qf[i];
    for (double& w : wf) w *= 7.5;
    EXPECT_TRUE(quat_average(qf, wf).same_rotation(avg, 1e-12));
  }
}

TEST(QuatAverage, AmbiguousAndInvalidInput) {
  const Quaternion a = Quaternion::identity();
  const Quaternion b = Quaternion::from_axis_angle(Vec3::UnitZ(), kPi);
  const std::vector<Quaternion> qs{a, b};
  const std::vector<double> w{1.0, 1.0};
  EXPECT_THROW(quat_average(qs, w), AmbiguousAverage);
  const std::vector<double> neg{1.0, -1.0};
  EXPECT_THROW(quat_average(qs, neg), std::invalid_argument);
  const std::vector<double> one{1.0};
  EXPECT_THROW(quat_average(qs, one), std::invalid_argument);
}

TEST(Euler, RoundTripAndConvention) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    EulerAngles e{u(rng) * 1.5, u(rng) * 3.1, u(rng) * 3.1};
    const EulerAngles back = euler_from_quat(quat_from_euler(e));
    EXPECT_NEAR(back.pitch, e.pitch, 1e-10);
    EXPECT_NEAR(back.roll, e.roll, 1e-10);
    EXPECT_NEAR(back.yaw, e.yaw, 1e-10);
    EXPECT_LE((dcm_from_euler(e) - dcm_from_quat(quat_from_euler(e))).norm(), 1e-12);
  }
  // Yaw is counter-clockwise about up; forward (body y) points north at zero yaw.
  const EulerAngles west{0.0, 0.0, kPi / 2};
  EXPECT_LE((dcm_from_euler(west) * Vec3::UnitY() - Vec3(-1, 0, 0)).norm(), 1e-15);
  // Positive pitch raises the nose.
  const EulerAngles up{0.1, 0.0, 0.0};
  EXPECT_GT((dcm_from_euler(up) * Vec3::UnitY()).z(), 0.0);
}

TEST(Euler, WrapPi) {
  EXPECT_DOUBLE_EQ(wrap_pi(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_pi(-kPi), kPi);
  EXPECT_NEAR(wrap_pi(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_pi(207.81 * kDeg), (207.81 - 360.0) * kDeg, 1e-12);
}

TEST(Skew, CrossProduct) {
  std::mt19937_64 rng(10);
  const Vec3 a = random_vec(rng), b = random_vec(rng);
  EXPECT_LE((skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(AngleBetween, KnownAngle) {
  const Quaternion a = Quaternion::from_axis_angle(Vec3::UnitX(), 0.25);
  EXPECT_NEAR(angle_between(Quaternion::identity(), a), 0.25, 1e-15);
  EXPECT_NEAR(angle_between(a, -a), 0.0, 1e-7);
  EXPECT_NEAR(rotation_angle(Mat3::Identity(), dcm_from_quat(a)), 0.25, 1e-15);
}
