#pragma once

// Dynamic optimization-based alignment: an unscented quaternion filter
// (quaternion reference, GRP local error) with gyro-bias states, driven by
// the dynamic observation pairs.
//
// State x = [dp; eps]: dp is the GRP of the attitude error about the
// reference q, eps the gyro bias in rad/s.

#include <Eigen/Core>
#include <optional>
#include <span>

#include "oba/alignment.hpp"
#include "oba/attitude.hpp"
#include "oba/observation.hpp"
#include "oba/sensors.hpp"

namespace oba {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

enum class SigmaWeights {
  kStandard,  // center point kappa/(n+kappa), others 1/(2(n+kappa))
  kSymmetric,     // 2n points, 1/(2n) each, spread sqrt(n+kappa)
};

struct UkfConfig {
  GrpParams grp;
  double kappa = -3.0;
  SigmaWeights weights = SigmaWeights::kStandard;
  double condition_limit = 1e12;  // measurement update is skipped above this cond(P_y)
  // Apply each sigma point's bias to alpha through the pair's bias Jacobian.
  // When false alpha comes from the uncorrected gyro chain alone.
  bool bias_corrected_pairs = true;

  static constexpr int n = 6;
  /// Throws ConfigError unless n + kappa > 0.
  void validate() const;
};

struct NoiseConfig {
  Mat6 Q = Mat6::Zero();  // per epoch
  // Measurement covariance for a window of T seconds:
  //   R(T) = (r_white T + r_bias T^2 + r_gyro T^4) I
  double r_white = 0.0;
  double r_bias = 0.0;
  double r_gyro = 0.0;
  std::optional<Mat3> r_override;

  Mat3 measurement_covariance(double window_seconds) const;

  /// Q = diag(arw^2 dt I, rrw^2 dt I); R from the accelerometer white noise,
  /// the accelerometer bias bound, and the gyro bias bound acting on gravity.
  static NoiseConfig from_sensor(const SensorSpec& spec, double epoch_seconds);
};

struct FilterState {
  Vec6 x = Vec6::Zero();
  Mat6 P = Mat6::Identity();
  Quaternion q;
  std::size_t epoch = 0;

  Vec3 grp() const { return x.head<3>(); }
  Vec3 bias() const { return x.tail<3>(); }
};

/// Sigma points and weights for the configured scheme.
struct SigmaSet {
  std::vector<Vec6> points;
  std::vector<double> weights;
};

/// Symmetric square root with eigenvalues clamped at zero. Throws
/// NumericalFailure when an eigenvalue is below -1e-9 * max(1, |lambda|max).
Mat6 symmetric_sqrt(const Mat6& p);

SigmaSet make_sigma_points(const Vec6& mean, const Mat6& cov, const UkfConfig& cfg);

/// Propagates the reference attitude and covariance through one epoch using
/// each sigma point's own bias to correct the gyro samples.
FilterState time_update(const FilterState& state, const EpochInput& epoch, const UkfConfig& cfg,
                        const NoiseConfig& noise);

struct UpdateResult {
  FilterState state;
  bool applied = true;  // false when P_y was too ill-conditioned
  double condition = 0.0;
};

/// Measurement beta_dv = C(q) (alpha_dv + G eps). The pair must be of dynamic kind.
UpdateResult measurement_update(const FilterState& predicted, const ObservationPair& pair, const UkfConfig& cfg,
                                const NoiseConfig& noise);

/// Folds the GRP estimate into the reference quaternion and zeroes it.
FilterState fold_and_reset(const FilterState& posterior, const UkfConfig& cfg);

enum class DynamicMode { kFull, kPartial };

struct DynamicInit {
  std::optional<Quaternion> attitude;  // C_b^n at the first epoch start; coarse static solve when absent
  std::size_t coarse_epochs = 20;      // epochs consumed by the coarse solve
  double attitude_sigma = 10.0 * kDeg;
  double bias_sigma = 0.0;             // rad/s
};

struct DynamicOptions {
  DynamicMode mode = DynamicMode::kPartial;
  std::size_t window = 100;  // partial window in IMU samples
  UkfConfig ukf;
  NoiseConfig noise;
  DynamicInit init;
};

AlignmentRun run_dynamic_alignment(std::span<const EpochInput> epochs, const DynamicOptions& options);

}  // namespace oba
