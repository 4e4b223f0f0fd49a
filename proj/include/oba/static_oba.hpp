#pragma once

// Static optimization-based alignment: Davenport's q-method over the
// accumulated observation pairs, then composition with the attitude chains.

#include <cstddef>
#include <span>
#include <vector>

#include "oba/alignment.hpp"
#include "oba/attitude.hpp"
#include "oba/observation.hpp"

namespace oba {

struct AccumulatorOptions {
  bool normalize = true;        // use unit alpha and beta
  bool scale_by_norm = false;   // multiply the weight by |alpha| (with normalize)
  double median_gate = 0.01;    // zero the weight when |alpha| < gate * running median; 0 disables
};

/// Attitude profile matrix B = sum w beta alpha^T.
class DavenportAccumulator {
 public:
  explicit DavenportAccumulator(AccumulatorOptions options = {}) : options_(options) {}

  /// Adds one pair. Returns the weight actually applied (0 when gated).
  /// Throws DegeneratePair when |alpha| or |beta| < 1e-9, leaving B untouched;
  /// std::invalid_argument for a negative weight.
  double accumulate(const Vec3& alpha, const Vec3& beta, double weight = 1.0);
  double accumulate(const ObservationPair& pair, double weight = 1.0) {
    return accumulate(pair.alpha, pair.beta, weight);
  }

  const Mat3& B() const { return b_; }
  std::size_t count() const { return count_; }
  double total_weight() const { return total_weight_; }
  void reset();

 private:
  AccumulatorOptions options_;
  Mat3 b_ = Mat3::Zero();
  std::size_t count_ = 0;
  double total_weight_ = 0.0;
  std::vector<double> norms_;
};

struct StaticAlignment {
  Quaternion attitude;
  double eigenvalue = 0.0;
  double gap = 0.0;
};

/// Davenport K matrix for the C(q) alpha = beta convention.
Mat4 davenport_matrix(const Mat3& b);

/// Dominant eigenvector of K. Throws RankDeficiency when the gap is at most
/// 1e-9 * total weight (collinear or too few pairs).
StaticAlignment solve(const DavenportAccumulator& acc);
StaticAlignment solve(const Mat3& b, double total_weight);

/// C_b^n(t) = Cn(t)^T C_b^n(0) Cb(t) for the chains at their current sample.
Quaternion reconstruct_attitude(const Quaternion& q0, const ChainState& chains);

/// Same, starting from C_b^n(t_m): the chain products are taken relative to
/// the frames frozen at sample m.
Quaternion reconstruct_from_shifted(const Quaternion& qm, const ChainState& chains, std::size_t m);

/// Quaternion form of the composition, q(t) = qn^* q0 qb.
Quaternion compose_attitude(const Quaternion& q0, const Quaternion& nav_chain, const Quaternion& body_chain);

enum class StaticMode { kFull, kPartial };

struct StaticOptions {
  StaticMode mode = StaticMode::kFull;
  std::size_t window = 100;  // partial window in IMU samples
  AccumulatorOptions accumulator;
};

/// Processes the epochs in order. Full mode accumulates the [0, t] pair of
/// every epoch; partial mode accumulates the [t - window, t] pair of every
/// epoch. Both solve for C_b^n(0) and report the composed current attitude
/// once the accumulator is well conditioned.
AlignmentRun run_static_alignment(std::span<const EpochInput> epochs, const StaticOptions& options);

}  // namespace oba
