#include "oba/static_oba.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "oba/error.hpp"

namespace oba {

void DavenportAccumulator::reset() {
  b_.setZero();
  count_ = 0;
  total_weight_ = 0.0;
  norms_.clear();
}

double DavenportAccumulator::accumulate(const Vec3& alpha, const Vec3& beta, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("pair weight must be non-negative");
  const double na = alpha.norm();
  const double nb = beta.norm();
  if (!(na >= 1e-9) || !(nb >= 1e-9)) throw DegeneratePair("observation vector shorter than 1e-9");

  if (options_.median_gate > 0.0) {
    norms_.push_back(na);
    std::vector<double> tmp(norms_);
    auto mid = tmp.begin() + static_cast<std::ptrdiff_t>(tmp.size() / 2);
    std::nth_element(tmp.begin(), mid, tmp.end());
    if (na < options_.median_gate * *mid) weight = 0.0;
  }
  ++count_;
  if (options_.normalize && options_.scale_by_norm) weight *= na;
  if (weight == 0.0) return 0.0;

  if (options_.normalize) {
    b_ += weight * (beta / nb) * (alpha / na).transpose();
  } else {
    b_ += weight * beta * alpha.transpose();
  }
  total_weight_ += weight;
  return weight;
}

Mat4 davenport_matrix(const Mat3& b) {
  const Mat3 s = b + b.transpose();
  const double sigma = b.trace();
  const Vec3 z(b(2, 1) - b(1, 2), b(0, 2) - b(2, 0), b(1, 0) - b(0, 1));
  Mat4 k;
  k.topLeftCorner<3, 3>() = s - sigma * Mat3::Identity();
  k.topRightCorner<3, 1>() = z;
  k.bottomLeftCorner<1, 3>() = z.transpose();
  k(3, 3) = sigma;
  return k;
}

StaticAlignment solve(const Mat3& b, double total_weight) {
  if (!b.allFinite()) throw NumericalFailure("attitude profile matrix is not finite");
  Eigen::SelfAdjointEigenSolver<Mat4> eig(davenport_matrix(b));
  if (eig.info() != Eigen::Success) throw NumericalFailure("K-matrix eigendecomposition failed");
  const Eigen::Vector4d& lambda = eig.eigenvalues();  // ascending
  const double gap = lambda[3] - lambda[2];
  if (!(gap > 1e-9 * total_weight)) {
    throw RankDeficiency("observation pairs do not determine the attitude", gap);
  }
  StaticAlignment out;
  out.attitude = Quaternion::from_coeffs(eig.eigenvectors().col(3));
  if (out.attitude.w() < 0.0) out.attitude = -out.attitude;
  out.eigenvalue = lambda[3];
  out.gap = gap;
  return out;
}

StaticAlignment solve(const DavenportAccumulator& acc) { return solve(acc.B(), acc.total_weight()); }

Quaternion compose_attitude(const Quaternion& q0, const Quaternion& nav_chain, const Quaternion& body_chain) {
  return nav_chain.conjugate() * q0 * body_chain;
}

Quaternion reconstruct_attitude(const Quaternion& q0, const ChainState& chains) {
  const auto& r = chains.record(chains.index());
  return compose_attitude(q0, r.nav, r.body);
}

Quaternion reconstruct_from_shifted(const Quaternion& qm, const ChainState& chains, std::size_t m) {
  const auto& rm = chains.record(m);
  const auto& rM = chains.record(chains.index());
  return compose_attitude(qm, rm.nav.conjugate() * rM.nav, rm.body.conjugate() * rM.body);
}

AlignmentRun run_static_alignment(std::span<const EpochInput> epochs, const StaticOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (options.window == 0) throw ConfigError("window", "must be at least 1");
  const bool partial = options.mode == StaticMode::kPartial;

  AlignmentRun run;
  run.method = partial ? Method::kQPartial : Method::kQFull;
  ChainState chains(partial ? options.window : 1);
  DavenportAccumulator acc(options.accumulator);

  for (const EpochInput& epoch : epochs) {
    chains.advance(epoch);
    const ObservationPair pair = partial ? build_partial_pair(chains, window_start(chains, options.window))
                                         : build_full_pair(chains);
    try {
      if (acc.accumulate(pair) == 0.0) ++run.skipped_pairs;
    } catch (const DegeneratePair&) {
      ++run.skipped_pairs;
      continue;
    }
    StaticAlignment sol;
    try {
      sol = solve(acc);
    } catch (const RankDeficiency&) {
      continue;
    }
    EpochEstimate e;
    e.time = chains.time();
    e.attitude = reconstruct_attitude(sol.attitude, chains);
    e.eigenvalue = sol.eigenvalue;
    e.gap = sol.gap;
    run.estimates.push_back(e);
  }
  run.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return run;
}

}  // namespace oba
