#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oba/attitude.hpp"

namespace oba {

enum class Method { kQFull, kQPartial, kFilterFull, kFilterPartial };

inline constexpr Method kAllMethods[] = {Method::kQFull, Method::kQPartial, Method::kFilterFull,
                                         Method::kFilterPartial};

/// "q-full", "q-partial", "filter-full", "filter-partial".
std::string_view method_name(Method m);
/// Inverse of method_name; std::nullopt for an unknown name.
std::optional<Method> parse_method(std::string_view name);

/// Estimate available at the end of one epoch, using data up to `time` only.
struct EpochEstimate {
  double time = 0.0;
  Quaternion attitude;          // C_b^n(time)
  std::optional<Vec3> bias;     // gyro bias, rad/s (filter methods)
  double eigenvalue = 0.0;      // static methods: Wahba gain at the optimum
  double gap = 0.0;             // static methods: lambda_max - lambda_second
  double covariance_trace = 0.0;  // filter methods: trace(P)
};

struct AlignmentRun {
  Method method = Method::kQFull;
  std::vector<EpochEstimate> estimates;  // monotone in time; epochs without a solution are absent
  std::size_t skipped_pairs = 0;         // degenerate or gated observation pairs
  std::size_t skipped_updates = 0;       // ill-conditioned filter updates
  double runtime_seconds = 0.0;
};

}  // namespace oba
