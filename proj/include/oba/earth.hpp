#pragma once

// WGS-84 earth model in an East-North-Up navigation frame.

#include "oba/attitude.hpp"

namespace oba {

namespace wgs84 {
inline constexpr double kSemiMajor = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kEcc2 = kFlattening * (2.0 - kFlattening);
inline constexpr double kEarthRate = 7.292115e-5;  // rad/s
inline constexpr double kGm = 3.986004418e14;
inline constexpr double kGammaEquator = 9.7803253359;
inline constexpr double kSomiglianaK = 0.00193185265241;
}  // namespace wgs84

struct GeodeticPosition {
  double latitude = 0.0;   // rad
  double longitude = 0.0;  // rad
  double height = 0.0;     // m

  /// Throws DataError when |latitude| > pi/2 or height <= -1000 m.
  void validate() const;
};

/// Meridian (R_M) and prime-vertical (R_N) radii of curvature.
struct EarthRadii {
  double meridian;
  double prime_vertical;
};
EarthRadii earth_radii(double latitude);

/// Normal gravity magnitude: Somigliana closed form with the second-order
/// free-air height correction.
double normal_gravity(const GeodeticPosition& pos);

/// (0, 0, -gamma) in ENU.
Vec3 gravity_n(const GeodeticPosition& pos);

/// (0, W cos L, W sin L).
Vec3 earth_rate_n(const GeodeticPosition& pos);

/// (-vN/(R_M+h), vE/(R_N+h), vE tan L/(R_N+h)). Throws DataError above
/// 89.9 deg latitude.
Vec3 transport_rate_n(const Vec3& v_enu, const GeodeticPosition& pos);

/// Geodetic position rates (lat, lon, h) for an ENU velocity.
Vec3 position_rate(const Vec3& v_enu, const GeodeticPosition& pos);

}  // namespace oba
