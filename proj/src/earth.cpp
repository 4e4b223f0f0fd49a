#include "oba/earth.hpp"

#include <cmath>
#include <string>

#include "oba/error.hpp"

namespace oba {

void GeodeticPosition::validate() const {
  if (!(std::abs(latitude) <= kPi / 2.0)) {
    throw DataError("latitude out of range: " + std::to_string(latitude));
  }
  if (!(height > -1000.0)) {
    throw DataError("height below -1000 m: " + std::to_string(height));
  }
}

EarthRadii earth_radii(double latitude) {
  const double s = std::sin(latitude);
  const double d = 1.0 - wgs84::kEcc2 * s * s;
  const double rn = wgs84::kSemiMajor / std::sqrt(d);
  return {rn * (1.0 - wgs84::kEcc2) / d, rn};
}

double normal_gravity(const GeodeticPosition& pos) {
  using namespace wgs84;
  const double s2 = std::pow(std::sin(pos.latitude), 2);
  const double gamma0 = kGammaEquator * (1.0 + kSomiglianaK * s2) / std::sqrt(1.0 - kEcc2 * s2);
  const double m = kEarthRate * kEarthRate * kSemiMajor * kSemiMajor * (kSemiMajor * (1.0 - kFlattening)) / kGm;
  const double h = pos.height;
  return gamma0 * (1.0 - 2.0 / kSemiMajor * (1.0 + kFlattening + m - 2.0 * kFlattening * s2) * h +
                   3.0 / (kSemiMajor * kSemiMajor) * h * h);
}

Vec3 gravity_n(const GeodeticPosition& pos) { return {0.0, 0.0, -normal_gravity(pos)}; }

Vec3 earth_rate_n(const GeodeticPosition& pos) {
  return {0.0, wgs84::kEarthRate * std::cos(pos.latitude), wgs84::kEarthRate * std::sin(pos.latitude)};
}

Vec3 transport_rate_n(const Vec3& v, const GeodeticPosition& pos) {
  if (std::abs(pos.latitude) > 89.9 * kDeg) {
    throw DataError("transport rate undefined near the pole");
  }
  const EarthRadii r = earth_radii(pos.latitude);
  const double rm = r.meridian + pos.height;
  const double rn = r.prime_vertical + pos.height;
  return {-v.y() / rm, v.x() / rn, v.x() * std::tan(pos.latitude) / rn};
}

Vec3 position_rate(const Vec3& v, const GeodeticPosition& pos) {
  const EarthRadii r = earth_radii(pos.latitude);
  return {v.y() / (r.meridian + pos.height), v.x() / ((r.prime_vertical + pos.height) * std::cos(pos.latitude)),
          v.z()};
}

}  // namespace oba
