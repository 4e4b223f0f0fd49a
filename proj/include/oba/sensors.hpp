#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "oba/attitude.hpp"
#include "oba/earth.hpp"
#include "oba/trajectory.hpp"

namespace oba {

/// Inertial sensor error model.
///   gyro:  w~ = w + eps + n_v,  d(eps)/dt = n_u   (eps(0) = gyro_bias)
///   accel: f~ = f + b_a + n_a
/// Densities are continuous-time; the per-sample std is density * sqrt(rate).
struct SensorSpec {
  Vec3 gyro_bias = Vec3::Zero();   // rad/s
  double gyro_arw = 0.0;           // rad/sqrt(s)
  double gyro_rrw = 0.0;           // rad/s^(3/2)
  Vec3 accel_bias = Vec3::Zero();  // m/s^2
  double accel_vrw = 0.0;          // m/s/sqrt(s)
  double sample_rate = 100.0;      // Hz

  void validate() const;
};

enum class SensorGrade { kIdeal, kNavigation, kLow };

/// Bias bounds follow the published grades (navigation: 0.05 deg/h and
/// 50 ug; low: 0.5 deg/s and 0.005 g), applied with a positive sign on every
/// axis. Noise densities are representative values for each class.
SensorSpec sensor_preset(SensorGrade grade);

struct ImuSample {
  double time = 0.0;
  Vec3 gyro = Vec3::Zero();   // rad/s
  Vec3 accel = Vec3::Zero();  // m/s^2
};

struct GnssSample {
  double time = 0.0;
  Vec3 velocity = Vec3::Zero();  // ENU, m/s
  GeodeticPosition position;
};

struct GnssSpec {
  double rate = 1.0;            // Hz
  double velocity_noise = 0.0;  // m/s, 1 sigma per axis
  double position_noise = 0.0;  // m, 1 sigma per axis
};

/// Samples the truth at spec.sample_rate (the truth rate must be an integer
/// multiple of it). Deterministic for a fixed seed. When `bias_trace` is
/// given it receives the gyro bias in effect at every emitted sample.
std::vector<ImuSample> synthesize_imu(std::span<const NavTruthState> truth, const SensorSpec& spec,
                                      std::uint64_t seed, std::vector<Vec3>* bias_trace = nullptr);

std::vector<GnssSample> synthesize_gnss(std::span<const NavTruthState> truth, const GnssSpec& spec,
                                        std::uint64_t seed);

/// Componentwise linear interpolation between the bracketing samples.
/// Throws DataError outside [first, last].
std::pair<Vec3, GeodeticPosition> interpolate_gnss(std::span<const GnssSample> samples, double t);

// CSV logs (SI units, radians, mandatory header row) -------------------------

inline constexpr std::string_view kImuCsvHeader = "time,gx,gy,gz,ax,ay,az";
inline constexpr std::string_view kGnssCsvHeader = "time,ve,vn,vu,lat,lon,h";
inline constexpr std::string_view kTruthCsvHeader = "time,qx,qy,qz,qw,ve,vn,vu,lat,lon,h,wx,wy,wz,fx,fy,fz";

void write_imu_csv(const std::filesystem::path& path, std::span<const ImuSample> samples);
void write_gnss_csv(const std::filesystem::path& path, std::span<const GnssSample> samples);
void write_truth_csv(const std::filesystem::path& path, std::span<const NavTruthState> truth);

/// Readers throw DataError on a missing/mismatched header or malformed row.
std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path);
std::vector<GnssSample> read_gnss_csv(const std::filesystem::path& path);
std::vector<NavTruthState> read_truth_csv(const std::filesystem::path& path);

}  // namespace oba
