#include "oba/sensors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "oba/error.hpp"

namespace oba {

void SensorSpec::validate() const {
  if (!(gyro_arw >= 0.0 && gyro_rrw >= 0.0 && accel_vrw >= 0.0)) {
    throw ConfigError("sensors", "noise densities must be non-negative");
  }
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate", "must be positive");
  if (!gyro_bias.allFinite() || !accel_bias.allFinite()) throw ConfigError("sensors", "non-finite bias");
}

SensorSpec sensor_preset(SensorGrade grade) {
  constexpr double kMicroG = 9.80665e-6;
  SensorSpec s;
  s.sample_rate = 100.0;
  switch (grade) {
    case SensorGrade::kIdeal:
      break;
    case SensorGrade::kNavigation:
      s.gyro_bias = Vec3::Constant(0.05 * kDegPerHour);
      s.gyro_arw = 0.002 * kDeg / 60.0;          // 0.002 deg/sqrt(h)
      s.gyro_rrw = 0.001 * kDegPerHour;          // 0.01 deg/h after 100 s
      s.accel_bias = Vec3::Constant(50.0 * kMicroG);
      s.accel_vrw = 10.0 * kMicroG;              // 10 ug/sqrt(Hz)
      break;
    case SensorGrade::kLow:
      s.gyro_bias = Vec3::Constant(0.5 * kDeg);
      s.gyro_arw = 0.3 * kDeg / 60.0;            // 0.3 deg/sqrt(h)
      s.gyro_rrw = 0.02 * kDeg / std::sqrt(250.0);  // 0.02 deg/s after 250 s
      s.accel_bias = Vec3::Constant(5000.0 * kMicroG);
      s.accel_vrw = 100.0 * kMicroG;             // 100 ug/sqrt(Hz)
      break;
  }
  return s;
}

namespace {

Vec3 draw(std::mt19937_64& rng, std::normal_distribution<double>& n) {
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return {x, y, z};
}

std::size_t decimation(std::span<const NavTruthState> truth, double rate) {
  if (truth.size() < 2) return 1;
  const double truth_rate = 1.0 / (truth[1].time - truth[0].time);
  const double ratio = truth_rate / rate;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-6) {
    throw ConfigError("sample_rate", "truth rate must be an integer multiple of the IMU rate");
  }
  return k;
}

}  // namespace

std::vector<ImuSample> synthesize_imu(std::span<const NavTruthState> truth, const SensorSpec& spec,
                                      std::uint64_t seed, std::vector<Vec3>* bias_trace) {
  spec.validate();
  const std::size_t step = decimation(truth, spec.sample_rate);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqrt_rate = std::sqrt(spec.sample_rate);
  const double dt = 1.0 / spec.sample_rate;

  std::vector<ImuSample> out;
  out.reserve(truth.size() / step + 1);
  Vec3 bias = spec.gyro_bias;
  if (bias_trace) bias_trace->clear();
  for (std::size_t i = 0; i < truth.size(); i += step) {
    const NavTruthState& s = truth[i];
    ImuSample m;
    m.time = s.time;
    const Vec3 nv = draw(rng, normal);
    const Vec3 na = draw(rng, normal);
    const Vec3 nu = draw(rng, normal);
    m.gyro = s.body_rate + bias + spec.gyro_arw * sqrt_rate * nv;
    m.accel = s.specific_force + spec.accel_bias + spec.accel_vrw * sqrt_rate * na;
    if (bias_trace) bias_trace->push_back(bias);
    bias += spec.gyro_rrw * std::sqrt(dt) * nu;
    out.push_back(m);
  }
  return out;
}

std::vector<GnssSample> synthesize_gnss(std::span<const NavTruthState> truth, const GnssSpec& spec,
                                        std::uint64_t seed) {
  if (!(spec.rate > 0.0)) throw ConfigError("gnss_rate", "must be positive");
  const std::size_t step = decimation(truth, spec.rate);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<GnssSample> out;
  for (std::size_t i = 0; i < truth.size(); i += step) {
    const NavTruthState& s = truth[i];
    GnssSample g;
    g.time = s.time;
    g.velocity = s.velocity + spec.velocity_noise * draw(rng, normal);
    const Vec3 dp = spec.position_noise * draw(rng, normal);
    const EarthRadii r = earth_radii(s.position.latitude);
    g.position = s.position;
    g.position.latitude += dp.y() / (r.meridian + s.position.height);
    g.position.longitude += dp.x() / ((r.prime_vertical + s.position.height) * std::cos(s.position.latitude));
    g.position.height += dp.z();
    out.push_back(g);
  }
  return out;
}

std::pair<Vec3, GeodeticPosition> interpolate_gnss(std::span<const GnssSample> samples, double t) {
  constexpr double kTol = 1e-9;
  if (samples.empty() || t < samples.front().time - kTol || t > samples.back().time + kTol) {
    throw DataError("GNSS interpolation outside the sampled range at t = " + std::to_string(t));
  }
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double v, const GnssSample& g) { return v < g.time; });
  if (it == samples.begin()) ++it;
  if (it == samples.end()) --it;
  const GnssSample& b = *it;
  const GnssSample& a = *(it - 1);
  if (std::abs(t - a.time) <= kTol) return {a.velocity, a.position};
  if (std::abs(t - b.time) <= kTol) return {b.velocity, b.position};
  const double u = (t - a.time) / (b.time - a.time);
  GeodeticPosition p;
  p.latitude = a.position.latitude + u * (b.position.latitude - a.position.latitude);
  p.longitude = a.position.longitude + u * (b.position.longitude - a.position.longitude);
  p.height = a.position.height + u * (b.position.height - a.position.height);
  return {a.velocity + u * (b.velocity - a.velocity), p};
}

// CSV ------------------------------------------------------------------------

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header) : out_(path) {
    if (!out_) throw DataError("cannot open for writing: " + path.string());
    out_ << header << '\n';
  }

  CsvWriter& operator<<(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (!first_) out_ << ',';
    out_.write(buf, res.ptr - buf);
    first_ = false;
    return *this;
  }
  CsvWriter& operator<<(const Vec3& v) { return *this << v.x() << v.y() << v.z(); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  std::ofstream out_;
  bool first_ = true;
};

std::vector<std::vector<double>> read_table(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw DataError(path.string() + ": expected header '" + std::string(header) + "'");
  }
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(columns);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
      }
      row.push_back(v);
      if (ptr == end) break;
      if (*ptr != ',') throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected ','");
      p = ptr + 1;
    }
    if (row.size() != columns) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                      " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_imu_csv(const std::filesystem::path& path, std::span<const ImuSample> samples) {
  CsvWriter w(path, kImuCsvHeader);
  for (const auto& s : samples) {
    w << s.time << s.gyro << s.accel;
    w.end_row();
  }
}

void write_gnss_csv(const std::filesystem::path& path, std::span<const GnssSample> samples) {
  CsvWriter w(path, kGnssCsvHeader);
  for (const auto& s : samples) {
    w << s.time << s.velocity << s.position.latitude << s.position.longitude << s.position.height;
    w.end_row();
  }
}

void write_truth_csv(const std::filesystem::path& path, std::span<const NavTruthState> truth) {
  CsvWriter w(path, kTruthCsvHeader);
  for (const auto& s : truth) {
    const Vec4& q = s.attitude.coeffs();
    w << s.time << q[0] << q[1] << q[2] << q[3] << s.velocity << s.position.latitude << s.position.longitude
      << s.position.height << s.body_rate << s.specific_force;
    w.end_row();
  }
}

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path) {
  std::vector<ImuSample> out;
  for (const auto& r : read_table(path, kImuCsvHeader)) {
    out.push_back({r[0], Vec3(r[1], r[2], r[3]), Vec3(r[4], r[5], r[6])});
  }
  return out;
}

std::vector<GnssSample> read_gnss_csv(const std::filesystem::path& path) {
  std::vector<GnssSample> out;
  for (const auto& r : read_table(path, kGnssCsvHeader)) {
    out.push_back({r[0], Vec3(r[1], r[2], r[3]), GeodeticPosition{r[4], r[5], r[6]}});
  }
  return out;
}

std::vector<NavTruthState> read_truth_csv(const std::filesystem::path& path) {
  std::vector<NavTruthState> out;
  for (const auto& r : read_table(path, kTruthCsvHeader)) {
    NavTruthState s;
    s.time = r[0];
    s.attitude = Quaternion::from_coeffs(Vec4(r[1], r[2], r[3], r[4]));
    s.velocity = Vec3(r[5], r[6], r[7]);
    s.position = GeodeticPosition{r[8], r[9], r[10]};
    s.body_rate = Vec3(r[11], r[12], r[13]);
    s.specific_force = Vec3(r[14], r[15], r[16]);
    out.push_back(s);
  }
  return out;
}

}  // namespace oba
