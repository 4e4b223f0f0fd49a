#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "oba/error.hpp"
#include "oba/harness.hpp"

namespace oba {

namespace pt = boost::property_tree;

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kQFull:
      return "q-full";
    case Method::kQPartial:
      return "q-partial";
    case Method::kFilterFull:
      return "filter-full";
    case Method::kFilterPartial:
      return "filter-partial";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

constexpr double kMicroG = 9.80665e-6;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario",
       {"profile", "duration", "seed", "radius", "speed", "speed_amplitude", "speed_period", "acceleration", "max_speed", "latitude_deg",
        "longitude_deg", "height", "pitch_deg", "roll_deg", "yaw_deg"}},
      {"sensors",
       {"grade", "bias_mode", "rate", "gyro_bias_deg_h", "gyro_arw_deg_rt_h", "gyro_rrw_deg_h_rt_s",
        "accel_bias_ug", "accel_vrw_ug_rt_hz", "gnss_rate", "gnss_velocity_noise", "gnss_position_noise"}},
      {"methods", {"run", "window", "update_interval", "pair_weight"}},
      {"filter",
       {"kappa", "sigma_weights", "grp_a", "grp_f", "init_epochs", "init_attitude_deg", "init_bias_deg_h",
        "r_white", "r_bias", "r_gyro", "condition_limit", "bias_corrected_pairs"}},
      {"output", {"dir"}},
      {"logs", {"imu", "gnss", "truth"}},
  };
  return keys;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Strips trailing "# ..." / "; ..." comments, which the INI reader keeps.
std::string strip_comment(const std::string& v) {
  const auto pos = v.find_first_of("#;");
  return trim(pos == std::string::npos ? v : v.substr(0, pos));
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> text(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return strip_comment(*v);
  }

  std::optional<double> number(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(*t, &used);
      if (used != t->size() || !std::isfinite(v)) throw std::invalid_argument(*t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + *t + "'");
    }
  }

  std::optional<long long> integer(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(*t, &used);
      if (used != t->size()) throw std::invalid_argument(*t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected an integer, got '" + *t + "'");
    }
  }

  double positive(const std::string& key, double fallback) const {
    const double v = number(key).value_or(fallback);
    if (!(v > 0.0)) throw ConfigError(key, "must be positive");
    return v;
  }

  double non_negative(const std::string& key, double fallback) const {
    const double v = number(key).value_or(fallback);
    if (!(v >= 0.0)) throw ConfigError(key, "must be non-negative");
    return v;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end() || body.empty()) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

MotionProfile parse_profile(const Reader& r) {
  const std::string name = r.text("scenario.profile").value_or("circle");
  if (name == "stationary") return profile::Stationary{};
  if (name == "straight") {
    profile::StraightAccelerate p;
    p.acceleration = r.positive("scenario.acceleration", p.acceleration);
    p.max_speed = r.positive("scenario.max_speed", p.max_speed);
    return p;
  }
  if (name == "circle") {
    profile::Circle p;
    p.radius = r.positive("scenario.radius", p.radius);
    p.speed = r.positive("scenario.speed", p.speed);
    p.speed_amplitude = r.non_negative("scenario.speed_amplitude", p.speed_amplitude);
    p.speed_period = r.positive("scenario.speed_period", p.speed_period);
    if (!(p.speed_amplitude < p.speed)) throw ConfigError("scenario.speed_amplitude", "must be below speed");
    return p;
  }
  if (name == "swaying") return profile::Swaying{};
  throw ConfigError("scenario.profile", "unknown profile '" + name + "'");
}

}  // namespace

std::optional<SensorGrade> parse_grade(std::string_view name) {
  if (name == "ideal") return SensorGrade::kIdeal;
  if (name == "navigation") return SensorGrade::kNavigation;
  if (name == "low") return SensorGrade::kLow;
  return std::nullopt;
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed configuration: ") + e.message() + " (line " +
                              std::to_string(e.line()) + ")");
  }
  check_keys(tree);
  const Reader r(tree);
  RunConfig cfg;

  cfg.trajectory.motion = parse_profile(r);
  cfg.duration = r.positive("scenario.duration", cfg.duration);
  if (auto s = r.integer("scenario.seed")) {
    if (*s < 0) throw ConfigError("scenario.seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(*s);
  }
  cfg.trajectory.start.latitude = r.number("scenario.latitude_deg").value_or(30.5) * kDeg;
  cfg.trajectory.start.longitude = r.number("scenario.longitude_deg").value_or(114.3) * kDeg;
  cfg.trajectory.start.height = r.number("scenario.height").value_or(20.0);
  if (std::abs(cfg.trajectory.start.latitude) >= 89.9 * kDeg) {
    throw ConfigError("scenario.latitude_deg", "must be within (-89.9, 89.9)");
  }
  cfg.trajectory.initial_attitude.pitch = r.number("scenario.pitch_deg").value_or(0.0) * kDeg;
  cfg.trajectory.initial_attitude.roll = r.number("scenario.roll_deg").value_or(0.0) * kDeg;
  cfg.trajectory.initial_attitude.yaw = r.number("scenario.yaw_deg").value_or(0.0) * kDeg;

  cfg.grade = r.text("sensors.grade").value_or("navigation");
  const auto grade = parse_grade(cfg.grade);
  if (!grade) throw ConfigError("sensors.grade", "expected ideal, navigation or low");
  cfg.sensors = sensor_preset(*grade);
  const std::string bias_mode = r.text("sensors.bias_mode").value_or("fixed");
  if (bias_mode == "fixed") {
    cfg.bias_mode = BiasMode::kFixed;
  } else if (bias_mode == "random_sign") {
    cfg.bias_mode = BiasMode::kRandomSign;
  } else {
    throw ConfigError("sensors.bias_mode", "expected fixed or random_sign");
  }
  cfg.sensors.sample_rate = r.positive("sensors.rate", cfg.sensors.sample_rate);
  if (auto v = r.number("sensors.gyro_bias_deg_h")) cfg.sensors.gyro_bias = Vec3::Constant(*v * kDegPerHour);
  if (r.number("sensors.gyro_arw_deg_rt_h")) {
    cfg.sensors.gyro_arw = r.non_negative("sensors.gyro_arw_deg_rt_h", 0.0) * kDeg / 60.0;
  }
  if (r.number("sensors.gyro_rrw_deg_h_rt_s")) {
    cfg.sensors.gyro_rrw = r.non_negative("sensors.gyro_rrw_deg_h_rt_s", 0.0) * kDegPerHour;
  }
  if (auto v = r.number("sensors.accel_bias_ug")) cfg.sensors.accel_bias = Vec3::Constant(*v * kMicroG);
  if (r.number("sensors.accel_vrw_ug_rt_hz")) {
    cfg.sensors.accel_vrw = r.non_negative("sensors.accel_vrw_ug_rt_hz", 0.0) * kMicroG;
  }
  cfg.gnss.rate = r.positive("sensors.gnss_rate", cfg.gnss.rate);
  cfg.gnss.velocity_noise = r.non_negative("sensors.gnss_velocity_noise", cfg.gnss.velocity_noise);
  cfg.gnss.position_noise = r.non_negative("sensors.gnss_position_noise", cfg.gnss.position_noise);

  if (auto list = r.text("methods.run")) {
    cfg.methods.clear();
    for (const std::string& name : split_list(*list)) {
      const auto m = parse_method(name);
      if (!m) throw ConfigError("methods.run", "unknown method '" + name + "'");
      if (std::find(cfg.methods.begin(), cfg.methods.end(), *m) != cfg.methods.end()) {
        cfg.warnings.push_back("duplicate method '" + name + "' ignored");
        continue;
      }
      cfg.methods.push_back(*m);
    }
    if (cfg.methods.empty()) throw ConfigError("methods.run", "at least one method is required");
  }
  if (auto w = r.integer("methods.window")) {
    if (*w < 1) throw ConfigError("methods.window", "must be at least 1");
    cfg.window = static_cast<std::size_t>(*w);
  }
  cfg.update_interval = r.positive("methods.update_interval", cfg.update_interval);
  const std::string pair_weight = r.text("methods.pair_weight").value_or("unit");
  if (pair_weight != "unit" && pair_weight != "norm") throw ConfigError("methods.pair_weight", "expected unit or norm");
  cfg.accumulator.scale_by_norm = pair_weight == "norm";

  const double kappa = r.number("filter.kappa").value_or(cfg.ukf.kappa);
  if (!(UkfConfig::n + kappa > 0.0)) throw ConfigError("filter.kappa", "n + kappa must be positive");
  cfg.ukf.kappa = kappa;
  const std::string weights = r.text("filter.sigma_weights").value_or("standard");
  if (weights == "standard") {
    cfg.ukf.weights = SigmaWeights::kStandard;
  } else if (weights == "symmetric") {
    cfg.ukf.weights = SigmaWeights::kSymmetric;
  } else {
    throw ConfigError("filter.sigma_weights", "expected standard or symmetric");
  }
  if (r.number("filter.grp_a") || r.number("filter.grp_f")) {
    const double a = r.number("filter.grp_a").value_or(1.0);
    const double f = r.number("filter.grp_f").value_or(2.0 * (a + 1.0));
    try {
      cfg.ukf.grp = GrpParams(a, f);
    } catch (const ConfigError& e) {
      throw ConfigError("filter." + e.key(), "out of range");
    }
  }
  cfg.ukf.condition_limit = r.positive("filter.condition_limit", cfg.ukf.condition_limit);
  if (auto b = r.text("filter.bias_corrected_pairs")) {
    if (*b == "true") {
      cfg.ukf.bias_corrected_pairs = true;
    } else if (*b == "false") {
      cfg.ukf.bias_corrected_pairs = false;
    } else {
      throw ConfigError("filter.bias_corrected_pairs", "expected true or false");
    }
  }
  if (auto e = r.integer("filter.init_epochs")) {
    if (*e < 1) throw ConfigError("filter.init_epochs", "must be at least 1");
    cfg.init.coarse_epochs = static_cast<std::size_t>(*e);
  }
  cfg.init.attitude_sigma = r.positive("filter.init_attitude_deg", cfg.init.attitude_sigma / kDeg) * kDeg;
  cfg.init.bias_sigma = r.non_negative("filter.init_bias_deg_h", cfg.sensors.gyro_bias.cwiseAbs().maxCoeff() /
                                                                     kDegPerHour) *
                        kDegPerHour;
  if (r.number("filter.r_white")) cfg.r_white = r.non_negative("filter.r_white", 0.0);
  if (r.number("filter.r_bias")) cfg.r_bias = r.non_negative("filter.r_bias", 0.0);
  if (r.number("filter.r_gyro")) cfg.r_gyro = r.non_negative("filter.r_gyro", 0.0);

  if (auto d = r.text("output.dir")) {
    if (d->empty()) throw ConfigError("output.dir", "must not be empty");
    cfg.output_dir = *d;
  }

  if (tree.get_child_optional("logs")) {
    LogInputs logs;
    auto imu = r.text("logs.imu");
    auto gnss = r.text("logs.gnss");
    if (!imu) throw ConfigError("logs.imu", "required when [logs] is present");
    if (!gnss) throw ConfigError("logs.gnss", "required when [logs] is present");
    logs.imu = *imu;
    logs.gnss = *gnss;
    if (auto t = r.text("logs.truth")) logs.truth = *t;
    cfg.logs = logs;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file " + path.string());
  RunConfig cfg = parse_config(in);
  // Relative log paths are resolved against the configuration file.
  if (cfg.logs) {
    const auto base = path.parent_path();
    for (auto* p : {&cfg.logs->imu, &cfg.logs->gnss, &cfg.logs->truth}) {
      if (!p->empty() && p->is_relative()) *p = base / *p;
    }
  }
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(12);
  std::string profile = "stationary";
  if (std::holds_alternative<profile::Circle>(cfg.trajectory.motion)) {
    const auto& c = std::get<profile::Circle>(cfg.trajectory.motion);
    profile = "circle";
    out << "scenario.radius = " << c.radius << "\nscenario.speed = " << c.speed
        << "\nscenario.speed_amplitude = " << c.speed_amplitude << "\nscenario.speed_period = " << c.speed_period
        << '\n';
  } else if (std::holds_alternative<profile::StraightAccelerate>(cfg.trajectory.motion)) {
    const auto& s = std::get<profile::StraightAccelerate>(cfg.trajectory.motion);
    profile = "straight";
    out << "scenario.acceleration = " << s.acceleration << "\nscenario.max_speed = " << s.max_speed << '\n';
  } else if (std::holds_alternative<profile::Swaying>(cfg.trajectory.motion)) {
    profile = "swaying";
  }
  out << "scenario.profile = " << profile << '\n'
      << "scenario.duration = " << cfg.duration << '\n'
      << "scenario.seed = " << cfg.seed << '\n'
      << "scenario.latitude_deg = " << cfg.trajectory.start.latitude / kDeg << '\n'
      << "scenario.longitude_deg = " << cfg.trajectory.start.longitude / kDeg << '\n'
      << "scenario.height = " << cfg.trajectory.start.height << '\n'
      << "scenario.pitch_deg = " << cfg.trajectory.initial_attitude.pitch / kDeg << '\n'
      << "scenario.roll_deg = " << cfg.trajectory.initial_attitude.roll / kDeg << '\n'
      << "scenario.yaw_deg = " << cfg.trajectory.initial_attitude.yaw / kDeg << '\n'
      << "sensors.grade = " << cfg.grade << '\n'
      << "sensors.bias_mode = " << (cfg.bias_mode == BiasMode::kFixed ? "fixed" : "random_sign") << '\n'
      << "sensors.rate = " << cfg.sensors.sample_rate << '\n'
      << "sensors.gyro_bias_deg_h = " << cfg.sensors.gyro_bias.cwiseAbs().maxCoeff() / kDegPerHour << '\n'
      << "sensors.gyro_arw_deg_rt_h = " << cfg.sensors.gyro_arw * 60.0 / kDeg << '\n'
      << "sensors.gyro_rrw_deg_h_rt_s = " << cfg.sensors.gyro_rrw / kDegPerHour << '\n'
      << "sensors.accel_bias_ug = " << cfg.sensors.accel_bias.cwiseAbs().maxCoeff() / kMicroG << '\n'
      << "sensors.accel_vrw_ug_rt_hz = " << cfg.sensors.accel_vrw / kMicroG << '\n'
      << "sensors.gnss_rate = " << cfg.gnss.rate << '\n'
      << "sensors.gnss_velocity_noise = " << cfg.gnss.velocity_noise << '\n'
      << "sensors.gnss_position_noise = " << cfg.gnss.position_noise << '\n';
  out << "methods.run = ";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) out << (i ? ", " : "") << method_name(cfg.methods[i]);
  out << "\nmethods.window = " << cfg.window << '\n'
      << "methods.update_interval = " << cfg.update_interval << '\n'
      << "methods.pair_weight = " << (cfg.accumulator.scale_by_norm ? "norm" : "unit") << '\n'
      << "filter.kappa = " << cfg.ukf.kappa << '\n'
      << "filter.sigma_weights = " << (cfg.ukf.weights == SigmaWeights::kStandard ? "standard" : "symmetric") << '\n'
      << "filter.grp_a = " << cfg.ukf.grp.a() << '\n'
      << "filter.grp_f = " << cfg.ukf.grp.f() << '\n'
      << "filter.condition_limit = " << cfg.ukf.condition_limit << '\n'
      << "filter.bias_corrected_pairs = " << (cfg.ukf.bias_corrected_pairs ? "true" : "false") << '\n'
      << "filter.init_epochs = " << cfg.init.coarse_epochs << '\n'
      << "filter.init_attitude_deg = " << cfg.init.attitude_sigma / kDeg << '\n'
      << "filter.init_bias_deg_h = " << cfg.init.bias_sigma / kDegPerHour << '\n';
  if (cfg.r_white) out << "filter.r_white = " << *cfg.r_white << '\n';
  if (cfg.r_bias) out << "filter.r_bias = " << *cfg.r_bias << '\n';
  if (cfg.r_gyro) out << "filter.r_gyro = " << *cfg.r_gyro << '\n';
  if (cfg.logs) {
    out << "logs.imu = " << cfg.logs->imu.string() << '\n' << "logs.gnss = " << cfg.logs->gnss.string() << '\n';
    if (!cfg.logs->truth.empty()) out << "logs.truth = " << cfg.logs->truth.string() << '\n';
  }
  return out.str();
}

}  // namespace oba
