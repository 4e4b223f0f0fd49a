// align: command-line front end for the alignment library.
//
//   align run --config <path> [--seed N] [--out DIR]
//   align simulate --profile circle --grade low --duration 250 --out DIR
//   align version
//
// Exit codes: 0 success, 1 configuration or input error, 2 numerical failure.

#include <CLI11.hpp>
#include <cstdint>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "oba/error.hpp"
#include "oba/harness.hpp"
#include "oba/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

int run_command(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out_dir) {
  oba::RunConfig cfg = oba::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (out_dir) cfg.output_dir = *out_dir;
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

  oba::check_output_dir(cfg.output_dir);
  const oba::Comparison cmp = oba::run_comparison(cfg);
  oba::emit_outputs(cmp, cfg, cfg.output_dir);

  int code = kOk;
  for (const auto& r : cmp.results) {
    if (!r.failure) continue;
    std::cerr << "error: " << oba::method_name(r.method) << ": " << *r.failure << '\n';
    code = r.numerical_failure ? kNumericalError : std::max(code, kConfigError);
  }
  for (const auto& s : cmp.summary) {
    std::cout << oba::method_name(s.method) << ": pitch " << s.error.x() << "' roll " << s.error.y() << "' yaw "
              << s.error.z() << "'" << (s.converged ? "" : " (not converged)") << '\n';
  }
  return code;
}

int simulate_command(const std::string& profile, const std::string& grade, double duration, std::uint64_t seed,
                     const std::string& out_dir) {
  std::istringstream text("[scenario]\nprofile = " + profile + "\nduration = " + std::to_string(duration) +
                          "\nseed = " + std::to_string(seed) + "\n[sensors]\ngrade = " + grade + "\n");
  oba::RunConfig cfg = oba::parse_config(text);
  oba::check_output_dir(out_dir);
  const oba::ScenarioData data = oba::build_scenario(cfg);
  const std::filesystem::path dir(out_dir);
  oba::write_imu_csv(dir / "imu.csv", data.imu);
  oba::write_gnss_csv(dir / "gnss.csv", data.gnss);
  oba::write_truth_csv(dir / "truth.csv", data.truth);
  std::cout << "wrote " << data.imu.size() << " IMU, " << data.gnss.size() << " GNSS and " << data.truth.size()
            << " truth samples to " << dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimization-based initial alignment for strapdown inertial navigation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the method comparison described by a configuration file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Override the output directory");

  auto* sim = app.add_subcommand("simulate", "Write synthetic IMU, GNSS and truth logs");
  std::string profile = "circle";
  std::string grade = "low";
  double duration = 250.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  sim->add_option("--profile", profile, "stationary, straight, circle or swaying")->capture_default_str();
  sim->add_option("--grade", grade, "ideal, navigation or low")->capture_default_str();
  sim->add_option("--duration", duration, "Seconds")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Noise seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output directory")->required();

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return run_command(config_path, seed, out_dir);
    if (*sim) return simulate_command(profile, grade, duration, sim_seed, sim_out);
    std::cout << "align " << oba::kVersion << '\n';
    return kOk;
  } catch (const oba::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const oba::DataError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const oba::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}
