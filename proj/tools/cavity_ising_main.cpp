// cavity-ising <command> --config <path> [--out <dir>] [--jobs <n>] [--dt <x>]

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cavity_ising/config.hpp"
#include "cavity_ising/errors.hpp"
#include "cavity_ising/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoBistability = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace cavity_ising;

  CLI::App app{"Driven cavity coupled to a transverse-field Ising chain"};
  app.set_version_flag("--version", version());
  std::string command_name;
  std::string config_path;
  std::string out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> dt;

  app.add_option("command", command_name,
                 "stationary | bifurcation | phase-diagram | quench | ramp | hysteresis | lz-compare | sweep")
      ->required();
  app.add_option("--config", config_path, "run configuration (INI)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--dt", dt, "integrator step, overrides [integrator] dt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto command = parse_command(command_name);
    if (!command) throw ConfigError("unknown command '" + command_name + "'");
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config " + config_path);
    std::stringstream text;
    text << in.rdbuf();
    RunConfig config = parse_config(text.str(), *command);
    if (dt) {
      config.integrator.dt = *dt;
      try {
        config.integrator.validate();
      } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("--dt: ") + e.what());
      }
    }
    const auto dir = resolve_output_directory(config, out_dir);
    const auto result = execute(config, {dir, jobs});
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationQualityError& e) {
    std::cerr << "numerical quality: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NoBistability& e) {
    std::cerr << "no bistability: " << e.what() << '\n';
    return kExitNoBistability;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
