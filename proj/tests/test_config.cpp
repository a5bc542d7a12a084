#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cavity_ising/config.hpp"
#include "cavity_ising/errors.hpp"
#include "cavity_ising/runner.hpp"
#include "property.hpp"

using namespace cavity_ising;
using cavity_ising::testing::Gen;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text, std::optional<Command> command = std::nullopt) {
  try {
    parse_config(text, command);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cavity_ising_config_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(ParseConfig, ModelOnlyQuenchGetsDefaults) {
  const auto c = parse_config("[model]\nbx = 1.95\n", Command::quench);
  EXPECT_EQ(c.command, Command::quench);
  EXPECT_EQ(c.model, ModelParams{});
  EXPECT_DOUBLE_EQ(c.quench.delta_eps, 0.01);
  EXPECT_DOUBLE_EQ(c.quench.t_total, 400.0);
  EXPECT_DOUBLE_EQ(c.integrator.dt, 0.005);
  EXPECT_EQ(c.model.n, 120);
  EXPECT_DOUBLE_EQ(c.ramp.park_fraction, 0.2);
  EXPECT_FALSE(c.output_directory);
}

TEST(ParseConfig, OddChainRejected) {
  const auto message = error_of("[model]\nn = 121\n[quench]\n");
  EXPECT_NE(message.find("n must be even"), std::string::npos) << message;
}

TEST(ParseConfig, TwoCommandBlocksRejected) {
  EXPECT_FALSE(error_of("[quench]\n[ramp]\n").empty());
}

TEST(ParseConfig, MissingCommandBlock) {
  const auto message = error_of("[model]\nbx = 2\n");
  EXPECT_NE(message.find("missing command block"), std::string::npos) << message;
}

TEST(ParseConfig, UnknownKeyNamed) {
  const auto message = error_of("[model]\nbx = 2\nfield = 3\n[quench]\n");
  EXPECT_NE(message.find("field"), std::string::npos) << message;
  EXPECT_NE(error_of("[quench]\ndelta = 0.1\n").find("delta"), std::string::npos);
  EXPECT_NE(error_of("[quench]\n[extras]\n").find("extras"), std::string::npos);
  EXPECT_NE(error_of("top = 1\n[quench]\n").find("top"), std::string::npos);
}

TEST(ParseConfig, CommandMismatch) {
  EXPECT_FALSE(error_of("[ramp]\n", Command::quench).empty());
  EXPECT_NO_THROW(parse_config("[ramp]\n", Command::ramp));
}

TEST(ParseConfig, BadValues) {
  EXPECT_FALSE(error_of("[model]\ng = abc\n[quench]\n").empty());
  EXPECT_FALSE(error_of("[model]\ng = inf\n[quench]\n").empty());
  EXPECT_FALSE(error_of("[model]\nkappa = -1\n[quench]\n").empty());
  EXPECT_FALSE(error_of("[integrator]\ndt = 0\n[quench]\n").empty());
  EXPECT_FALSE(error_of("[integrator]\nmethod = euler\n[quench]\n").empty());
  EXPECT_FALSE(error_of("[quench]\norigin = middle\n").empty());
  EXPECT_FALSE(error_of("[ramp]\nt_ramp = -5\n").empty());
  EXPECT_FALSE(error_of("[sweep]\naxis = j0\nvalues = 1,2\n").empty());
  EXPECT_FALSE(error_of("[sweep]\naxis = bx\n").empty());
  EXPECT_FALSE(error_of("[sweep]\naxis = bx\nvalues = 1:2\n").empty());
  EXPECT_FALSE(error_of("[sweep]\naxis = bx\nvalues = 1,2\ncommand = hysteresis\n").empty());
  EXPECT_FALSE(error_of("[stationary]\nxa_min = 5\nxa_max = 1\n").empty());
}

TEST(ParseConfig, SweepBlock) {
  const auto c = parse_config("[sweep]\naxis = bx\nvalues = 1.5:2.4:10\ncommand = bifurcation\n");
  EXPECT_EQ(c.command, Command::sweep);
  EXPECT_EQ(c.sweep.axis.axis, SweepAxis::bx);
  ASSERT_EQ(c.sweep.axis.values.size(), 10u);
  EXPECT_DOUBLE_EQ(c.sweep.axis.values.front(), 1.5);
  EXPECT_DOUBLE_EQ(c.sweep.axis.values.back(), 2.4);
  EXPECT_NEAR(c.sweep.axis.values[1], 1.6, 1e-15);
}

TEST(ParseAxisValues, ListAndRange) {
  EXPECT_EQ(parse_axis_values("1, 2.5,3"), (std::vector<double>{1.0, 2.5, 3.0}));
  EXPECT_EQ(parse_axis_values("2:2:1"), (std::vector<double>{2.0}));
  EXPECT_THROW(parse_axis_values("1:2:0"), ConfigError);
  EXPECT_THROW(parse_axis_values(""), ConfigError);
}

// Property: random configs survive a trip through the resolved text.
TEST(ConfigText, RoundTrip) {
  Gen gen(51);
  const Command commands[] = {Command::stationary, Command::bifurcation, Command::phase_diagram,
                              Command::quench,     Command::ramp,        Command::hysteresis,
                              Command::lz_compare, Command::sweep};
  for (int c = 0; c < 80; ++c) {
    RunConfig cfg;
    cfg.command = commands[c % 8];
    cfg.model.bx = gen.uniform(0.5, 3.0);
    cfg.model.g = gen.uniform(0.0, 0.1);
    cfg.model.kappa = gen.uniform(0.01, 0.2);
    cfg.model.delta_c = gen.uniform(-0.2, -0.01);
    cfg.model.j0 = gen.uniform(0.5, 2.0);
    cfg.model.n = gen.even(4, 400);
    cfg.integrator.dt = gen.uniform(1e-4, 0.05);
    cfg.integrator.sample_stride = gen.integer(1, 500);
    cfg.integrator.method = gen.integer(0, 1) ? IntegratorMethod::rk4 : IntegratorMethod::gauss4;
    if (gen.integer(0, 1)) cfg.output_directory = "runs/out " + std::to_string(c);
    switch (cfg.command) {
      case Command::stationary:
        if (gen.integer(0, 1)) cfg.stationary.eps = gen.uniform(0, 5);
        if (gen.integer(0, 1)) cfg.stationary.scan = XaScan{gen.uniform(-20, 0), gen.uniform(10, 200), gen.integer(2, 9000)};
        break;
      case Command::phase_diagram:
        cfg.phase_diagram.axis = {SweepAxis::delta_c, {gen.uniform(-0.1, -0.05), gen.uniform(-0.05, -0.01)}};
        if (gen.integer(0, 1)) cfg.phase_diagram.eps_values = {gen.uniform(2, 3), gen.uniform(3, 4)};
        break;
      case Command::quench:
        cfg.quench = {gen.uniform(1e-3, 0.1), gen.uniform(10, 1000),
                      gen.integer(0, 1) ? QuenchOrigin::fold : QuenchOrigin::centered};
        break;
      case Command::ramp:
      case Command::hysteresis:
        cfg.ramp = {gen.uniform(1, 3), gen.uniform(3, 4), gen.uniform(10, 3000), gen.uniform(0, 1)};
        break;
      case Command::lz_compare:
        cfg.lz_compare.t_ramps = {gen.uniform(100, 500), gen.uniform(500, 900), gen.uniform(900, 3000)};
        cfg.lz_compare.eps0 = gen.uniform(1, 3);
        break;
      case Command::sweep:
        cfg.sweep.axis = {SweepAxis::kappa, {gen.uniform(0.01, 0.1)}};
        cfg.sweep.command = gen.integer(0, 1) ? Command::quench : Command::ramp;
        cfg.sweep.quench.t_total = gen.uniform(10, 500);
        cfg.sweep.ramp.epsf = gen.uniform(3, 4);
        break;
      case Command::bifurcation:
        break;
    }
    const std::string text = to_config_text(cfg);
    EXPECT_EQ(parse_config(text), cfg) << text;
    EXPECT_EQ(parse_config(text, cfg.command), cfg);
    EXPECT_EQ(to_config_text(parse_config(text)), text);
  }
}

TEST(Execute, BifurcationAtDefaults) {
  const auto dir = scratch("bifurcation");
  const auto cfg = parse_config("[bifurcation]\n");
  execute(cfg, {dir, 1});
  std::istringstream csv(slurp(dir / "bifurcation.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "axis_value,eps1,eps2,x_a1,x_a2,b_eff1,b_eff2");
  std::vector<double> cells;
  std::stringstream r(row);
  for (std::string cell; std::getline(r, cell, ',');) cells.push_back(std::stod(cell));
  ASSERT_EQ(cells.size(), 7u);
  EXPECT_NEAR(cells[2], 3.36, 0.02);
}

TEST(Execute, ManifestRoundTripsConfig) {
  const auto dir = scratch("manifest");
  const auto cfg = parse_config("[model]\ng = 0.021\n[integrator]\nsample_stride = 50\n[stationary]\neps = 3.3\n");
  const auto result = execute(cfg, {dir, 2});
  ASSERT_FALSE(result.files.empty());
  EXPECT_EQ(result.files.back().filename(), "manifest.json");
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["version"], version());
  EXPECT_EQ(manifest["command"], "stationary");
  EXPECT_TRUE(manifest["wall_time_seconds"].is_number());
  EXPECT_EQ(parse_config(manifest["config"].get<std::string>()), cfg);
  EXPECT_EQ(slurp(dir / "stationary.csv").substr(0, 34), "x_a,eps,b_eff,x_avg,slope,stable\n3");
}

TEST(Execute, SweepIsDeterministicAcrossWorkerCounts) {
  const auto cfg = parse_config("[sweep]\naxis = bx\nvalues = 1.5:2.4:10\ncommand = bifurcation\n");
  const auto a = scratch("sweep_a");
  const auto b = scratch("sweep_b");
  execute(cfg, {a, 1});
  execute(cfg, {b, 4});
  EXPECT_EQ(slurp(a / "bifurcation.csv"), slurp(b / "bifurcation.csv"));
  std::istringstream csv(slurp(a / "bifurcation.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 10);
}

TEST(Execute, SweepQuenchRowsWithoutWindowAreData) {
  const auto dir = scratch("sweep_quench");
  const auto cfg =
      parse_config("[sweep]\naxis = g\nvalues = 0,0.02\ncommand = quench\nt_total = 20\n");
  execute(cfg, {dir, 2});
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(manifest["results"]["row_errors"].contains("0"));
  EXPECT_FALSE(manifest["results"]["row_errors"].contains("1"));
  EXPECT_TRUE(fs::exists(dir / "rows" / "trajectory_001.csv"));
  EXPECT_FALSE(fs::exists(dir / "rows" / "trajectory_000.csv"));
}

TEST(Execute, NumberFormat) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(NAN), "nan");
  EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
}

TEST(ResolveOutputDirectory, Precedence) {
  RunConfig cfg;
  ::unsetenv("CAVITY_ISING_OUT");
  EXPECT_EQ(resolve_output_directory(cfg, ""), fs::path(kDefaultOutputDirectory));
  cfg.output_directory = "from-config";
  EXPECT_EQ(resolve_output_directory(cfg, ""), fs::path("from-config"));
  ::setenv("CAVITY_ISING_OUT", "from-env", 1);
  EXPECT_EQ(resolve_output_directory(cfg, ""), fs::path("from-env"));
  EXPECT_EQ(resolve_output_directory(cfg, "from-flag"), fs::path("from-flag"));
  ::unsetenv("CAVITY_ISING_OUT");
}
