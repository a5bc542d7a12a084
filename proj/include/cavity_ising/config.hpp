#pragma once

// Run configuration: an INI-style document with flat sections.
//
//     [model]       j0 bx g kappa delta_c n
//     [integrator]  dt sample_stride method
//     [output]      directory
//
// plus at most one command block ([stationary], [bifurcation],
// [phase-diagram], [quench], [ramp], [hysteresis], [lz-compare], [sweep]).
// A config without a command block takes its command from the command line
// and runs with that command's defaults.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavity_ising/dynamics.hpp"
#include "cavity_ising/stationary.hpp"
#include "cavity_ising/tfim.hpp"

namespace cavity_ising {

enum class Command { stationary, bifurcation, phase_diagram, quench, ramp, hysteresis, lz_compare, sweep };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

struct StationaryBlock {
  std::optional<double> eps;  // roots at this drive; otherwise the whole eps(x_a) curve
  std::optional<XaScan> scan;

  bool operator==(const StationaryBlock&) const = default;
};

/// Axis values as "lo:hi:count" (inclusive, evenly spaced) or a comma list.
struct AxisValues {
  SweepAxis axis = SweepAxis::bx;
  std::vector<double> values;

  bool operator==(const AxisValues&) const = default;
};

struct PhaseDiagramBlock {
  AxisValues axis;
  // Drive grid for the (axis, eps) root-count map; empty means bifurcations only.
  std::vector<double> eps_values;

  bool operator==(const PhaseDiagramBlock&) const = default;
};

struct LzCompareBlock {
  std::vector<double> t_ramps{400.0, 800.0, 1200.0, 1600.0, 2000.0};
  double eps0 = 2.23;
  double epsf = 3.6;
  double park_fraction = 0.2;

  bool operator==(const LzCompareBlock&) const = default;
};

struct SweepBlock {
  AxisValues axis;
  Command command = Command::bifurcation;  // bifurcation, quench or ramp
  QuenchOptions quench;
  RampOptions ramp;

  bool operator==(const SweepBlock&) const = default;
};

struct RunConfig {
  Command command = Command::quench;
  ModelParams model;
  IntegratorConfig integrator;
  std::optional<std::string> output_directory;

  StationaryBlock stationary;
  PhaseDiagramBlock phase_diagram;
  QuenchOptions quench;
  RampOptions ramp;  // also used by hysteresis
  LzCompareBlock lz_compare;
  SweepBlock sweep;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a config document. `command` comes from the command
/// line; it must agree with the command block when both are present. Throws
/// ConfigError naming the offending key or section.
RunConfig parse_config(std::string_view text, std::optional<Command> command = std::nullopt);

/// Fully resolved document: every key written out, doubles in round-trip
/// precision, only the active command block. parse_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& config);

std::vector<double> parse_axis_values(std::string_view text);

}  // namespace cavity_ising
