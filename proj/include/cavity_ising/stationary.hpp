#pragma once

// Self-consistent stationary states of the driven cavity + chain.
//
// Eliminating the drive from the stationary cavity equations gives the drive
// as a single-valued function of the cavity displacement,
//
//     eps(x_a) = g X_s(Bx - g x_a) - x_a (Dc^2 + kappa^2/4) / (2 Dc),
//
// so all stationary solutions at a given drive are roots of eps(x_a) - eps and
// the folds of the bistable regime are roots of d eps / d x_a.

#include <complex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "cavity_ising/tfim.hpp"

namespace cavity_ising {

struct XaScan {
  double lo = 0.0;
  double hi = 0.0;
  int samples = 4000;

  bool operator==(const XaScan&) const = default;
};

/// [-10, Bx/g + 10] with 4000 samples.
XaScan default_scan(const ModelParams& params);

struct SecularPair {
  std::complex<double> plus;
  std::complex<double> minus;

  double max_real() const { return std::max(plus.real(), minus.real()); }
};

struct StationaryPoint {
  double x_a = 0.0;
  double p_a = 0.0;
  double eps = 0.0;
  double b_eff = 0.0;
  double x_s = 0.0;
  double slope = 0.0;
  bool stable = false;
  SecularPair secular;
};

/// The two folds of the bistable regime, eps1 < eps2. eps2 terminates the
/// paramagnetic branch (smaller x_a), eps1 the ferromagnetic one.
struct BifurcationResult {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double x_a1 = 0.0;
  double x_a2 = 0.0;
  double b_eff1 = 0.0;
  double b_eff2 = 0.0;
  double x_prime1 = 0.0;
  double x_prime2 = 0.0;
};

/// (Dc^2 + kappa^2/4) / (2 Dc); throws InvalidParameter when Dc == 0.
double cavity_response(const ModelParams& params);

double epsilon_of_xa(double x_a, const ModelParams& params);

/// X' = dX_s/dx_a = -g dX/dB at B = Bx - g x_a.
double x_prime(double x_a, const ModelParams& params);

/// d eps / d x_a = g X' - (Dc^2 + kappa^2/4) / (2 Dc).
double slope_of_xa(double x_a, const ModelParams& params);

SecularPair secular_frequencies(double x_a, const ModelParams& params);

/// Annotates a displacement with everything a stationary point carries; the
/// drive is the one for which x_a is stationary.
StationaryPoint stationary_point_at(double x_a, const ModelParams& params);

/// All stationary points at drive eps, ordered by x_a. The scan-less overload
/// uses default_scan widened to contain the decoupled-cavity root -eps/response.
std::vector<StationaryPoint> stationary_points(double eps, const ModelParams& params, const XaScan& scan);
std::vector<StationaryPoint> stationary_points(double eps, const ModelParams& params);

/// Throws NoBistability when d eps / d x_a keeps its sign over the scan.
BifurcationResult find_bifurcations(const ModelParams& params, const XaScan& scan);
BifurcationResult find_bifurcations(const ModelParams& params);

enum class SweepAxis { bx, delta_c, g, kappa };

std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(std::string_view text);
ModelParams with_axis_value(ModelParams params, SweepAxis axis, double value);

struct PhaseDiagramRow {
  double axis_value = 0.0;
  std::optional<BifurcationResult> bifurcation;  // empty: no bistable regime
};

/// One row per value, in input order. Rows are computed on `jobs` workers.
std::vector<PhaseDiagramRow> phase_diagram(const ModelParams& params, SweepAxis axis,
                                           const std::vector<double>& values, unsigned jobs = 1);

}  // namespace cavity_ising
