#pragma once

#include <utility>
#include <vector>

#include "cavity_ising/dynamics.hpp"
#include "cavity_ising/tfim.hpp"

namespace cavity_ising {

/// Landau-Zener excitation probability of the (k, -k) pair for a linear sweep
/// through the critical point: exp(-2 pi J0^2 k^2 / |lambda|). Zero at lambda = 0.
double lz_mode_probability(double k, double lambda, double j0);

struct LZPrediction {
  std::vector<double> p_k;
  double p_g = 1.0;   // prod (1 - P_k)
  double n_ex = 0.0;  // sum P_k
  double lambda = 0.0;
};

LZPrediction lz_ground_probability(double lambda, const KGrid& grid, double j0);

/// Pair count from sigma_x alignment, (N - X) / 4; exact as B/J0 -> infinity.
double nex_sigma_x(const SpinModeState& state, int n);

/// Pair count from z domain walls, (N - C_zz) / 4; exact as B/J0 -> 0.
double nex_sigma_zz(const SpinModeState& state, int n);

enum class ReadoutDirection { to_zero_field, to_strong_field };

inline constexpr double kReadoutWeakField = 0.01;     // in units of J0
inline constexpr double kReadoutStrongField = 100.0;  // in units of J0
inline constexpr double kReadoutPairBudget = 1e-3;

struct ReadoutResult {
  double estimate = 0.0;      // spin-basis estimator after the ramp
  double n_ex_before = 0.0;   // nex_pairs at the starting field
  double n_ex_after = 0.0;    // nex_pairs at the target field
  double start_field = 0.0;
  double target_field = 0.0;
};

/// Ramps the field of the bare chain linearly from the state's B_eff to
/// 0.01 J0 or 100 J0 and applies the matching spin-basis estimator.
/// Refuses ramps that would cross B = J0, and ramps that change the pair count
/// by more than kReadoutPairBudget.
ReadoutResult adiabatic_readout(const SystemState& state, ReadoutDirection direction, double ramp_duration,
                                const ModelParams& params, const IntegratorConfig& cfg);

struct ScalingFit {
  std::vector<std::pair<double, double>> pairs;  // (T, |lambda_c|)
  double coefficient = 0.0;                      // |lambda_c| = coefficient / sqrt(T)
  double max_relative_deviation = 0.0;
  bool anchored = false;                         // coefficient taken from the T = 400 point
};

/// Fits |lambda_c(T)| = c / sqrt(T). With a T = 400 entry, c = 20 |lambda_c(400)|;
/// otherwise c is the least-squares value. Needs >= 3 pairs of one sign.
ScalingFit empirical_lambda_fit(const std::vector<std::pair<double, double>>& pairs);

}  // namespace cavity_ising
