#pragma once

// Mean-field time evolution of the driven cavity and the chain.
//
// Cavity quadratures obey
//     dx_a/dt = -Dc p_a - (kappa/2) x_a
//     dp_a/dt =  Dc x_a - (kappa/2) p_a + 2 (eps(t) - g X)
// and each pair evolves under the instantaneous Bogoliubov matrix at
// B_eff = Bx - g x_a:
//     i d/dt (U, V) = [[-e cos2t, -e sin2t], [-e sin2t, e cos2t]] (U, V).
// Modes couple to each other only through X = N - 4 sum |V_k|^2.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cavity_ising/stationary.hpp"
#include "cavity_ising/tfim.hpp"

namespace cavity_ising {

struct CavityState {
  double x_a = 0.0;
  double p_a = 0.0;
};

struct SystemState {
  double t = 0.0;
  SpinModeState spins;
  CavityState cavity;
  double eps_current = 0.0;

  double b_eff(const ModelParams& params) const { return params.bx - params.g * cavity.x_a; }
};

/// Drive amplitude as a function of time measured from the start of a run.
class DriveSchedule {
 public:
  enum class Kind { constant, step, ramp, piecewise };

  static DriveSchedule constant(double eps, double duration);
  /// `before` for t < t_step, `after` from t_step on.
  static DriveSchedule step(double before, double after, double duration, double t_step = 0.0);
  /// eps0 -> epsf linearly over t_ramp, then parked at epsf for park_fraction * t_ramp.
  static DriveSchedule ramp(double eps0, double epsf, double t_ramp, double park_fraction = 0.2);
  /// Linear interpolation through (t, eps) knots; held constant past the last knot.
  static DriveSchedule piecewise(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;
  double duration() const { return duration_; }
  Kind kind() const { return kind_; }

 private:
  DriveSchedule() = default;

  Kind kind_ = Kind::constant;
  double duration_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
  double t_step_ = 0.0;
};

enum class IntegratorMethod {
  gauss4,  // 2-stage Gauss-Legendre: implicit, order 4, conserves every |U|^2 + |V|^2
  rk4,     // classical explicit Runge-Kutta
};

struct IntegratorConfig {
  double dt = 0.005;
  int sample_stride = 100;
  IntegratorMethod method = IntegratorMethod::gauss4;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

/// Norm drift above this aborts a run with IntegrationQualityError.
inline constexpr double kNormDriftLimit = 1e-6;

struct Sample {
  double t = 0.0;
  double eps = 0.0;
  double x_a = 0.0;
  double p_a = 0.0;
  double b_eff = 0.0;
  double x_avg = 0.0;
  double p_g = 1.0;
  double n_ex = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;

  bool empty() const { return samples.empty(); }
  const Sample& back() const { return samples.back(); }
};

struct IntegrationResult {
  Trajectory trajectory;
  SystemState final_state;
  double max_norm_drift = 0.0;
};

enum class Branch { paramagnetic, ferromagnetic };

/// Full system state sitting at the stationary displacement x_a; the drive is
/// the one that makes x_a stationary.
SystemState stationary_state_at(double x_a, const ModelParams& params);

/// Stationary state on a named branch at drive eps. With three roots the
/// smallest x_a is paramagnetic and the largest ferromagnetic; a lone root is
/// named by the side of J0 its field lies on. Throws InvalidParameter naming
/// the available branches when the request cannot be met.
SystemState prepare_stationary_state(double eps, Branch branch, const ModelParams& params);
/// Same, selecting the root by its index in x_a order.
SystemState prepare_stationary_state(double eps, std::size_t index, const ModelParams& params);

struct SystemDerivative {
  double dx_a = 0.0;
  double dp_a = 0.0;
  std::vector<PairAmplitude> dspins;
};

SystemDerivative rhs(const SystemState& state, double eps, const ModelParams& params);

/// Fixed-step evolution of the coupled system over schedule.duration(). The
/// schedule clock starts at initial.t. Observables are sampled at the start,
/// every sample_stride steps, and at the end.
IntegrationResult integrate(const SystemState& initial, const DriveSchedule& schedule,
                            const IntegratorConfig& cfg, const ModelParams& params);

struct Crossing {
  double t_c = 0.0;
  double lambda_c = 0.0;
};

/// First passage of B_eff through J0 in the sampled trajectory, at or after
/// t_from. t_c is interpolated linearly between the bracketing samples and
/// lambda_c is their difference quotient.
std::optional<Crossing> extract_tc_lambda(const Trajectory& traj, double j0, double t_from = -1e300);

enum class QuenchOrigin {
  fold,      // start at the eps2 fold point, step the drive to eps2 + delta_eps
  centered,  // start on the paramagnetic root at eps2 - delta_eps/2, step to eps2 + delta_eps/2
};

struct QuenchOptions {
  double delta_eps = 0.01;
  double t_total = 400.0;
  QuenchOrigin origin = QuenchOrigin::fold;

  bool operator==(const QuenchOptions&) const = default;
};

struct QuenchReport {
  IntegrationResult run;
  BifurcationResult bifurcation;
  double eps_before = 0.0;
  double eps_after = 0.0;
  double b_eff_start = 0.0;
  std::optional<Crossing> crossing;
  double p_g_end = 1.0;
  double n_ex_end = 0.0;
  double b_eff_end = 0.0;
};

QuenchReport run_quench(const ModelParams& params, const QuenchOptions& options, const IntegratorConfig& cfg);

struct RampOptions {
  double eps0 = 2.23;
  double epsf = 3.6;
  double t_ramp = 400.0;
  double park_fraction = 0.2;

  bool operator==(const RampOptions&) const = default;
};

struct RampReport {
  IntegrationResult run;
  std::optional<Crossing> crossing;
  double p_g_end = 1.0;
  double n_ex_end = 0.0;
  double b_eff_end = 0.0;
};

/// Prepared on the stationary branch at eps0 with the field on the same side
/// of J0 as Bx (paramagnetic for the default parameters).
RampReport run_ramp(const ModelParams& params, const RampOptions& options, const IntegratorConfig& cfg);

struct HysteresisReport {
  RampReport up;
  RampReport down;  // continues from the evolved end of `up`
  /// | closed-loop integral of B_eff d eps | over up then down samples.
  double loop_area = 0.0;
};

HysteresisReport run_hysteresis(const ModelParams& params, const RampOptions& options,
                                const IntegratorConfig& cfg);

/// Bare chain, field B0 + lambda t for t in [0, T], starting in the ground
/// state of B0. Cavity columns of the samples are NaN.
IntegrationResult run_linear_tfim(double b0, double lambda, double t_total, const ModelParams& params,
                                  const IntegratorConfig& cfg);

/// Bare chain evolved from `spins` under an arbitrary field B(t), t in [0, duration].
IntegrationResult evolve_spins(const SpinModeState& spins, const std::function<double(double)>& field,
                               double duration, const ModelParams& params, const IntegratorConfig& cfg);

}  // namespace cavity_ising
