#pragma once

// Momentum-space description of the transverse-field Ising chain.
//
// After the Jordan-Wigner mapping the even-parity sector decouples into
// (k, -k) pairs with k = (2m-1) pi / N, m = 1..N/2. Every state reachable from
// a ground state is a product over pairs of
//
//     (U_k + i V_k c_k^dag c_-k^dag) |0_{k,-k}>,
//
// so a state is stored as the list of amplitude pairs (U_k, V_k). The common
// dynamical phase of a pair is never stored; none of the observables below
// depend on it.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cavity_ising {

using cplx = std::complex<double>;

/// Static physical constants of the cavity-coupled chain. Energies in units
/// where j0 = 1 is customary.
struct ModelParams {
  double j0 = 1.0;
  double bx = 1.95;
  double g = 0.02;
  double kappa = 0.07;
  double delta_c = -0.05;
  int n = 120;

  /// Throws InvalidParameter unless n is even and >= 4, kappa > 0, j0 > 0.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// Positive anti-periodic quasimomenta (2m-1) pi / N, with cached cos/sin.
class KGrid {
 public:
  explicit KGrid(int n);

  int sites() const { return n_; }
  std::size_t size() const { return k_.size(); }
  double operator[](std::size_t i) const { return k_[i]; }
  std::span<const double> values() const { return k_; }
  std::span<const double> cosines() const { return cos_; }
  std::span<const double> sines() const { return sin_; }

 private:
  int n_;
  std::vector<double> k_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

KGrid make_kgrid(int n);

struct ModeRecord {
  double k = 0.0;
  double theta = 0.0;
  double epsilon = 0.0;
  double u = 1.0;
  double v = 0.0;
  double cos2theta = 1.0;
  double sin2theta = 0.0;
};

/// Bogoliubov data of the chain in a fixed transverse field.
struct ModeSpectrum {
  double effective_field = 0.0;
  std::vector<ModeRecord> modes;
  double ground_energy = 0.0;
};

/// theta_k = atan2(J0 sin k, B - J0 cos k) / 2, so theta_k lies in [0, pi/2).
ModeSpectrum mode_spectrum(double field, const ModelParams& params, const KGrid& grid);

/// Amplitudes of one (k, -k) pair: weight on the empty pair (u) and on the
/// doubly occupied pair (v).
struct PairAmplitude {
  cplx u{1.0, 0.0};
  cplx v{0.0, 0.0};
};

struct SpinModeState {
  std::vector<PairAmplitude> pairs;

  std::size_t size() const { return pairs.size(); }
  /// max_k | |U_k|^2 + |V_k|^2 - 1 |
  double max_norm_deviation() const;
};

/// Instantaneous ground / excited-pair amplitudes relative to a reference field.
struct AmplitudeDecomposition {
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  double reference_field = 0.0;
};

SpinModeState ground_mode_state(const ModeSpectrum& spec);

/// <sum_i sigma_x,i> = N - 4 sum_k |V_k|^2.
double x_average(const SpinModeState& state, int n);

/// Ground-state <sum_i sigma_x,i> at field B, finite-N mode sum 2 sum_k cos 2theta_k.
double x_average_ground(double field, const ModelParams& params, const KGrid& grid);
double x_average_ground(double field, const ModelParams& params);

/// N -> infinity form: N/(2 pi) times the integral over the Brillouin zone,
/// evaluated by adaptive Gauss-Kronrod quadrature.
double x_average_continuum(double field, const ModelParams& params);

/// d/dB of x_average_ground, analytic.
double x_derivative_ground(double field, const ModelParams& params, const KGrid& grid);
double x_derivative_ground(double field, const ModelParams& params);

AmplitudeDecomposition project_alpha_beta(const SpinModeState& state, const ModeSpectrum& spec);

/// prod_k |alpha_k|^2, summed in log space for long chains.
double ground_probability(const AmplitudeDecomposition& dec);

/// sum_k |beta_k|^2
double nex_pairs(const AmplitudeDecomposition& dec);

/// <sum_i sigma_z,i sigma_z,i+1> on the periodic chain:
///   sum_k 4 cos k |V_k|^2 + 4 sin k Re(U_k^* V_k).
double zz_correlator(const SpinModeState& state, const KGrid& grid);
double zz_correlator(const SpinModeState& state, int n);

}  // namespace cavity_ising
