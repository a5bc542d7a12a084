#pragma once

// Brute-force exact diagonalization of the periodic spin chain
//     H = -B sum_i sigma_x,i - J0 sum_i sigma_z,i sigma_z,i+1,  sigma_{N+1} = sigma_1
// for small N, used to validate the momentum-space machinery.
//
// Everything is written in the sigma_x eigenbasis: bit i of a basis index is 1
// when sigma_x,i = -1 (one Jordan-Wigner fermion on site i). sigma_x is then
// diagonal, sigma_z sigma_z flips two neighbouring bits, and the parity
// prod_i sigma_x,i is (-1)^popcount. The momentum-space states live in the
// even sector, which is where all comparisons are made.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cavity_ising/tfim.hpp"

namespace cavity_ising::oracle {

inline constexpr int kMaxGroundSites = 12;
inline constexpr int kMaxEvolveSites = 10;

class DenseSpinSystem {
 public:
  explicit DenseSpinSystem(int n);

  int sites() const { return n_; }
  std::size_t full_dim() const { return std::size_t{1} << n_; }
  std::size_t even_dim() const { return even_states_.size(); }
  /// Full-space basis index of even-sector basis vector i.
  std::uint32_t even_state(std::size_t i) const { return even_states_[i]; }

  Eigen::MatrixXd full_hamiltonian(double field, double j0) const;
  /// (1 + prod_i sigma_x,i) / 2 on the full space.
  Eigen::MatrixXd parity_projector() const;
  Eigen::MatrixXd even_hamiltonian(double field, double j0) const;

  /// H psi on the even sector without forming the matrix.
  void apply_even_hamiltonian(double field, double j0, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;

  /// <sum sigma_x> and <sum sigma_z sigma_z> of an even-sector vector.
  double x_expectation(const Eigen::VectorXcd& psi) const;
  double zz_expectation(const Eigen::VectorXcd& psi) const;

  /// Embeds an even-sector vector in the full space.
  Eigen::VectorXcd to_full(const Eigen::VectorXcd& even) const;

 private:
  int n_;
  std::vector<std::uint32_t> even_states_;
  std::vector<std::int32_t> even_index_;           // full index -> even index or -1
  std::vector<std::vector<std::uint32_t>> flips_;  // [bond][even index] -> even index
};

struct EdGround {
  double energy = 0.0;
  double x = 0.0;
  double czz = 0.0;
  Eigen::VectorXd vector;  // even-sector basis
};

/// Lowest even-sector eigenpair. Refuses n > 12.
EdGround ed_ground(const ModelParams& params, double field);

/// Builds prod_k (U_k + i V_k c_k^dag c_-k^dag)|0> on the full 2^N space, with
/// c_k = sum_j e^{-ikj} c_j / sqrt(N) and Jordan-Wigner fermions c_j.
Eigen::VectorXcd full_state_from_modes(const SpinModeState& state, int n);

/// Same state restricted to the even sector (the odd part is identically zero).
Eigen::VectorXcd even_state_from_modes(const SpinModeState& state, const DenseSpinSystem& system);

struct EdSample {
  double t = 0.0;
  double x = 0.0;
  double p_g = 1.0;
  double field = 0.0;
};

/// Evolves an even-sector vector under H(B(t)) for t in [0, total]. Each
/// `interval` is propagated by a fourth-order commutator-free Magnus product
/// of two exponentials; each exponential acts through its Taylor series
/// summed to machine precision. Samples every `sample_every` time units.
std::vector<EdSample> ed_evolve(const Eigen::VectorXcd& initial, const std::function<double(double)>& field,
                                double total, const ModelParams& params, double interval = 0.01,
                                double sample_every = 1.0);

struct EdCoupledSample {
  double t = 0.0;
  double x = 0.0;
  double x_a = 0.0;
  double p_a = 0.0;
};

/// Mean-field loop with the many-body vector in place of the mode pairs: the
/// cavity quadratures feel X = <psi|sum sigma_x|psi> and psi feels
/// B_eff = Bx - g x_a. Classical RK4 over (psi, x_a, p_a) with step dt.
std::vector<EdCoupledSample> ed_evolve_coupled(const Eigen::VectorXcd& initial, double x_a0, double p_a0,
                                               const std::function<double(double)>& drive, double total,
                                               const ModelParams& params, double dt, double sample_every);

}  // namespace cavity_ising::oracle
