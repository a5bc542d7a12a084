#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cavity_ising/dynamics.hpp"
#include "cavity_ising/errors.hpp"
#include "cavity_ising/oracle.hpp"
#include "cavity_ising/tfim.hpp"
#include "property.hpp"

using namespace cavity_ising;
using namespace cavity_ising::oracle;
using cavity_ising::testing::Gen;

namespace {

ModelParams chain(int n, double j0 = 1.0) {
  ModelParams p;
  p.n = n;
  p.j0 = j0;
  return p;
}

}  // namespace

TEST(DenseSpinSystem, ParityCommutesWithHamiltonian) {
  const DenseSpinSystem system(6);
  const auto h = system.full_hamiltonian(0.7, 1.0);
  const auto p = system.parity_projector();
  EXPECT_LT((h * p - p * h).norm(), 1e-12);
}

TEST(DenseSpinSystem, HermitianAndIdempotentProjector) {
  const DenseSpinSystem system(6);
  const auto h = system.full_hamiltonian(1.2, 0.9);
  EXPECT_LT((h - h.transpose()).norm(), 1e-12);
  const auto p = system.parity_projector();
  EXPECT_LT((p * p - p).norm(), 1e-12);
  EXPECT_EQ(system.even_dim(), std::size_t{32});
}

TEST(DenseSpinSystem, EvenBlockMatchesProjectedFullHamiltonian) {
  const DenseSpinSystem system(6);
  const auto full = system.full_hamiltonian(1.3, 0.8);
  const auto even = system.even_hamiltonian(1.3, 0.8);
  for (std::size_t i = 0; i < system.even_dim(); ++i) {
    for (std::size_t j = 0; j < system.even_dim(); ++j) {
      EXPECT_EQ(even(i, j), full(system.even_state(i), system.even_state(j)));
    }
  }
}

TEST(DenseSpinSystem, SparseActionMatchesMatrix) {
  const DenseSpinSystem system(8);
  Gen gen(11);
  Eigen::VectorXcd psi(system.even_dim());
  for (auto& c : psi) c = {gen.uniform(-1, 1), gen.uniform(-1, 1)};
  Eigen::VectorXcd out;
  system.apply_even_hamiltonian(0.9, 1.1, psi, out);
  const Eigen::VectorXcd dense = system.even_hamiltonian(0.9, 1.1).cast<std::complex<double>>() * psi;
  EXPECT_LT((out - dense).norm(), 1e-12);
}

TEST(EdGround, RefusesLargeChains) {
  EXPECT_THROW(ed_ground(chain(14), 1.0), InvalidParameter);
}

// Limits where the answer is known by hand.
TEST(EdGround, ZeroFieldEnergy) {
  EXPECT_NEAR(ed_ground(chain(4), 0.0).energy, -4.0, 1e-12);
}

TEST(EdGround, StrongFieldEnergy) {
  EXPECT_NEAR(ed_ground(chain(6), 1e3).energy / (-6.0 * 1e3), 1.0, 1e-5);
}

TEST(EdGround, EvenSectorNotGlobalMinimumInFerromagnet) {
  // Deep in the ordered phase the odd sector ground state is nearly degenerate
  // and lies lower at finite N; the comparisons use the even sector only.
  const ModelParams p = chain(6);
  const DenseSpinSystem system(6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(system.full_hamiltonian(0.3, 1.0));
  const auto even = ed_ground(p, 0.3);
  EXPECT_LE(full.eigenvalues()[0], even.energy + 1e-12);
  EXPECT_NEAR(mode_spectrum(0.3, p, KGrid(6)).ground_energy, even.energy, 1e-10);
}

TEST(EdGround, TrivialLimits) {
  const auto para = ed_ground(chain(6, 1e-12), 1.0);
  EXPECT_NEAR(para.energy, -6.0, 1e-12);
  EXPECT_NEAR(para.x, 6.0, 1e-12);
  const auto ferro = ed_ground(chain(6), 0.0);
  EXPECT_NEAR(ferro.energy, -6.0, 1e-12);
  EXPECT_NEAR(ferro.czz, 6.0, 1e-12);
}

// Property: for random fields and couplings, the mode sums reproduce the
// even-sector ground state of the dense Hamiltonian.
TEST(OracleEquivalence, GroundStateObservables) {
  Gen gen(2024);
  for (int n : {4, 6, 8}) {
    for (int c = 0; c < 20; ++c) {
      const double j0 = gen.uniform(0.3, 2.0);
      const double field = gen.uniform(0.0, 3.0) * j0;
      const ModelParams p = chain(n, j0);
      const KGrid grid(n);
      const auto spec = mode_spectrum(field, p, grid);
      const auto ground = ground_mode_state(spec);
      const auto ed = ed_ground(p, field);
      SCOPED_TRACE("n=" + std::to_string(n) + " field=" + std::to_string(field) + " j0=" + std::to_string(j0));
      EXPECT_NEAR(spec.ground_energy, ed.energy, 1e-8);
      EXPECT_NEAR(x_average(ground, n), ed.x, 1e-8);
      EXPECT_NEAR(x_average_ground(field, p, grid), ed.x, 1e-8);
      EXPECT_NEAR(zz_correlator(ground, grid), ed.czz, 1e-8);
    }
  }
}

TEST(OracleEquivalence, ModeStateEmbedsOntoEdGround) {
  Gen gen(7);
  for (int n : {4, 6, 8}) {
    const DenseSpinSystem system(n);
    for (int c = 0; c < 10; ++c) {
      const double field = gen.uniform(0.05, 3.0);
      const ModelParams p = chain(n);
      const auto ground = ground_mode_state(mode_spectrum(field, p, KGrid(n)));
      const auto full = full_state_from_modes(ground, n);
      const auto even = even_state_from_modes(ground, system);
      EXPECT_NEAR(full.norm(), 1.0, 1e-12);
      EXPECT_NEAR(even.norm(), 1.0, 1e-12);
      const auto ed = ed_ground(p, field);
      EXPECT_NEAR(std::norm(ed.vector.cast<std::complex<double>>().dot(even)), 1.0, 1e-10);
    }
  }
}

// Property: an arbitrary normalized product of pair states maps to a
// many-body vector with the same X and C_zz.
TEST(OracleEquivalence, ArbitraryPairStates) {
  Gen gen(99);
  for (int n : {4, 6, 8}) {
    const DenseSpinSystem system(n);
    const KGrid grid(n);
    for (int c = 0; c < 15; ++c) {
      SpinModeState state;
      for (std::size_t m = 0; m < grid.size(); ++m) {
        std::complex<double> u(gen.uniform(-1, 1), gen.uniform(-1, 1));
        std::complex<double> v(gen.uniform(-1, 1), gen.uniform(-1, 1));
        const double norm = std::sqrt(std::norm(u) + std::norm(v));
        state.pairs.push_back({u / norm, v / norm});
      }
      const auto psi = even_state_from_modes(state, system);
      EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
      EXPECT_NEAR(system.x_expectation(psi), x_average(state, n), 1e-10);
      EXPECT_NEAR(system.zz_expectation(psi), zz_correlator(state, grid), 1e-10);
    }
  }
}

TEST(OracleEquivalence, LinearRampGroundProbability) {
  const int n = 8;
  const ModelParams p = chain(n);
  const double b0 = 1.5, lambda = -0.25, total = 5.0;
  IntegratorConfig cfg;
  cfg.dt = 0.005;
  const auto modes = run_linear_tfim(b0, lambda, total, p, cfg);

  const DenseSpinSystem system(n);
  const auto start = even_state_from_modes(ground_mode_state(mode_spectrum(b0, p, KGrid(n))), system);
  const auto ed = ed_evolve(start, [=](double t) { return b0 + lambda * t; }, total, p, 0.01, 1.0);

  EXPECT_NEAR(modes.trajectory.back().p_g, ed.back().p_g, 1e-6);
  EXPECT_NEAR(modes.trajectory.back().x_avg, ed.back().x, 1e-6);
  // Nontrivial: the ramp crosses the critical point and leaves excitations.
  EXPECT_LT(ed.back().p_g, 0.999);
}

TEST(EdEvolve, StaticFieldKeepsGroundState) {
  const ModelParams p = chain(8);
  const DenseSpinSystem system(8);
  const auto ground = ed_ground(p, 1.3);
  const auto samples = ed_evolve(ground.vector.cast<std::complex<double>>(), [](double) { return 1.3; }, 20.0, p);
  for (const auto& s : samples) {
    EXPECT_NEAR(s.x, ground.x, 1e-8);
    EXPECT_NEAR(s.p_g, 1.0, 1e-10);
  }
}

TEST(OracleEquivalence, SlowRampTwoToPointTwo) {
  const int n = 8;
  const ModelParams p = chain(n);
  const double b0 = 2.0, total = 50.0, lambda = (0.2 - 2.0) / total;
  IntegratorConfig cfg;
  const auto modes = run_linear_tfim(b0, lambda, total, p, cfg);
  const DenseSpinSystem system(n);
  const auto start = even_state_from_modes(ground_mode_state(mode_spectrum(b0, p, KGrid(n))), system);
  const auto ed = ed_evolve(start, [=](double t) { return b0 + lambda * t; }, total, p);
  EXPECT_NEAR(modes.trajectory.back().p_g, ed.back().p_g, 1e-6);
  EXPECT_NEAR(ed.back().field, 0.2, 1e-12);
}

// Mean-field loop with the many-body vector in place of the pair amplitudes.
TEST(OracleEquivalence, CoupledCavityLoop) {
  ModelParams p;
  p.n = 8;
  p.g = 0.1;
  p.bx = 1.6;
  const double x_a0 = 3.0;
  SystemState start = stationary_state_at(x_a0, p);
  const double eps = start.eps_current + 0.3;
  IntegratorConfig cfg;
  cfg.dt = 0.005;
  cfg.sample_stride = 1000;
  const double total = 60.0;
  const auto modes = integrate(start, DriveSchedule::constant(eps, total), cfg, p);

  const DenseSpinSystem system(p.n);
  const auto psi = even_state_from_modes(start.spins, system);
  const auto ed = ed_evolve_coupled(psi, start.cavity.x_a, start.cavity.p_a, [eps](double) { return eps; }, total,
                                    p, 0.00125, 5.0);
  ASSERT_EQ(ed.size(), modes.trajectory.samples.size());
  for (std::size_t i = 0; i < ed.size(); ++i) {
    const auto& s = modes.trajectory.samples[i];
    EXPECT_NEAR(s.t, ed[i].t, 1e-9);
    EXPECT_NEAR(s.x_a, ed[i].x_a, 1e-6);
    EXPECT_NEAR(s.x_avg, ed[i].x, 1e-6);
  }
}
