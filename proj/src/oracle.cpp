#include "cavity_ising/oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cavity_ising/errors.hpp"

namespace cavity_ising::oracle {

namespace {

using cplx = std::complex<double>;

int popcount(std::uint32_t s) { return std::popcount(s); }

std::uint32_t bond_mask(int bond, int n) { return (1u << bond) | (1u << ((bond + 1) % n)); }

// exp(-i tau H(field)) psi by Taylor series.
void apply_exponential(const DenseSpinSystem& system, double field, double j0, double tau, Eigen::VectorXcd& psi,
                       Eigen::VectorXcd& term, Eigen::VectorXcd& scratch) {
  term = psi;
  const cplx factor(0.0, -tau);
  for (int order = 1; order < 60; ++order) {
    system.apply_even_hamiltonian(field, j0, term, scratch);
    term = scratch * (factor / static_cast<double>(order));
    psi += term;
    if (term.norm() < 1e-18) return;
  }
  throw IntegrationQualityError("Taylor propagator did not converge; shorten the interval");
}

}  // namespace

DenseSpinSystem::DenseSpinSystem(int n) : n_(n) {
  if (n < 2 || n > kMaxGroundSites) {
    throw InvalidParameter("exact diagonalization supports 2 <= N <= " + std::to_string(kMaxGroundSites));
  }
  even_index_.assign(full_dim(), -1);
  for (std::uint32_t s = 0; s < full_dim(); ++s) {
    if (popcount(s) % 2 == 0) {
      even_index_[s] = static_cast<std::int32_t>(even_states_.size());
      even_states_.push_back(s);
    }
  }
  flips_.assign(n, std::vector<std::uint32_t>(even_dim()));
  for (int b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < even_dim(); ++i) {
      flips_[b][i] = static_cast<std::uint32_t>(even_index_[even_states_[i] ^ bond_mask(b, n)]);
    }
  }
}

Eigen::MatrixXd DenseSpinSystem::full_hamiltonian(double field, double j0) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(full_dim(), full_dim());
  for (std::uint32_t s = 0; s < full_dim(); ++s) {
    h(s, s) = -field * (n_ - 2 * popcount(s));
    for (int b = 0; b < n_; ++b) h(s ^ bond_mask(b, n_), s) += -j0;
  }
  return h;
}

Eigen::MatrixXd DenseSpinSystem::parity_projector() const {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(full_dim(), full_dim());
  for (std::uint32_t s = 0; s < full_dim(); ++s) p(s, s) = popcount(s) % 2 == 0 ? 1.0 : 0.0;
  return p;
}

Eigen::MatrixXd DenseSpinSystem::even_hamiltonian(double field, double j0) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(even_dim(), even_dim());
  for (std::size_t i = 0; i < even_dim(); ++i) {
    h(i, i) = -field * (n_ - 2 * popcount(even_states_[i]));
    for (int b = 0; b < n_; ++b) h(flips_[b][i], i) += -j0;
  }
  return h;
}

void DenseSpinSystem::apply_even_hamiltonian(double field, double j0, const Eigen::VectorXcd& psi,
                                             Eigen::VectorXcd& out) const {
  out.resize(psi.size());
  for (std::size_t i = 0; i < even_dim(); ++i) {
    cplx acc = -field * (n_ - 2 * popcount(even_states_[i])) * psi[i];
    for (int b = 0; b < n_; ++b) acc -= j0 * psi[flips_[b][i]];
    out[i] = acc;
  }
}

double DenseSpinSystem::x_expectation(const Eigen::VectorXcd& psi) const {
  double x = 0.0;
  for (std::size_t i = 0; i < even_dim(); ++i) x += std::norm(psi[i]) * (n_ - 2 * popcount(even_states_[i]));
  return x;
}

double DenseSpinSystem::zz_expectation(const Eigen::VectorXcd& psi) const {
  cplx c = 0.0;
  for (std::size_t i = 0; i < even_dim(); ++i) {
    for (int b = 0; b < n_; ++b) c += std::conj(psi[flips_[b][i]]) * psi[i];
  }
  return c.real();
}

Eigen::VectorXcd DenseSpinSystem::to_full(const Eigen::VectorXcd& even) const {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(full_dim());
  for (std::size_t i = 0; i < even_dim(); ++i) full[even_states_[i]] = even[i];
  return full;
}

EdGround ed_ground(const ModelParams& params, double field) {
  if (params.n > kMaxGroundSites) {
    throw InvalidParameter("ed_ground refuses N = " + std::to_string(params.n) + " > " +
                           std::to_string(kMaxGroundSites));
  }
  const DenseSpinSystem system(params.n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.even_hamiltonian(field, params.j0));
  EdGround g;
  g.energy = solver.eigenvalues()[0];
  g.vector = solver.eigenvectors().col(0);
  const Eigen::VectorXcd psi = g.vector.cast<cplx>();
  g.x = system.x_expectation(psi);
  g.czz = system.zz_expectation(psi);
  return g;
}

Eigen::VectorXcd full_state_from_modes(const SpinModeState& state, int n) {
  if (n > kMaxEvolveSites) throw InvalidParameter("mode-state embedding limited to N <= 10");
  const KGrid grid(n);
  if (state.size() != grid.size()) throw InvalidParameter("state size does not match N/2");
  const std::size_t dim = std::size_t{1} << n;

  // c_j^dag on site j (bit j), Jordan-Wigner sign from the occupied sites below j.
  auto create = [dim](int j, const Eigen::VectorXcd& in, cplx weight, Eigen::VectorXcd& out) {
    const std::uint32_t bit = 1u << j;
    for (std::uint32_t s = 0; s < dim; ++s) {
      if (in[s] == 0.0 || (s & bit)) continue;
      const double sign = (std::popcount(s & (bit - 1)) % 2) ? -1.0 : 1.0;
      out[s | bit] += weight * sign * in[s];
    }
  };

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[0] = 1.0;
  Eigen::VectorXcd half(dim), pair(dim);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double k = grid[m];
    // c_-k^dag = sum_l e^{-ikl} c_l^dag / sqrt(N), then c_k^dag = sum_j e^{ikj} c_j^dag / sqrt(N).
    half.setZero();
    for (int l = 0; l < n; ++l) create(l, psi, std::polar(1.0, -k * (l + 1)), half);
    pair.setZero();
    for (int j = 0; j < n; ++j) create(j, half, std::polar(1.0, k * (j + 1)), pair);
    psi = state.pairs[m].u * psi + cplx(0.0, 1.0) * state.pairs[m].v * pair / static_cast<double>(n);
  }
  return psi;
}

Eigen::VectorXcd even_state_from_modes(const SpinModeState& state, const DenseSpinSystem& system) {
  const Eigen::VectorXcd full = full_state_from_modes(state, system.sites());
  Eigen::VectorXcd even(system.even_dim());
  for (std::size_t i = 0; i < system.even_dim(); ++i) even[i] = full[system.even_state(i)];
  return even;
}

std::vector<EdSample> ed_evolve(const Eigen::VectorXcd& initial, const std::function<double(double)>& field,
                                double total, const ModelParams& params, double interval, double sample_every) {
  if (params.n > kMaxEvolveSites) throw InvalidParameter("ed_evolve supports N <= 10");
  const DenseSpinSystem system(params.n);
  if (static_cast<std::size_t>(initial.size()) != system.even_dim()) {
    throw InvalidParameter("initial vector is not an even-sector vector");
  }
  static const double r3 = std::sqrt(3.0);
  const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
  const double w1 = (3.0 - 2.0 * r3) / 12.0, w2 = (3.0 + 2.0 * r3) / 12.0;

  auto sample = [&](double t, const Eigen::VectorXcd& psi) {
    const double b = field(t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.even_hamiltonian(b, params.j0));
    const cplx overlap = solver.eigenvectors().col(0).cast<cplx>().dot(psi);
    return EdSample{t, system.x_expectation(psi), std::norm(overlap), b};
  };

  const long steps = std::max(1L, static_cast<long>(std::ceil(total / interval - 1e-9)));
  const double h = total / steps;
  const long stride = std::max(1L, std::lround(sample_every / h));
  Eigen::VectorXcd psi = initial, term, scratch;
  std::vector<EdSample> out{sample(0.0, psi)};
  for (long s = 0; s < steps; ++s) {
    const double t = s * h;
    const double b1 = field(t + c1 * h), b2 = field(t + c2 * h);
    // Each factor is (h/2) H at a Gauss-weighted field because H is affine in B.
    apply_exponential(system, 2.0 * (w2 * b1 + w1 * b2), params.j0, 0.5 * h, psi, term, scratch);
    apply_exponential(system, 2.0 * (w1 * b1 + w2 * b2), params.j0, 0.5 * h, psi, term, scratch);
    if ((s + 1) % stride == 0 || s + 1 == steps) out.push_back(sample((s + 1) * h, psi));
  }
  return out;
}

std::vector<EdCoupledSample> ed_evolve_coupled(const Eigen::VectorXcd& initial, double x_a0, double p_a0,
                                               const std::function<double(double)>& drive, double total,
                                               const ModelParams& params, double dt, double sample_every) {
  if (params.n > kMaxEvolveSites) throw InvalidParameter("ed_evolve_coupled supports N <= 10");
  const DenseSpinSystem system(params.n);
  struct State {
    Eigen::VectorXcd psi;
    double x_a, p_a;
  };
  Eigen::VectorXcd scratch;
  auto deriv = [&](double t, const State& s) {
    State d;
    system.apply_even_hamiltonian(params.bx - params.g * s.x_a, params.j0, s.psi, scratch);
    d.psi = cplx(0.0, -1.0) * scratch;
    const double x = system.x_expectation(s.psi);
    d.x_a = -params.delta_c * s.p_a - 0.5 * params.kappa * s.x_a;
    d.p_a = params.delta_c * s.x_a - 0.5 * params.kappa * s.p_a + 2.0 * (drive(t) - params.g * x);
    return d;
  };
  auto axpy = [](const State& y, double h, const State& d) {
    return State{y.psi + h * d.psi, y.x_a + h * d.x_a, y.p_a + h * d.p_a};
  };

  const long steps = std::max(1L, static_cast<long>(std::ceil(total / dt - 1e-9)));
  const double h = total / steps;
  const long stride = std::max(1L, std::lround(sample_every / h));
  State y{initial, x_a0, p_a0};
  std::vector<EdCoupledSample> out{{0.0, system.x_expectation(y.psi), y.x_a, y.p_a}};
  for (long s = 0; s < steps; ++s) {
    const double t = s * h;
    const State k1 = deriv(t, y);
    const State k2 = deriv(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = deriv(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = deriv(t + h, axpy(y, h, k3));
    y.psi += h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
    y.x_a += h / 6.0 * (k1.x_a + 2.0 * k2.x_a + 2.0 * k3.x_a + k4.x_a);
    y.p_a += h / 6.0 * (k1.p_a + 2.0 * k2.p_a + 2.0 * k3.p_a + k4.p_a);
    if ((s + 1) % stride == 0 || s + 1 == steps) {
      out.push_back({(s + 1) * h, system.x_expectation(y.psi), y.x_a, y.p_a});
    }
  }
  return out;
}

}  // namespace cavity_ising::oracle
