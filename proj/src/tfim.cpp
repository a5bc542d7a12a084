#include "cavity_ising/tfim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavity_ising/errors.hpp"

namespace cavity_ising {

namespace {

constexpr double kMinGap = 1e-300;

void check_length(const SpinModeState& state, int n) {
  if (state.size() != static_cast<std::size_t>(n / 2)) {
    throw InvalidParameter("state holds " + std::to_string(state.size()) + " pairs, expected N/2 = " +
                           std::to_string(n / 2));
  }
}

}  // namespace

void ModelParams::validate() const {
  if (n < 4 || n % 2 != 0) {
    throw InvalidParameter("n must be even and >= 4 (got " + std::to_string(n) + ")");
  }
  if (!(kappa > 0.0)) throw InvalidParameter("kappa must be positive");
  if (!(j0 > 0.0)) throw InvalidParameter("j0 must be positive");
  for (double value : {j0, bx, g, kappa, delta_c}) {
    if (!std::isfinite(value)) throw InvalidParameter("model parameters must be finite");
  }
}

KGrid::KGrid(int n) : n_(n) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidParameter("n must be even and >= 4 (got " + std::to_string(n) + ")");
  }
  const int half = n / 2;
  k_.reserve(half);
  cos_.reserve(half);
  sin_.reserve(half);
  for (int m = 1; m <= half; ++m) {
    const double k = (2.0 * m - 1.0) * std::numbers::pi / n;
    k_.push_back(k);
    cos_.push_back(std::cos(k));
    sin_.push_back(std::sin(k));
  }
}

KGrid make_kgrid(int n) { return KGrid(n); }

ModeSpectrum mode_spectrum(double field, const ModelParams& params, const KGrid& grid) {
  ModeSpectrum spec;
  spec.effective_field = field;
  spec.modes.reserve(grid.size());
  const double j0 = params.j0;
  double energy = -grid.sites() * field;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = field - j0 * grid.cosines()[i];
    const double b = j0 * grid.sines()[i];
    const double half_gap = std::hypot(a, b);
    ModeRecord rec;
    rec.k = grid[i];
    rec.theta = 0.5 * std::atan2(b, a);
    rec.epsilon = 2.0 * half_gap;
    rec.u = std::cos(rec.theta);
    rec.v = std::sin(rec.theta);
    if (half_gap > kMinGap) {
      rec.cos2theta = a / half_gap;
      rec.sin2theta = b / half_gap;
    } else {
      rec.cos2theta = std::cos(2.0 * rec.theta);
      rec.sin2theta = std::sin(2.0 * rec.theta);
    }
    energy += rec.epsilon * (rec.cos2theta - 1.0);
    spec.modes.push_back(rec);
  }
  spec.ground_energy = energy;
  return spec;
}

double SpinModeState::max_norm_deviation() const {
  double worst = 0.0;
  for (const auto& p : pairs) {
    worst = std::max(worst, std::abs(std::norm(p.u) + std::norm(p.v) - 1.0));
  }
  return worst;
}

SpinModeState ground_mode_state(const ModeSpectrum& spec) {
  SpinModeState state;
  state.pairs.reserve(spec.modes.size());
  for (const auto& m : spec.modes) state.pairs.push_back({cplx(m.u, 0.0), cplx(m.v, 0.0)});
  return state;
}

double x_average(const SpinModeState& state, int n) {
  check_length(state, n);
  double occupied = 0.0;
  for (const auto& p : state.pairs) occupied += std::norm(p.v);
  return n - 4.0 * occupied;
}

double x_average_ground(double field, const ModelParams& params, const KGrid& grid) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = field - params.j0 * grid.cosines()[i];
    const double b = params.j0 * grid.sines()[i];
    sum += a / std::max(std::hypot(a, b), kMinGap);
  }
  return 2.0 * sum;
}

double x_average_ground(double field, const ModelParams& params) {
  return x_average_ground(field, params, KGrid(params.n));
}

double x_average_continuum(double field, const ModelParams& params) {
  const double j0 = params.j0;
  auto integrand = [field, j0](double k) {
    const double a = field - j0 * std::cos(k);
    return a / std::max(std::sqrt(j0 * j0 + field * field - 2.0 * field * j0 * std::cos(k)), kMinGap);
  };
  // Even integrand; the only non-smooth point (B = J0) sits at k = 0.
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numbers::pi, 15, 1e-13);
  return params.n / (2.0 * std::numbers::pi) * 2.0 * half;
}

double x_derivative_ground(double field, const ModelParams& params, const KGrid& grid) {
  const double j2 = params.j0 * params.j0;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid.sines()[i];
    const double r2 = j2 + field * field - 2.0 * field * params.j0 * grid.cosines()[i];
    sum += j2 * s * s / std::max(r2 * std::sqrt(r2), kMinGap);
  }
  return 2.0 * sum;
}

double x_derivative_ground(double field, const ModelParams& params) {
  return x_derivative_ground(field, params, KGrid(params.n));
}

AmplitudeDecomposition project_alpha_beta(const SpinModeState& state, const ModeSpectrum& spec) {
  if (state.size() != spec.modes.size()) {
    throw InvalidParameter("state and spectrum have different numbers of modes");
  }
  AmplitudeDecomposition dec;
  dec.reference_field = spec.effective_field;
  dec.alpha.reserve(state.size());
  dec.beta.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double u = spec.modes[i].u;
    const double v = spec.modes[i].v;
    const auto& p = state.pairs[i];
    dec.alpha.push_back(u * p.u + v * p.v);
    dec.beta.push_back(-v * p.u + u * p.v);
  }
  return dec;
}

double ground_probability(const AmplitudeDecomposition& dec) {
  if (dec.alpha.size() > 64) {
    double log_p = 0.0;
    for (const auto& a : dec.alpha) log_p += std::log(std::norm(a));
    return std::exp(log_p);
  }
  double p = 1.0;
  for (const auto& a : dec.alpha) p *= std::norm(a);
  return p;
}

double nex_pairs(const AmplitudeDecomposition& dec) {
  double sum = 0.0;
  for (const auto& b : dec.beta) sum += std::norm(b);
  return sum;
}

double zz_correlator(const SpinModeState& state, const KGrid& grid) {
  check_length(state, grid.sites());
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = state.pairs[i];
    sum += 4.0 * grid.cosines()[i] * std::norm(p.v) + 4.0 * grid.sines()[i] * std::real(std::conj(p.u) * p.v);
  }
  return sum;
}

double zz_correlator(const SpinModeState& state, int n) { return zz_correlator(state, KGrid(n)); }

}  // namespace cavity_ising
