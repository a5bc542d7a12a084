#include "cavity_ising/stationary.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "cavity_ising/errors.hpp"
#include "cavity_ising/parallel.hpp"

namespace cavity_ising {

namespace {

constexpr double kXaTolerance = 1e-8;

// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign (or one of them 0).
double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo) {
  while (hi - lo > kXaTolerance) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Roots of f on a uniform grid: each sign change is polished by bisection.
std::vector<double> scan_roots(const std::function<double(double)>& f, const XaScan& scan) {
  if (!(scan.hi > scan.lo) || scan.samples < 2) {
    throw InvalidParameter("empty x_a scan range");
  }
  std::vector<double> roots;
  const double step = (scan.hi - scan.lo) / (scan.samples - 1);
  double x_prev = scan.lo;
  double f_prev = f(x_prev);
  for (int i = 1; i < scan.samples; ++i) {
    const double x = scan.lo + i * step;
    const double fx = f(x);
    if (f_prev == 0.0) {
      roots.push_back(x_prev);
    } else if ((fx < 0.0) != (f_prev < 0.0) && fx != 0.0) {
      roots.push_back(bisect(f, x_prev, x, f_prev));
    }
    x_prev = x;
    f_prev = fx;
  }
  if (f_prev == 0.0) roots.push_back(x_prev);
  return roots;
}

}  // namespace

XaScan default_scan(const ModelParams& params) {
  const double far = params.g > 0.0 ? params.bx / params.g : 0.0;
  return {-10.0, std::max(far, 0.0) + 10.0, 4000};
}

double cavity_response(const ModelParams& params) {
  if (params.delta_c == 0.0) {
    throw InvalidParameter("delta_c must be nonzero (stationary displacement divides by it)");
  }
  const double dc = params.delta_c;
  return (dc * dc + 0.25 * params.kappa * params.kappa) / (2.0 * dc);
}

double epsilon_of_xa(double x_a, const ModelParams& params) {
  const double response = cavity_response(params);
  const double x_s = params.g == 0.0 ? 0.0 : x_average_ground(params.bx - params.g * x_a, params);
  return params.g * x_s - x_a * response;
}

double x_prime(double x_a, const ModelParams& params) {
  if (params.g == 0.0) return 0.0;
  return -params.g * x_derivative_ground(params.bx - params.g * x_a, params);
}

double slope_of_xa(double x_a, const ModelParams& params) {
  return params.g * x_prime(x_a, params) - cavity_response(params);
}

SecularPair secular_frequencies(double x_a, const ModelParams& params) {
  const double dc = params.delta_c;
  const std::complex<double> root =
      std::sqrt(std::complex<double>(2.0 * dc * params.g * x_prime(x_a, params) - dc * dc, 0.0));
  const double damping = -0.5 * params.kappa;
  return {damping + root, damping - root};
}

StationaryPoint stationary_point_at(double x_a, const ModelParams& params) {
  StationaryPoint p;
  p.x_a = x_a;
  p.p_a = -(params.kappa / (2.0 * params.delta_c)) * x_a;
  p.eps = epsilon_of_xa(x_a, params);
  p.b_eff = params.bx - params.g * x_a;
  p.x_s = x_average_ground(p.b_eff, params);
  p.slope = slope_of_xa(x_a, params);
  p.stable = p.slope > 0.0;
  p.secular = secular_frequencies(x_a, params);
  return p;
}

std::vector<StationaryPoint> stationary_points(double eps, const ModelParams& params, const XaScan& scan) {
  params.validate();
  const KGrid grid(params.n);
  const double response = cavity_response(params);
  auto residual = [&](double x_a) {
    const double x_s = x_average_ground(params.bx - params.g * x_a, params, grid);
    return params.g * x_s - x_a * response - eps;
  };
  std::vector<StationaryPoint> points;
  for (double root : scan_roots(residual, scan)) points.push_back(stationary_point_at(root, params));
  return points;
}

std::vector<StationaryPoint> stationary_points(double eps, const ModelParams& params) {
  // |g X_s| <= |g| N, so every root lies within |g| N / |R| of the
  // decoupled-cavity root -eps / R. Widen the default window to cover that.
  XaScan scan = default_scan(params);
  const double response = cavity_response(params);
  const double linear_root = -eps / response;
  const double spread = std::abs(params.g) * params.n / std::abs(response) + 10.0;
  scan.lo = std::min(scan.lo, linear_root - spread);
  scan.hi = std::max(scan.hi, linear_root + spread);
  return stationary_points(eps, params, scan);
}

BifurcationResult find_bifurcations(const ModelParams& params, const XaScan& scan) {
  params.validate();
  const double response = cavity_response(params);
  if (params.g == 0.0) throw NoBistability("g = 0: eps(x_a) is linear, no bistable regime");
  const KGrid grid(params.n);
  auto slope = [&](double x_a) {
    return -params.g * params.g * x_derivative_ground(params.bx - params.g * x_a, params, grid) - response;
  };
  const auto roots = scan_roots(slope, scan);
  if (roots.size() != 2) {
    throw NoBistability("d eps/d x_a has " + std::to_string(roots.size()) +
                        " sign changes on the scan; no bistable regime");
  }
  // The fold at smaller x_a (higher field) carries the larger drive.
  BifurcationResult r;
  r.x_a2 = roots[0];
  r.x_a1 = roots[1];
  r.eps2 = epsilon_of_xa(r.x_a2, params);
  r.eps1 = epsilon_of_xa(r.x_a1, params);
  if (!(r.eps1 < r.eps2)) {
    throw NoBistability("slope roots do not enclose a bistable interval");
  }
  r.b_eff1 = params.bx - params.g * r.x_a1;
  r.b_eff2 = params.bx - params.g * r.x_a2;
  r.x_prime1 = x_prime(r.x_a1, params);
  r.x_prime2 = x_prime(r.x_a2, params);
  return r;
}

BifurcationResult find_bifurcations(const ModelParams& params) {
  return find_bifurcations(params, default_scan(params));
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::bx: return "bx";
    case SweepAxis::delta_c: return "delta_c";
    case SweepAxis::g: return "g";
    case SweepAxis::kappa: return "kappa";
  }
  return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view text) {
  for (auto axis : {SweepAxis::bx, SweepAxis::delta_c, SweepAxis::g, SweepAxis::kappa}) {
    if (text == to_string(axis)) return axis;
  }
  return std::nullopt;
}

ModelParams with_axis_value(ModelParams params, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::bx: params.bx = value; break;
    case SweepAxis::delta_c: params.delta_c = value; break;
    case SweepAxis::g: params.g = value; break;
    case SweepAxis::kappa: params.kappa = value; break;
  }
  return params;
}

std::vector<PhaseDiagramRow> phase_diagram(const ModelParams& params, SweepAxis axis,
                                           const std::vector<double>& values, unsigned jobs) {
  std::vector<PhaseDiagramRow> rows(values.size());
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    rows[i].axis_value = values[i];
    try {
      rows[i].bifurcation = find_bifurcations(with_axis_value(params, axis, values[i]));
    } catch (const NoBistability&) {
      rows[i].bifurcation.reset();
    }
  });
  return rows;
}

}  // namespace cavity_ising
