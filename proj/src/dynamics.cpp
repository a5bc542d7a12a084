#include "cavity_ising/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cavity_ising/errors.hpp"
#include "integrators.hpp"

namespace cavity_ising {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Flat layout: y[0] = x_a + i p_a, then (U_k, V_k) interleaved.
std::vector<cplx> pack(const SystemState& s) {
  std::vector<cplx> y(1 + 2 * s.spins.size());
  y[0] = cplx(s.cavity.x_a, s.cavity.p_a);
  for (std::size_t i = 0; i < s.spins.size(); ++i) {
    y[1 + 2 * i] = s.spins.pairs[i].u;
    y[2 + 2 * i] = s.spins.pairs[i].v;
  }
  return y;
}

void unpack(std::span<const cplx> y, SystemState& s) {
  s.cavity = {y[0].real(), y[0].imag()};
  s.spins.pairs.resize((y.size() - 1) / 2);
  for (std::size_t i = 0; i < s.spins.size(); ++i) s.spins.pairs[i] = {y[1 + 2 * i], y[2 + 2 * i]};
}

// i d/dt (U, V) = M (U, V) with M built from a = B - J0 cos k, b = J0 sin k,
// since eps_k cos 2theta_k = 2a and eps_k sin 2theta_k = 2b.
void spin_rhs(double field, const ModelParams& params, const KGrid& grid, std::span<const cplx> y,
              std::span<cplx> dy) {
  const cplx i2(0.0, 2.0);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double a = field - params.j0 * grid.cosines()[m];
    const double b = params.j0 * grid.sines()[m];
    const cplx u = y[1 + 2 * m];
    const cplx v = y[2 + 2 * m];
    dy[1 + 2 * m] = i2 * (a * u + b * v);
    dy[2 + 2 * m] = i2 * (b * u - a * v);
  }
}

double x_from_flat(std::span<const cplx> y, int n) {
  double occupied = 0.0;
  for (std::size_t i = 2; i < y.size(); i += 2) occupied += std::norm(y[i]);
  return n - 4.0 * occupied;
}

struct CoupledRhs {
  const ModelParams& params;
  const KGrid& grid;
  const DriveSchedule& drive;
  double t_start;

  void operator()(double t, std::span<const cplx> y, std::span<cplx> dy) const {
    const double x_a = y[0].real();
    const double p_a = y[0].imag();
    const double x = x_from_flat(y, params.n);
    const double eps = drive(t - t_start);
    const double half_kappa = 0.5 * params.kappa;
    dy[0] = cplx(-params.delta_c * p_a - half_kappa * x_a,
                 params.delta_c * x_a - half_kappa * p_a + 2.0 * (eps - params.g * x));
    spin_rhs(params.bx - params.g * x_a, params, grid, y, dy);
  }
};

struct FieldRhs {
  const ModelParams& params;
  const KGrid& grid;
  const std::function<double(double)>& field;

  void operator()(double t, std::span<const cplx> y, std::span<cplx> dy) const {
    dy[0] = 0.0;
    spin_rhs(field(t), params, grid, y, dy);
  }
};

double pair_norm_drift(std::span<const cplx> y) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < y.size(); i += 2) {
    worst = std::max(worst, std::abs(std::norm(y[i]) + std::norm(y[i + 1]) - 1.0));
  }
  return worst;
}

Sample observe(double t, double eps, double x_a, double p_a, double field, const SpinModeState& spins,
               const ModelParams& params, const KGrid& grid) {
  const auto dec = project_alpha_beta(spins, mode_spectrum(field, params, grid));
  return {t, eps, x_a, p_a, field, x_average(spins, params.n), ground_probability(dec), nex_pairs(dec)};
}

// Shared fixed-step driver. `record(t, y)` is called at every sampled step.
template <typename Rhs, typename Record>
double advance(Rhs& rhs, const IntegratorConfig& cfg, double t0, double duration, std::vector<cplx>& y,
               Record&& record) {
  const long steps = std::max(1L, static_cast<long>(std::ceil(duration / cfg.dt - 1e-9)));
  const double h = duration / steps;
  double drift = pair_norm_drift(y);
  record(t0, y);
  auto run = [&](auto& stepper) {
    for (long s = 1; s <= steps; ++s) {
      stepper.step(t0 + (s - 1) * h, h, y);
      if (s % cfg.sample_stride == 0 || s == steps) {
        drift = std::max(drift, pair_norm_drift(y));
        if (drift > kNormDriftLimit) {
          std::ostringstream msg;
          msg << "pair norm drift " << drift << " exceeds " << kNormDriftLimit << " at t = " << t0 + s * h
              << "; reduce dt (currently " << cfg.dt << ")";
          throw IntegrationQualityError(msg.str());
        }
        record(t0 + s * h, y);
      }
    }
  };
  if (cfg.method == IntegratorMethod::rk4) {
    detail::Rk4Stepper<Rhs> stepper(rhs, y.size());
    run(stepper);
  } else {
    detail::Gauss4Stepper<Rhs> stepper(rhs, y.size());
    run(stepper);
  }
  return drift;
}

std::string branch_listing(const std::vector<StationaryPoint>& points, double j0) {
  std::ostringstream out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out << ", ";
    out << "#" << i << " x_a=" << points[i].x_a << " (" << (points[i].b_eff > j0 ? "paramagnetic" : "ferromagnetic")
        << (points[i].stable ? "" : ", unstable") << ")";
  }
  return points.empty() ? std::string("none") : out.str();
}

}  // namespace

DriveSchedule DriveSchedule::constant(double eps, double duration) {
  return piecewise({{0.0, eps}, {duration, eps}});
}

DriveSchedule DriveSchedule::step(double before, double after, double duration, double t_step) {
  if (!(duration > 0.0)) throw InvalidParameter("schedule duration must be positive");
  DriveSchedule s;
  s.kind_ = Kind::step;
  s.duration_ = duration;
  s.t_step_ = t_step;
  s.knots_ = {{0.0, before}, {t_step, after}};
  return s;
}

DriveSchedule DriveSchedule::ramp(double eps0, double epsf, double t_ramp, double park_fraction) {
  if (!(t_ramp > 0.0)) throw InvalidParameter("ramp duration T must be positive");
  if (!(park_fraction >= 0.0)) throw InvalidParameter("park_fraction must be >= 0");
  DriveSchedule s = piecewise({{0.0, eps0}, {t_ramp, epsf}, {t_ramp * (1.0 + park_fraction), epsf}});
  s.kind_ = Kind::ramp;
  return s;
}

DriveSchedule DriveSchedule::piecewise(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw InvalidParameter("piecewise schedule needs at least two knots");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first >= knots[i - 1].first)) throw InvalidParameter("schedule knots must be time-ordered");
  }
  if (!(knots.back().first > 0.0) || knots.front().first != 0.0) {
    throw InvalidParameter("piecewise schedule must start at t = 0 and have positive duration");
  }
  DriveSchedule s;
  s.kind_ = knots.size() == 2 && knots[0].second == knots[1].second ? Kind::constant : Kind::piecewise;
  s.duration_ = knots.back().first;
  s.knots_ = std::move(knots);
  return s;
}

double DriveSchedule::operator()(double t) const {
  if (kind_ == Kind::step) return t < t_step_ ? knots_[0].second : knots_[1].second;
  if (t <= knots_.front().first) return knots_.front().second;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const auto& [t1, e1] = knots_[i];
    if (t <= t1) {
      const auto& [t0, e0] = knots_[i - 1];
      return t1 > t0 ? e0 + (e1 - e0) * (t - t0) / (t1 - t0) : e1;
    }
  }
  return knots_.back().second;
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
  if (sample_stride < 1) throw InvalidParameter("sample_stride must be >= 1");
}

SystemState stationary_state_at(double x_a, const ModelParams& params) {
  const auto point = stationary_point_at(x_a, params);
  SystemState s;
  s.spins = ground_mode_state(mode_spectrum(point.b_eff, params, KGrid(params.n)));
  s.cavity = {point.x_a, point.p_a};
  s.eps_current = point.eps;
  return s;
}

SystemState prepare_stationary_state(double eps, Branch branch, const ModelParams& params) {
  const auto points = stationary_points(eps, params);
  const StationaryPoint* chosen = nullptr;
  if (points.size() >= 3) {
    chosen = branch == Branch::paramagnetic ? &points.front() : &points.back();
  } else if (points.size() == 1) {
    const bool para = points.front().b_eff > params.j0;
    if (para == (branch == Branch::paramagnetic)) chosen = &points.front();
  }
  if (chosen == nullptr) {
    throw InvalidParameter(std::string("no ") + (branch == Branch::paramagnetic ? "paramagnetic" : "ferromagnetic") +
                           " branch at eps = " + std::to_string(eps) +
                           "; available: " + branch_listing(points, params.j0));
  }
  SystemState s = stationary_state_at(chosen->x_a, params);
  s.eps_current = eps;
  return s;
}

SystemState prepare_stationary_state(double eps, std::size_t index, const ModelParams& params) {
  const auto points = stationary_points(eps, params);
  if (index >= points.size()) {
    throw InvalidParameter("no stationary point #" + std::to_string(index) + " at eps = " + std::to_string(eps) +
                           "; available: " + branch_listing(points, params.j0));
  }
  SystemState s = stationary_state_at(points[index].x_a, params);
  s.eps_current = eps;
  return s;
}

SystemDerivative rhs(const SystemState& state, double eps, const ModelParams& params) {
  const KGrid grid(params.n);
  if (state.spins.size() != grid.size()) throw InvalidParameter("state size does not match N/2");
  const auto y = pack(state);
  std::vector<cplx> dy(y.size());
  const auto drive = DriveSchedule::constant(eps, 1.0);
  CoupledRhs f{params, grid, drive, state.t};
  f(state.t, y, dy);
  SystemDerivative d;
  d.dx_a = dy[0].real();
  d.dp_a = dy[0].imag();
  d.dspins.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) d.dspins[i] = {dy[1 + 2 * i], dy[2 + 2 * i]};
  return d;
}

IntegrationResult integrate(const SystemState& initial, const DriveSchedule& schedule, const IntegratorConfig& cfg,
                            const ModelParams& params) {
  params.validate();
  cfg.validate();
  const KGrid grid(params.n);
  if (initial.spins.size() != grid.size()) throw InvalidParameter("state size does not match N/2");
  if (initial.spins.max_norm_deviation() > kNormDriftLimit) throw InvalidParameter("initial state is not normalized");

  IntegrationResult result;
  result.final_state = initial;
  SystemState& scratch = result.final_state;
  auto y = pack(initial);
  CoupledRhs f{params, grid, schedule, initial.t};
  result.max_norm_drift = advance(f, cfg, initial.t, schedule.duration(), y, [&](double t, std::span<const cplx> yy) {
    unpack(yy, scratch);
    const double x_a = scratch.cavity.x_a;
    result.trajectory.samples.push_back(observe(t, schedule(t - initial.t), x_a, scratch.cavity.p_a,
                                                params.bx - params.g * x_a, scratch.spins, params, grid));
  });
  unpack(y, scratch);
  scratch.t = initial.t + schedule.duration();
  scratch.eps_current = schedule(schedule.duration());
  return result;
}

std::optional<Crossing> extract_tc_lambda(const Trajectory& traj, double j0, double t_from) {
  const auto& s = traj.samples;
  for (std::size_t j = 1; j < s.size(); ++j) {
    if (s[j].t < t_from) continue;
    const double before = s[j - 1].b_eff - j0;
    const double after = s[j].b_eff - j0;
    const bool crosses = before != 0.0 && (after == 0.0 || (before < 0.0) != (after < 0.0));
    if (!crosses) continue;
    const double dt = s[j].t - s[j - 1].t;
    const double slope = (s[j].b_eff - s[j - 1].b_eff) / dt;
    const double t_c = slope != 0.0 ? s[j - 1].t - before / slope : s[j].t;
    return Crossing{t_c, slope};
  }
  return std::nullopt;
}

QuenchReport run_quench(const ModelParams& params, const QuenchOptions& options, const IntegratorConfig& cfg) {
  if (!(options.delta_eps > 0.0)) throw InvalidParameter("delta_eps must be positive");
  if (!(options.t_total > 0.0)) throw InvalidParameter("quench duration must be positive");
  QuenchReport report;
  report.bifurcation = find_bifurcations(params);
  const double eps2 = report.bifurcation.eps2;
  SystemState start;
  if (options.origin == QuenchOrigin::fold) {
    start = stationary_state_at(report.bifurcation.x_a2, params);
    report.eps_before = eps2;
    report.eps_after = eps2 + options.delta_eps;
  } else {
    report.eps_before = eps2 - 0.5 * options.delta_eps;
    report.eps_after = eps2 + 0.5 * options.delta_eps;
    start = prepare_stationary_state(report.eps_before, Branch::paramagnetic, params);
  }
  report.b_eff_start = start.b_eff(params);
  report.run = integrate(start, DriveSchedule::step(report.eps_before, report.eps_after, options.t_total), cfg, params);
  report.crossing = extract_tc_lambda(report.run.trajectory, params.j0);
  const auto& last = report.run.trajectory.back();
  report.p_g_end = last.p_g;
  report.n_ex_end = last.n_ex;
  report.b_eff_end = last.b_eff;
  return report;
}

namespace {

RampReport finish_ramp(IntegrationResult run, double j0, double t_from) {
  RampReport report;
  report.crossing = extract_tc_lambda(run.trajectory, j0, t_from);
  const auto& last = run.trajectory.back();
  report.p_g_end = last.p_g;
  report.n_ex_end = last.n_ex;
  report.b_eff_end = last.b_eff;
  report.run = std::move(run);
  return report;
}

SystemState ramp_start(double eps0, const ModelParams& params) {
  return prepare_stationary_state(eps0, params.bx > params.j0 ? Branch::paramagnetic : Branch::ferromagnetic, params);
}

}  // namespace

RampReport run_ramp(const ModelParams& params, const RampOptions& options, const IntegratorConfig& cfg) {
  const auto schedule = DriveSchedule::ramp(options.eps0, options.epsf, options.t_ramp, options.park_fraction);
  return finish_ramp(integrate(ramp_start(options.eps0, params), schedule, cfg, params), params.j0, -1e300);
}

HysteresisReport run_hysteresis(const ModelParams& params, const RampOptions& options, const IntegratorConfig& cfg) {
  HysteresisReport report;
  report.up = run_ramp(params, options, cfg);
  const auto back = DriveSchedule::ramp(options.epsf, options.eps0, options.t_ramp, options.park_fraction);
  const SystemState& turn = report.up.run.final_state;
  report.down = finish_ramp(integrate(turn, back, cfg, params), params.j0, turn.t);

  double loop = 0.0;
  auto accumulate = [&loop](const std::vector<Sample>& s) {
    for (std::size_t i = 1; i < s.size(); ++i) loop += 0.5 * (s[i].b_eff + s[i - 1].b_eff) * (s[i].eps - s[i - 1].eps);
  };
  accumulate(report.up.run.trajectory.samples);
  accumulate(report.down.run.trajectory.samples);
  report.loop_area = std::abs(loop);
  return report;
}

IntegrationResult evolve_spins(const SpinModeState& spins, const std::function<double(double)>& field,
                               double duration, const ModelParams& params, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(duration > 0.0)) throw InvalidParameter("evolution time must be positive");
  const KGrid grid(params.n);
  if (spins.size() != grid.size()) throw InvalidParameter("state size does not match N/2");

  IntegrationResult result;
  SystemState& scratch = result.final_state;
  scratch.spins = spins;
  scratch.cavity = {kNaN, kNaN};
  scratch.eps_current = kNaN;
  std::vector<cplx> y = pack(scratch);
  y[0] = 0.0;
  FieldRhs f{params, grid, field};
  result.max_norm_drift = advance(f, cfg, 0.0, duration, y, [&](double t, std::span<const cplx> yy) {
    unpack(yy, scratch);
    result.trajectory.samples.push_back(observe(t, kNaN, kNaN, kNaN, field(t), scratch.spins, params, grid));
  });
  unpack(y, scratch);
  scratch.cavity = {kNaN, kNaN};
  scratch.t = duration;
  return result;
}

IntegrationResult run_linear_tfim(double b0, double lambda, double t_total, const ModelParams& params,
                                  const IntegratorConfig& cfg) {
  params.validate();
  const auto ground = ground_mode_state(mode_spectrum(b0, params, KGrid(params.n)));
  const std::function<double(double)> field = [b0, lambda](double t) { return b0 + lambda * t; };
  return evolve_spins(ground, field, t_total, params, cfg);
}

}  // namespace cavity_ising
