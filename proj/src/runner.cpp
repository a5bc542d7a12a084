#include "cavity_ising/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "cavity_ising/analysis.hpp"
#include "cavity_ising/errors.hpp"
#include "cavity_ising/parallel.hpp"

namespace cavity_ising {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }

  template <typename... Ts>
  void row(Ts... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
    out_ << '\n';
  }

  const fs::path& path() const { return path_; }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }

  fs::path path_;
  std::ofstream out_;
};

constexpr const char* kTrajectoryHeader = "t,eps,x_a,p_a,b_eff,x_avg,p_g,n_ex";
constexpr const char* kStationaryHeader = "x_a,eps,b_eff,x_avg,slope,stable";
constexpr const char* kBifurcationHeader = "axis_value,eps1,eps2,x_a1,x_a2,b_eff1,b_eff2";
constexpr const char* kLzHeader = "t_ramp,lambda_c,n_ex_sim,n_ex_lz,p_g_sim,p_g_lz";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_samples(CsvWriter& csv, const std::vector<Sample>& samples, std::size_t skip = 0) {
  for (std::size_t i = skip; i < samples.size(); ++i) {
    const auto& s = samples[i];
    csv.row(s.t, s.eps, s.x_a, s.p_a, s.b_eff, s.x_avg, s.p_g, s.n_ex);
  }
}

void write_bifurcation(CsvWriter& csv, double axis_value, const std::optional<BifurcationResult>& b) {
  if (b) csv.row(axis_value, b->eps1, b->eps2, b->x_a1, b->x_a2, b->b_eff1, b->b_eff2);
  else csv.row(axis_value, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN);
}

json crossing_json(const std::optional<Crossing>& c) {
  if (!c) return nullptr;
  return {{"t_c", c->t_c}, {"lambda_c", c->lambda_c}};
}

json ramp_json(const RampReport& r) {
  return {{"crossing", crossing_json(r.crossing)},
          {"p_g_end", r.p_g_end},
          {"n_ex_end", r.n_ex_end},
          {"b_eff_end", r.b_eff_end},
          {"max_norm_drift", r.run.max_norm_drift}};
}

struct SweepRow {
  std::optional<Crossing> crossing;
  double p_g_end = kNaN;
  double n_ex_end = kNaN;
  double b_eff_end = kNaN;
  Trajectory trajectory;
  std::string error;
};

json run_stationary(const RunConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
  CsvWriter csv(dir / "stationary.csv", kStationaryHeader);
  json results;
  auto write_point = [&](const StationaryPoint& p) {
    csv.row(p.x_a, p.eps, p.b_eff, p.x_s, p.slope, p.stable);
  };
  if (c.stationary.eps) {
    const auto points = c.stationary.scan ? stationary_points(*c.stationary.eps, c.model, *c.stationary.scan)
                                          : stationary_points(*c.stationary.eps, c.model);
    for (const auto& p : points) write_point(p);
    results["roots"] = points.size();
  } else {
    const XaScan scan = c.stationary.scan.value_or(default_scan(c.model));
    for (int i = 0; i < scan.samples; ++i) {
      write_point(stationary_point_at(scan.lo + (scan.hi - scan.lo) * i / (scan.samples - 1), c.model));
    }
    results["samples"] = scan.samples;
  }
  files.push_back(csv.path());
  return results;
}

json run_phase_diagram(const RunConfig& c, unsigned jobs, const fs::path& dir, std::vector<fs::path>& files) {
  const auto& block = c.phase_diagram;
  const auto rows = phase_diagram(c.model, block.axis.axis, block.axis.values, jobs);
  {
    CsvWriter csv(dir / "bifurcation.csv", kBifurcationHeader);
    for (const auto& r : rows) write_bifurcation(csv, r.axis_value, r.bifurcation);
    files.push_back(csv.path());
  }
  std::size_t bistable = 0;
  for (const auto& r : rows) bistable += r.bifurcation.has_value();
  if (!block.eps_values.empty()) {
    const auto& values = block.axis.values;
    const auto& eps = block.eps_values;
    std::vector<std::pair<int, int>> counts(values.size() * eps.size());
    parallel_for(values.size(), jobs, [&](std::size_t i) {
      const ModelParams p = with_axis_value(c.model, block.axis.axis, values[i]);
      for (std::size_t j = 0; j < eps.size(); ++j) {
        int stable = 0;
        const auto points = stationary_points(eps[j], p);
        for (const auto& pt : points) stable += pt.stable;
        counts[i * eps.size() + j] = {static_cast<int>(points.size()), stable};
      }
    });
    CsvWriter csv(dir / "phase.csv", "axis_value,eps,roots,stable_roots");
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = 0; j < eps.size(); ++j) {
        const auto [roots, stable] = counts[i * eps.size() + j];
        csv.row(values[i], eps[j], roots, stable);
      }
    }
    files.push_back(csv.path());
  }
  return {{"axis", to_string(block.axis.axis)}, {"rows", rows.size()}, {"bistable_rows", bistable}};
}

json run_lz_compare(const RunConfig& c, unsigned jobs, const fs::path& dir, std::vector<fs::path>& files) {
  const auto& block = c.lz_compare;
  const KGrid grid(c.model.n);
  std::vector<RampReport> reports(block.t_ramps.size());
  parallel_for(block.t_ramps.size(), jobs, [&](std::size_t i) {
    reports[i] = run_ramp(c.model, RampOptions{block.eps0, block.epsf, block.t_ramps[i], block.park_fraction},
                          c.integrator);
  });
  CsvWriter csv(dir / "lz.csv", kLzHeader);
  json rows = json::array();
  std::vector<std::pair<double, double>> fit_pairs;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const double lambda = r.crossing ? r.crossing->lambda_c : kNaN;
    const auto lz = r.crossing ? lz_ground_probability(lambda, grid, c.model.j0) : LZPrediction{{}, kNaN, kNaN, kNaN};
    csv.row(block.t_ramps[i], lambda, r.n_ex_end, lz.n_ex, r.p_g_end, lz.p_g);
    rows.push_back(ramp_json(r));
    if (r.crossing) fit_pairs.emplace_back(block.t_ramps[i], std::abs(lambda));
  }
  files.push_back(csv.path());
  json results{{"rows", rows}};
  if (fit_pairs.size() >= 3) {
    try {
      const auto fit = empirical_lambda_fit(fit_pairs);
      results["lambda_fit"] = {{"coefficient", fit.coefficient},
                               {"anchored", fit.anchored},
                               {"max_relative_deviation", fit.max_relative_deviation}};
    } catch (const InvalidParameter&) {
    }
  }
  return results;
}

json run_sweep(const RunConfig& c, unsigned jobs, const fs::path& dir, std::vector<fs::path>& files) {
  const auto& block = c.sweep;
  const auto& values = block.axis.values;
  if (block.command == Command::bifurcation) {
    const auto rows = phase_diagram(c.model, block.axis.axis, values, jobs);
    CsvWriter csv(dir / "bifurcation.csv", kBifurcationHeader);
    for (const auto& r : rows) write_bifurcation(csv, r.axis_value, r.bifurcation);
    files.push_back(csv.path());
    return {{"axis", to_string(block.axis.axis)}, {"rows", rows.size()}};
  }

  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    const ModelParams p = with_axis_value(c.model, block.axis.axis, values[i]);
    SweepRow& row = rows[i];
    try {
      if (block.command == Command::quench) {
        auto r = run_quench(p, block.quench, c.integrator);
        row = {r.crossing, r.p_g_end, r.n_ex_end, r.b_eff_end, std::move(r.run.trajectory), {}};
      } else {
        auto r = run_ramp(p, block.ramp, c.integrator);
        row = {r.crossing, r.p_g_end, r.n_ex_end, r.b_eff_end, std::move(r.run.trajectory), {}};
      }
    } catch (const NoBistability& e) {
      row.error = e.what();
    } catch (const InvalidParameter& e) {
      row.error = e.what();
    }
  });

  fs::create_directories(dir / "rows");
  CsvWriter summary(dir / "sweep.csv", "axis_value,t_c,lambda_c,p_g_end,n_ex_end,b_eff_end");
  json errors = json::object();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    summary.row(values[i], r.crossing ? r.crossing->t_c : kNaN, r.crossing ? r.crossing->lambda_c : kNaN, r.p_g_end,
                r.n_ex_end, r.b_eff_end);
    if (!r.error.empty()) {
      errors[std::to_string(i)] = r.error;
      continue;
    }
    char name[32];
    std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
    CsvWriter csv(dir / "rows" / name, kTrajectoryHeader);
    write_samples(csv, r.trajectory.samples);
    files.push_back(csv.path());
  }
  files.insert(files.begin(), summary.path());
  return {{"axis", to_string(block.axis.axis)},
          {"command", to_string(block.command)},
          {"rows", rows.size()},
          {"row_errors", errors}};
}

}  // namespace

std::string version() { return CAVITY_ISING_VERSION; }

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

fs::path resolve_output_directory(const RunConfig& config, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("CAVITY_ISING_OUT"); env && *env) return env;
  if (config.output_directory) return *config.output_directory;
  return kDefaultOutputDirectory;
}

ExecuteResult execute(const RunConfig& c, const ExecuteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path& dir = options.out_dir;
  fs::create_directories(dir);
  const unsigned jobs = std::max(1u, options.jobs);

  ExecuteResult result;
  json results;
  switch (c.command) {
    case Command::stationary:
      results = run_stationary(c, dir, result.files);
      break;
    case Command::bifurcation: {
      const auto b = find_bifurcations(c.model);
      CsvWriter csv(dir / "bifurcation.csv", kBifurcationHeader);
      write_bifurcation(csv, c.model.bx, b);
      result.files.push_back(csv.path());
      results = {{"eps1", b.eps1}, {"eps2", b.eps2}, {"axis", "bx"}};
      break;
    }
    case Command::phase_diagram:
      results = run_phase_diagram(c, jobs, dir, result.files);
      break;
    case Command::quench: {
      const auto r = run_quench(c.model, c.quench, c.integrator);
      CsvWriter csv(dir / "trajectory.csv", kTrajectoryHeader);
      write_samples(csv, r.run.trajectory.samples);
      result.files.push_back(csv.path());
      results = {{"eps_before", r.eps_before},   {"eps_after", r.eps_after},
                 {"b_eff_start", r.b_eff_start}, {"crossing", crossing_json(r.crossing)},
                 {"p_g_end", r.p_g_end},         {"n_ex_end", r.n_ex_end},
                 {"b_eff_end", r.b_eff_end},     {"max_norm_drift", r.run.max_norm_drift}};
      break;
    }
    case Command::ramp: {
      const auto r = run_ramp(c.model, c.ramp, c.integrator);
      CsvWriter csv(dir / "trajectory.csv", kTrajectoryHeader);
      write_samples(csv, r.run.trajectory.samples);
      result.files.push_back(csv.path());
      results = ramp_json(r);
      break;
    }
    case Command::hysteresis: {
      const auto r = run_hysteresis(c.model, c.ramp, c.integrator);
      CsvWriter csv(dir / "trajectory.csv", kTrajectoryHeader);
      write_samples(csv, r.up.run.trajectory.samples);
      // The down leg starts where the up leg ended; skip the repeated sample.
      write_samples(csv, r.down.run.trajectory.samples, 1);
      result.files.push_back(csv.path());
      results = {{"up", ramp_json(r.up)}, {"down", ramp_json(r.down)}, {"loop_area", r.loop_area}};
      break;
    }
    case Command::lz_compare:
      results = run_lz_compare(c, jobs, dir, result.files);
      break;
    case Command::sweep:
      results = run_sweep(c, jobs, dir, result.files);
      break;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.lexically_relative(dir).generic_string());
  const json manifest{{"tool", "cavity-ising"},
                      {"version", version()},
                      {"command", to_string(c.command)},
                      {"config", to_config_text(c)},
                      {"wall_time_seconds", wall},
                      {"jobs", jobs},
                      {"files", files},
                      {"results", results}};
  const fs::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("cannot write " + manifest_path.string());
  result.files.push_back(manifest_path);
  return result;
}

}  // namespace cavity_ising
