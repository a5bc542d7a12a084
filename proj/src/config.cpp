#include "cavity_ising/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cavity_ising/errors.hpp"

namespace cavity_ising {

namespace {

namespace pt = boost::property_tree;

constexpr std::array<std::pair<Command, std::string_view>, 8> kCommandNames{{
    {Command::stationary, "stationary"},
    {Command::bifurcation, "bifurcation"},
    {Command::phase_diagram, "phase-diagram"},
    {Command::quench, "quench"},
    {Command::ramp, "ramp"},
    {Command::hysteresis, "hysteresis"},
    {Command::lz_compare, "lz-compare"},
    {Command::sweep, "sweep"},
}};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view text, const std::string& key) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError(key + ": expected a number, got '" + t + "'");
  }
  if (!std::isfinite(value)) throw ConfigError(key + ": value must be finite");
  return value;
}

int to_int(std::string_view text, const std::string& key) {
  const std::string t = trim(text);
  int value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + t + "'");
  }
  return value;
}

std::vector<double> to_list(std::string_view text, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) out.push_back(to_double(item, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

// Reads the keys of one section, refusing anything not listed.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name, std::set<std::string> allowed)
      : tree_(tree), name_(std::move(name)) {
    for (const auto& [key, node] : tree_) {
      if (!node.empty()) throw ConfigError("[" + name_ + "]: nested key '" + key + "' not allowed");
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (auto v = tree_.get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  }
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void get(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = to_double(*v, qualified(key));
  }
  void get(const std::string& key, int& out) const {
    if (auto v = raw(key)) out = to_int(*v, qualified(key));
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
};

const std::set<std::string> kModelKeys{"j0", "bx", "g", "kappa", "delta_c", "n"};
const std::set<std::string> kQuenchKeys{"delta_eps", "t_total", "origin"};
const std::set<std::string> kRampKeys{"eps0", "epsf", "t_ramp", "park_fraction"};

void read_quench(const Section& s, QuenchOptions& q) {
  s.get("delta_eps", q.delta_eps);
  s.get("t_total", q.t_total);
  if (auto v = s.raw("origin")) {
    if (*v == "fold") q.origin = QuenchOrigin::fold;
    else if (*v == "centered") q.origin = QuenchOrigin::centered;
    else throw ConfigError(s.qualified("origin") + ": expected 'fold' or 'centered'");
  }
  if (!(q.t_total > 0.0)) throw ConfigError(s.qualified("t_total") + " must be positive");
}

void read_ramp(const Section& s, RampOptions& r) {
  s.get("eps0", r.eps0);
  s.get("epsf", r.epsf);
  s.get("t_ramp", r.t_ramp);
  s.get("park_fraction", r.park_fraction);
  if (!(r.t_ramp > 0.0)) throw ConfigError(s.qualified("t_ramp") + " must be positive");
  if (r.park_fraction < 0.0) throw ConfigError(s.qualified("park_fraction") + " must be >= 0");
}

AxisValues read_axis(const Section& s) {
  AxisValues a;
  const auto axis = s.raw("axis");
  if (!axis) throw ConfigError(s.qualified("axis") + " is required");
  const auto parsed = parse_sweep_axis(*axis);
  if (!parsed) throw ConfigError(s.qualified("axis") + ": expected one of bx, delta_c, g, kappa");
  a.axis = *parsed;
  const auto values = s.raw("values");
  if (!values) throw ConfigError(s.qualified("values") + " is required");
  try {
    a.values = parse_axis_values(*values);
  } catch (const ConfigError& e) {
    throw ConfigError(s.qualified("values") + ": " + e.what());
  }
  return a;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fmt_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

}  // namespace

std::string_view to_string(Command command) {
  for (const auto& [c, name] : kCommandNames) {
    if (c == command) return name;
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (const auto& [c, name] : kCommandNames) {
    if (name == text) return c;
  }
  return std::nullopt;
}

std::vector<double> parse_axis_values(std::string_view text) {
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) return to_list(t, "values");
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(t);
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw ConfigError("range must be lo:hi:count");
  const double lo = to_double(parts[0], "values");
  const double hi = to_double(parts[1], "values");
  const int count = to_int(parts[2], "values");
  if (count < 1) throw ConfigError("range count must be >= 1");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  return out;
}

RunConfig parse_config(std::string_view text, std::optional<Command> command) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  RunConfig cfg;
  std::optional<Command> block;
  static const pt::ptree empty;
  const pt::ptree* model = &empty;
  const pt::ptree* integrator = &empty;
  const pt::ptree* output = &empty;
  const pt::ptree* block_tree = &empty;

  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      throw ConfigError("key '" + name + "' must be inside a section");
    }
  }
  // read_ini drops sections without keys, so headers come from the raw text.
  std::vector<std::string> sections;
  {
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] != '[') continue;
      const auto close = line.find(']', first);
      if (close == std::string::npos) continue;
      std::string name = line.substr(first + 1, close - first - 1);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      sections.push_back(std::move(name));
    }
  }
  for (const auto& name : sections) {
    const auto child = tree.find(name);
    const pt::ptree& node = child == tree.not_found() ? empty : child->second;
    if (name == "model") model = &node;
    else if (name == "integrator") integrator = &node;
    else if (name == "output") output = &node;
    else if (auto c = parse_command(name)) {
      if (block) {
        throw ConfigError("two command blocks: [" + std::string(to_string(*block)) + "] and [" + name + "]");
      }
      block = c;
      block_tree = &node;
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }

  if (block && command && *block != *command) {
    throw ConfigError("command '" + std::string(to_string(*command)) + "' does not match block [" +
                      std::string(to_string(*block)) + "]");
  }
  if (!block && !command) throw ConfigError("missing command block");
  cfg.command = block ? *block : *command;

  const Section m(*model, "model", kModelKeys);
  m.get("j0", cfg.model.j0);
  m.get("bx", cfg.model.bx);
  m.get("g", cfg.model.g);
  m.get("kappa", cfg.model.kappa);
  m.get("delta_c", cfg.model.delta_c);
  m.get("n", cfg.model.n);
  if (cfg.model.n % 2 != 0) throw ConfigError("model.n: n must be even (got " + std::to_string(cfg.model.n) + ")");
  try {
    cfg.model.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("[model]: ") + e.what());
  }

  const Section in(*integrator, "integrator", {"dt", "sample_stride", "method"});
  in.get("dt", cfg.integrator.dt);
  in.get("sample_stride", cfg.integrator.sample_stride);
  if (auto v = in.raw("method")) {
    if (*v == "gauss4") cfg.integrator.method = IntegratorMethod::gauss4;
    else if (*v == "rk4") cfg.integrator.method = IntegratorMethod::rk4;
    else throw ConfigError("integrator.method: expected 'gauss4' or 'rk4'");
  }
  try {
    cfg.integrator.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("[integrator]: ") + e.what());
  }

  const Section out(*output, "output", {"directory"});
  cfg.output_directory = out.raw("directory");

  const std::string bname(to_string(cfg.command));
  switch (cfg.command) {
    case Command::stationary: {
      const Section s(*block_tree, bname, {"eps", "xa_min", "xa_max", "samples"});
      if (auto v = s.raw("eps")) cfg.stationary.eps = to_double(*v, s.qualified("eps"));
      if (s.raw("xa_min") || s.raw("xa_max") || s.raw("samples")) {
        XaScan scan = default_scan(cfg.model);
        s.get("xa_min", scan.lo);
        s.get("xa_max", scan.hi);
        s.get("samples", scan.samples);
        if (!(scan.hi > scan.lo)) throw ConfigError(s.qualified("xa_max") + " must exceed xa_min");
        if (scan.samples < 2) throw ConfigError(s.qualified("samples") + " must be >= 2");
        cfg.stationary.scan = scan;
      }
      break;
    }
    case Command::bifurcation:
      Section(*block_tree, bname, {});
      break;
    case Command::phase_diagram: {
      const Section s(*block_tree, bname, {"axis", "values", "eps_values"});
      cfg.phase_diagram.axis = read_axis(s);
      if (auto v = s.raw("eps_values")) cfg.phase_diagram.eps_values = parse_axis_values(*v);
      break;
    }
    case Command::quench:
      read_quench(Section(*block_tree, bname, kQuenchKeys), cfg.quench);
      break;
    case Command::ramp:
    case Command::hysteresis:
      read_ramp(Section(*block_tree, bname, kRampKeys), cfg.ramp);
      break;
    case Command::lz_compare: {
      const Section s(*block_tree, bname, {"t_ramps", "eps0", "epsf", "park_fraction"});
      if (auto v = s.raw("t_ramps")) cfg.lz_compare.t_ramps = parse_axis_values(*v);
      s.get("eps0", cfg.lz_compare.eps0);
      s.get("epsf", cfg.lz_compare.epsf);
      s.get("park_fraction", cfg.lz_compare.park_fraction);
      for (double t : cfg.lz_compare.t_ramps) {
        if (!(t > 0.0)) throw ConfigError(s.qualified("t_ramps") + " entries must be positive");
      }
      break;
    }
    case Command::sweep: {
      std::set<std::string> keys{"axis", "values", "command"};
      keys.insert(kQuenchKeys.begin(), kQuenchKeys.end());
      keys.insert(kRampKeys.begin(), kRampKeys.end());
      const Section s(*block_tree, bname, keys);
      cfg.sweep.axis = read_axis(s);
      if (auto v = s.raw("command")) {
        const auto c = parse_command(*v);
        if (!c || (*c != Command::bifurcation && *c != Command::quench && *c != Command::ramp)) {
          throw ConfigError(s.qualified("command") + ": expected bifurcation, quench or ramp");
        }
        cfg.sweep.command = *c;
      }
      read_quench(s, cfg.sweep.quench);
      read_ramp(s, cfg.sweep.ramp);
      break;
    }
  }
  return cfg;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  out << "[model]\n"
      << "j0 = " << fmt(c.model.j0) << "\n"
      << "bx = " << fmt(c.model.bx) << "\n"
      << "g = " << fmt(c.model.g) << "\n"
      << "kappa = " << fmt(c.model.kappa) << "\n"
      << "delta_c = " << fmt(c.model.delta_c) << "\n"
      << "n = " << c.model.n << "\n\n"
      << "[integrator]\n"
      << "dt = " << fmt(c.integrator.dt) << "\n"
      << "sample_stride = " << c.integrator.sample_stride << "\n"
      << "method = " << (c.integrator.method == IntegratorMethod::gauss4 ? "gauss4" : "rk4") << "\n\n";
  if (c.output_directory) out << "[output]\ndirectory = " << *c.output_directory << "\n\n";

  auto quench = [&](const QuenchOptions& q) {
    out << "delta_eps = " << fmt(q.delta_eps) << "\n"
        << "t_total = " << fmt(q.t_total) << "\n"
        << "origin = " << (q.origin == QuenchOrigin::fold ? "fold" : "centered") << "\n";
  };
  auto ramp = [&](const RampOptions& r) {
    out << "eps0 = " << fmt(r.eps0) << "\n"
        << "epsf = " << fmt(r.epsf) << "\n"
        << "t_ramp = " << fmt(r.t_ramp) << "\n"
        << "park_fraction = " << fmt(r.park_fraction) << "\n";
  };
  auto axis = [&](const AxisValues& a) {
    out << "axis = " << to_string(a.axis) << "\n"
        << "values = " << fmt_list(a.values) << "\n";
  };

  out << "[" << to_string(c.command) << "]\n";
  switch (c.command) {
    case Command::stationary:
      if (c.stationary.eps) out << "eps = " << fmt(*c.stationary.eps) << "\n";
      if (c.stationary.scan) {
        out << "xa_min = " << fmt(c.stationary.scan->lo) << "\n"
            << "xa_max = " << fmt(c.stationary.scan->hi) << "\n"
            << "samples = " << c.stationary.scan->samples << "\n";
      }
      break;
    case Command::bifurcation:
      break;
    case Command::phase_diagram:
      axis(c.phase_diagram.axis);
      if (!c.phase_diagram.eps_values.empty()) out << "eps_values = " << fmt_list(c.phase_diagram.eps_values) << "\n";
      break;
    case Command::quench:
      quench(c.quench);
      break;
    case Command::ramp:
    case Command::hysteresis:
      ramp(c.ramp);
      break;
    case Command::lz_compare:
      out << "t_ramps = " << fmt_list(c.lz_compare.t_ramps) << "\n"
          << "eps0 = " << fmt(c.lz_compare.eps0) << "\n"
          << "epsf = " << fmt(c.lz_compare.epsf) << "\n"
          << "park_fraction = " << fmt(c.lz_compare.park_fraction) << "\n";
      break;
    case Command::sweep:
      axis(c.sweep.axis);
      out << "command = " << to_string(c.sweep.command) << "\n";
      quench(c.sweep.quench);
      ramp(c.sweep.ramp);
      break;
  }
  return out.str();
}

}  // namespace cavity_ising
