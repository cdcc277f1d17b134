#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "bck/errors.hpp"

namespace bck::cli {

namespace {

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {
      "run.seed",
      "domain.dimension", "domain.length", "domain.length_y", "domain.modes",
      "domain.quadrature_points", "domain.allow_aliasing",
      "params.a", "params.b", "params.c", "params.k", "params.s",
      "physical.nu", "physical.Pr", "physical.Lambda", "physical.c0", "physical.gamma",
      "physical.B_over_A", "physical.s",
      "initial.preset", "initial.amplitude", "initial.u1_amplitude", "initial.u2_amplitude",
      "initial.mode", "initial.mode_y", "initial.count", "initial.spectrum_power",
      "solver.T", "solver.dt", "solver.eps_deg", "solver.substep_iters", "solver.blowup",
      "solver.picard_tol", "solver.picard_max_iter", "solver.exec",
      "analysis.window_fraction", "analysis.abar",
      "sweep.amplitudes", "sweep.b_values", "sweep.s_values",
      "convergence.modes", "convergence.dts", "convergence.epsilon", "convergence.T",
      "convergence.amplitude",
      "output.stride"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "pi") return std::numbers::pi;
  try {
    std::size_t pos = 0;
    const double d = std::stod(t, &pos);
    if (pos != t.size() || !std::isfinite(d)) throw std::invalid_argument(t);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + t + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return i;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + t + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + t + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(static_cast<int>(parse_int(key, s)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::map<std::string, std::string> read_ini(std::istream& in) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " at line " +
                      std::to_string(e.line()));
  }
  std::map<std::string, std::string> raw;
  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) raw[section + "." + key] = trim(value.data());
  }
  return raw;
}

SolverConfig build(std::map<std::string, std::string> raw,
                   const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like section.key=value: '" + o + "'");
    raw[trim(o.substr(0, eq))] = trim(o.substr(eq + 1));
  }
  for (const auto& [k, v] : raw)
    if (!allowed_keys().count(k)) throw ConfigError("unknown key '" + k + "'");

  SolverConfig c;
  auto get = [&](const std::string& k) -> const std::string* {
    const auto it = raw.find(k);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (const auto* v = get(k)) dst = parse_double(k, *v);
  };
  auto integer = [&](const std::string& k, int& dst) {
    if (const auto* v = get(k)) dst = static_cast<int>(parse_int(k, *v));
  };

  if (const auto* v = get("run.seed")) c.seed = static_cast<std::uint64_t>(parse_int("run.seed", *v));
  if (seed) {
    c.seed = *seed;
    raw["run.seed"] = std::to_string(*seed);
  }

  integer("domain.dimension", c.domain.dimension);
  num("domain.length", c.domain.lengths[0]);
  c.domain.lengths[1] = c.domain.lengths[0];
  num("domain.length_y", c.domain.lengths[1]);
  integer("domain.modes", c.domain.modes);
  integer("domain.quadrature_points", c.domain.quadrature_points);
  if (const auto* v = get("domain.allow_aliasing"))
    c.domain.allow_aliasing = parse_bool("domain.allow_aliasing", *v);
  try {
    c.domain.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  bool has_params = false;
  bool has_physical = false;
  for (const auto& [k, v] : raw) {
    has_params |= k.rfind("params.", 0) == 0;
    has_physical |= k.rfind("physical.", 0) == 0;
  }
  require(!(has_params && has_physical), "give either [params] or [physical], not both");
  if (has_physical) {
    PhysicalParams p;
    num("physical.nu", p.nu);
    num("physical.Pr", p.Pr);
    num("physical.Lambda", p.Lambda);
    num("physical.c0", p.c0);
    if (const auto* v = get("physical.gamma")) p.gamma = parse_double("physical.gamma", *v);
    if (const auto* v = get("physical.B_over_A"))
      p.B_over_A = parse_double("physical.B_over_A", *v);
    try {
      c.params = derive_params(p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    integer("physical.s", c.params.s);
    c.physical = p;
  } else {
    num("params.a", c.params.a);
    num("params.b", c.params.b);
    num("params.c", c.params.c);
    num("params.k", c.params.k);
    integer("params.s", c.params.s);
  }
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (const auto* v = get("initial.preset")) c.initial.preset = *v;
  require(c.initial.preset == "zero" || c.initial.preset == "single-mode" ||
              c.initial.preset == "multi-mode" || c.initial.preset == "random",
          "initial.preset must be zero, single-mode, multi-mode or random");
  num("initial.amplitude", c.initial.amplitude);
  num("initial.u1_amplitude", c.initial.u1_amplitude);
  num("initial.u2_amplitude", c.initial.u2_amplitude);
  integer("initial.mode", c.initial.mode);
  integer("initial.mode_y", c.initial.mode_y);
  integer("initial.count", c.initial.count);
  num("initial.spectrum_power", c.initial.spectrum_power);
  require(c.initial.mode >= 1 && c.initial.mode <= c.domain.modes,
          "initial.mode must be in [1, domain.modes]");
  require(c.initial.mode_y >= 1 && c.initial.mode_y <= c.domain.modes,
          "initial.mode_y must be in [1, domain.modes]");
  require(c.initial.count >= 1 && c.initial.count <= c.domain.modes,
          "initial.count must be in [1, domain.modes]");
  require(c.initial.spectrum_power >= 0.0, "initial.spectrum_power must be >= 0");

  num("solver.T", c.solver.T);
  num("solver.dt", c.solver.dt);
  num("solver.eps_deg", c.solver.eps_deg);
  integer("solver.substep_iters", c.solver.substep_iters);
  num("solver.blowup", c.solver.blowup);
  num("solver.picard_tol", c.solver.picard_tol);
  integer("solver.picard_max_iter", c.solver.picard_max_iter);
  if (const auto* v = get("solver.exec")) {
    require(*v == "serial" || *v == "parallel", "solver.exec must be serial or parallel");
    c.solver.exec = *v == "serial" ? Exec::serial : Exec::parallel;
  }
  require(c.solver.T > 0.0, "solver.T must be > 0");
  require(c.solver.dt > 0.0 && c.solver.dt <= c.solver.T, "solver.dt must be in (0, T]");
  require(std::abs(std::round(c.solver.T / c.solver.dt) * c.solver.dt - c.solver.T) <=
              1e-9 * c.solver.T,
          "solver.T must be an integer multiple of solver.dt");
  require(c.solver.eps_deg > 0.0 && c.solver.eps_deg < 1.0, "solver.eps_deg must be in (0, 1)");
  require(c.solver.substep_iters >= 0, "solver.substep_iters must be >= 0");
  require(c.solver.blowup > 0.0, "solver.blowup must be > 0");
  require(c.solver.picard_tol > 0.0, "solver.picard_tol must be > 0");
  require(c.solver.picard_max_iter >= 1, "solver.picard_max_iter must be >= 1");

  num("analysis.window_fraction", c.analysis.window_fraction);
  num("analysis.abar", c.analysis.abar);
  require(c.analysis.window_fraction > 0.0 && c.analysis.window_fraction <= 1.0,
          "analysis.window_fraction must be in (0, 1]");
  require(c.analysis.abar > 0.0, "analysis.abar must be > 0");

  if (const auto* v = get("sweep.amplitudes"))
    c.sweep.amplitudes = parse_double_list("sweep.amplitudes", *v);
  if (const auto* v = get("sweep.b_values"))
    c.sweep.b_values = parse_double_list("sweep.b_values", *v);
  if (const auto* v = get("sweep.s_values")) c.sweep.s_values = parse_int_list("sweep.s_values", *v);
  for (double a : c.sweep.amplitudes) require(a > 0.0, "sweep.amplitudes must be > 0");
  for (double b : c.sweep.b_values) require(b > 0.0, "sweep.b_values must be > 0");
  for (int s : c.sweep.s_values) require(s == 0 || s == 1, "sweep.s_values must be 0 or 1");

  if (const auto* v = get("convergence.modes"))
    c.convergence.modes = parse_int_list("convergence.modes", *v);
  if (const auto* v = get("convergence.dts"))
    c.convergence.dts = parse_double_list("convergence.dts", *v);
  num("convergence.epsilon", c.convergence.epsilon);
  num("convergence.T", c.convergence.T);
  num("convergence.amplitude", c.convergence.amplitude);
  for (int m : c.convergence.modes) require(m >= 1, "convergence.modes must be >= 1");
  for (double d : c.convergence.dts) require(d > 0.0, "convergence.dts must be > 0");
  require(c.convergence.modes.size() >= 2, "convergence.modes needs at least two entries");
  require(c.convergence.dts.size() >= 3, "convergence.dts needs at least three entries");
  require(c.convergence.epsilon > 0.0 && c.convergence.T > 0.0 && c.convergence.amplitude > 0.0,
          "convergence.epsilon, T and amplitude must be > 0");

  integer("output.stride", c.output_stride);
  require(c.output_stride >= 1, "output.stride must be >= 1");

  c.raw = std::move(raw);
  return c;
}

}  // namespace

std::uint64_t SolverConfig::hash() const {
  // FNV-1a over the canonical key=value lines
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : raw) feed(k + "=" + v + "\n");
  feed("seed=" + std::to_string(seed) + "\n");
  return h;
}

std::string SolverConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

StepperConfig SolverConfig::stepper() const {
  StepperConfig s;
  s.substep_iters = solver.substep_iters;
  s.eps_deg = solver.eps_deg;
  s.blowup = solver.blowup;
  return s;
}

PicardOptions SolverConfig::picard() const {
  PicardOptions p;
  p.tol = solver.picard_tol;
  p.max_iter = solver.picard_max_iter;
  p.eps_deg = solver.eps_deg;
  p.blowup = solver.blowup;
  return p;
}

SolverConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed) {
  std::istringstream in(text);
  return build(read_ini(in), overrides, seed);
}

SolverConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return build(read_ini(in), overrides, seed);
}

InitialFields make_initial_fields(const BasisPtr& basis, const InitialSpec& spec,
                                  std::uint64_t seed) {
  SpectralField shape(basis);
  const int dim = basis->dimension();
  if (spec.preset == "single-mode") {
    shape = SpectralField::single_mode(basis, 1.0, spec.mode, dim == 2 ? spec.mode_y : 1);
  } else if (spec.preset == "multi-mode") {
    for (int k = 1; k <= spec.count; ++k)
      shape[basis->flat_index(k, 1)] = std::ldexp(1.0, 1 - k);
  } else if (spec.preset == "random") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double peak = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      const auto idx = basis->mode_index(i);
      const double kk = std::hypot(static_cast<double>(idx[0]),
                                   dim == 2 ? static_cast<double>(idx[1]) : 0.0);
      shape[i] = normal(rng) * std::pow(kk, -spec.spectrum_power);
    }
    peak = grid_max_abs(dealiased_samples(shape));
    if (peak > 0.0) shape *= 1.0 / peak;
  }
  return {spec.amplitude * shape, spec.u1_amplitude * shape, spec.u2_amplitude * shape};
}

}  // namespace bck::cli
