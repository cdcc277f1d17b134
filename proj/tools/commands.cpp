#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include "bck/energy.hpp"
#include "bck/errors.hpp"
#include "bck/linear.hpp"
#include "bck/nonlinear.hpp"
#include "studies.hpp"

namespace bck::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

void write_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
  os << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

BasisPtr make_basis(const SolverConfig& cfg) { return Basis::create(cfg.domain, cfg.solver.exec); }

CompatibilityData initial_data(const SolverConfig& cfg, const BasisPtr& basis,
                               const ModelParams& params) {
  InitialFields f = make_initial_fields(basis, cfg.initial, cfg.seed);
  return CompatibilityData::make(std::move(f.u0), std::move(f.u1), std::move(f.u2), params,
                                 cfg.solver.eps_deg);
}

// Runs `fn`, storing its value under `key`; a FitError or DivisionGuard stores
// nan and the reason under `key`_error.
void guarded(Output& out, const std::string& key, const std::function<double()>& fn) {
  try {
    out.set(key, fn());
  } catch (const FitError& e) {
    out.set(key, kNaN);
    out.set(key + "_error", quoted(e.what()));
  } catch (const DivisionGuard& e) {
    out.set(key, kNaN);
    out.set(key + "_error", quoted(e.what()));
  }
}

std::optional<DecayFit> fit_into(Output& out, const std::string& name, const std::vector<double>& t,
                                 const std::vector<double>& e, double window) {
  try {
    const DecayFit f = decay_fit(t, e, window);
    out.set("fit_" + name + "_omega", f.omega);
    out.set("fit_" + name + "_M", f.M);
    out.set("fit_" + name + "_residual", f.residual);
    return f;
  } catch (const FitError& err) {
    out.set("fit_" + name + "_omega", kNaN);
    out.set("fit_" + name + "_error", quoted(err.what()));
    return std::nullopt;
  }
}

std::optional<SpectralBound> bound_if_defined(const ModelParams& p, double lambda0) {
  if (!(p.b > 0.0)) return std::nullopt;
  return spectral_bound(p, lambda0);
}

Outcome partial_outcome(const Trajectory& tr) {
  if (tr.status == SolveStatus::degenerate)
    return {2, "error=degeneracy message=" + quoted(tr.diagnostic)};
  return {4, "error=overflow message=" + quoted(tr.diagnostic)};
}

std::vector<double> column(const std::vector<EnergyReport>& s,
                           const std::function<double(const EnergyReport&)>& f) {
  std::vector<double> v;
  v.reserve(s.size());
  for (const auto& r : s) v.push_back(f(r));
  return v;
}

double decay_omega(const Trajectory& tr, const ModelParams& p, double window) {
  const auto series = energy_series(tr, p);
  return decay_fit(column(series, [](const EnergyReport& r) { return r.t; }),
                   column(series, [](const EnergyReport& r) { return r.decay_norm_sum; }), window)
      .omega;
}

// -2 max Re spectrum over the modes carrying data: the exact energy decay rate.
double excited_mode_rate(const CompatibilityData& d, const ModelParams& p) {
  const Basis& b = d.u0.basis();
  const auto lam = b.eigenvalues();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (d.u0[i] == 0.0 && d.u1[i] == 0.0 && d.u2[i] == 0.0) continue;
    worst = std::max(worst, mode_matrix(lam[i], p).max_real_part());
  }
  return -2.0 * worst;
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string> csv_columns = {
    "t",      "E1",     "E2",    "E_total", "k_functional", "linear_energy", "H4_u",
    "H3_ut",  "H3_utt", "H1_uttt", "Linf_ut", "guard_min",  "residual"};

// -- Output -------------------------------------------------------------------------

Output::Output(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path Output::artifact(const std::string& name) {
  if (std::find(artifacts_.begin(), artifacts_.end(), name) == artifacts_.end())
    artifacts_.push_back(name);
  return dir_ / name;
}

void Output::set(const std::string& key, double v) { set(key, fmt(v)); }

void Output::set(const std::string& key, const std::string& v) {
  for (auto& kv : summary_)
    if (kv.first == key) {
      kv.second = v;
      return;
    }
  summary_.emplace_back(key, v);
}

void Output::set_bool(const std::string& key, bool v) { set(key, std::string(v ? "true" : "false")); }

void Output::write_summary() {
  if (summary_.empty()) return;
  auto f = open(artifact("summary.txt"));
  for (const auto& [k, v] : summary_) f << k << ": " << v << '\n';
}

// -- exit codes -------------------------------------------------------------------

Outcome classify(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& x) {
    return {3, "error=config message=" + quoted(x.what())};
  } catch (const DegeneracyError& x) {
    return {2, "error=degeneracy t=" + fmt(x.time()) + " grid_index=" +
                   std::to_string(x.grid_index()) + " factor=" + fmt(x.factor())};
  } catch (const OverflowError& x) {
    return {4, "error=overflow t=" + fmt(x.time()) + " norm=" + fmt(x.norm())};
  } catch (const NonConvergenceError& x) {
    return {4, "error=nonconvergence ratios=" + join(x.ratios()) + " message=" + quoted(x.what())};
  } catch (const FitError& x) {
    return {4, "error=fit message=" + quoted(x.what())};
  } catch (const std::invalid_argument& x) {
    return {3, "error=invalid_argument message=" + quoted(x.what())};
  } catch (const std::exception& x) {
    return {1, "error=internal message=" + quoted(x.what())};
  } catch (...) {
    return {1, "error=internal message=\"unknown exception\""};
  }
}

// -- simulate ---------------------------------------------------------------------

Outcome cmd_simulate(const SolverConfig& cfg, Output& out) {
  const ModelParams& p = cfg.params;
  const BasisPtr basis = make_basis(cfg);
  const CompatibilityData data = initial_data(cfg, basis, p);
  const Trajectory tr = solve(data, p, cfg.solver.T, cfg.solver.dt, cfg.stepper());
  const auto series = energy_series(tr, p);
  const std::size_t n = tr.size();

  double guard_lo = std::numeric_limits<double>::infinity();
  double linf_hi = 0.0;
  {
    auto csv = open(out.artifact("trajectory.csv"));
    write_header(csv, csv_columns);
    for (std::size_t i = 0; i < n; ++i) {
      const double guard = degeneracy_factor(tr.states[i], p, cfg.solver.eps_deg).guard_min;
      guard_lo = std::min(guard_lo, guard);
      linf_hi = std::max(linf_hi, series[i].linf_ut);
      if (i % static_cast<std::size_t>(cfg.output_stride) != 0 && i + 1 != n) continue;
      double residual = kNaN;
      if (n >= 3) {
        const std::size_t j = std::clamp<std::size_t>(i, 1, n - 2);
        residual = pde_residual(tr.states[j - 1], tr.states[j], tr.states[j + 1], p);
      }
      const EnergyReport& r = series[i];
      write_row(csv, {r.t, r.E1, r.E2, r.E_total, r.k_functional, r.linear_energy,
                      r.sobolev.at("H4_u"), r.sobolev.at("H3_ut"), r.sobolev.at("H3_utt"),
                      r.sobolev.at("H1_uttt"), r.linf_ut, guard, residual});
    }
  }

  out.set("command", std::string("simulate"));
  out.set("status", std::string(to_string(tr.status)));
  if (!tr.diagnostic.empty()) out.set("diagnostic", quoted(tr.diagnostic));
  out.set("samples", static_cast<double>(n));
  out.set("t_end", n ? tr.states.back().t : 0.0);
  out.set("lambda0", basis->lambda0());

  const auto t = column(series, [](const EnergyReport& r) { return r.t; });
  const double window = cfg.analysis.window_fraction;
  const auto f_total = fit_into(out, "E_total", t, column(series, [](const EnergyReport& r) { return r.E_total; }), window);
  const auto f_lin = fit_into(out, "linear_energy", t, column(series, [](const EnergyReport& r) { return r.linear_energy; }), window);
  const auto f_sum = fit_into(out, "decay_norm_sum", t, column(series, [](const EnergyReport& r) { return r.decay_norm_sum; }), window);

  if (const auto sb = bound_if_defined(p, basis->lambda0())) {
    const double rate = 2.0 * std::abs(sb->value);
    out.set("spectral_bound", sb->value);
    out.set("spectral_branch", quoted(sb->branch));
    out.set("linear_rate", rate);
    if (f_lin) out.set("rate_ratio_linear_energy", f_lin->omega / rate);
    if (f_total) out.set("rate_ratio_E_total", f_total->omega / rate);
    if (f_sum) out.set("rate_ratio_decay_norm_sum", f_sum->omega / rate);
  }
  out.set("guard_min", n ? guard_lo : kNaN);
  out.set("max_linf_ut", linf_hi);
  if (p.k > 0.0) out.set("degeneracy_threshold", p.degeneracy_threshold());

  if (n >= 3) {
    const VNormReport vt = vtilde_norm(tr);
    out.set("vtilde_max", vt.max);
    out.set("abar", cfg.analysis.abar);
    out.set_bool("vtilde_small", vt.max <= cfg.analysis.abar);
    const HeatInstances heat = heat_identity_instances(tr, p);
    out.set("heat_max_residual", heat.max_residual());
    double c_hat = kNaN;
    guarded(out, "estimate_c_min", [&] {
      c_hat = estimate_audit_linear(tr, forcing_series(tr, p), p).c_min;
      return c_hat;
    });
    if (std::isfinite(c_hat) && !series.empty()) {
      const BarrierAudit ba = barrier_audit(series, tr.dt, series.front().E_total, c_hat);
      out.set("barrier_max_ratio", ba.max_ratio);
      out.set("barrier_integrated_ratio", ba.integrated_ratio);
      out.set_bool("barrier_pass", ba.pass);
    }
  }
  out.write_summary();
  if (tr.status != SolveStatus::complete) return partial_outcome(tr);
  return {};
}

// -- linear-analyze ---------------------------------------------------------------

Outcome cmd_linear_analyze(const SolverConfig& cfg, Output& out) {
  const ModelParams& p = cfg.params;
  if (!(p.b > 0.0)) throw ConfigError("params.b: linear-analyze needs b > 0");
  const BasisPtr basis = make_basis(cfg);
  const auto lam = basis->eigenvalues();
  const SpectralBound sb = spectral_bound(p, basis->lambda0());
  const double sup = spectral_sup(p, lam);

  // first ten modes, then the extremal ones: largest lambda and slowest mode
  std::vector<std::size_t> rows;
  std::vector<std::size_t> order(lam.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lam[x] < lam[y]; });
  for (std::size_t i = 0; i < std::min<std::size_t>(10, order.size()); ++i) rows.push_back(order[i]);
  std::size_t slowest = 0;
  double slowest_re = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double re = mode_matrix(lam[i], p).max_real_part();
    if (re > slowest_re) {
      slowest_re = re;
      slowest = i;
    }
  }
  for (std::size_t extra : {order.back(), slowest})
    if (std::find(rows.begin(), rows.end(), extra) == rows.end()) rows.push_back(extra);

  {
    auto csv = open(out.artifact("eigenvalues.csv"));
    write_header(csv, {"k0", "k1", "lambda", "heat_re", "plus_re", "plus_im", "minus_re",
                       "minus_im", "max_re"});
    for (std::size_t i : rows) {
      const ModeBlock mb = mode_matrix(lam[i], p);
      const auto k = basis->mode_index(i);
      write_row(csv, {double(k[0]), double(k[1]), lam[i], mb.eigenvalues[0].real(),
                      mb.eigenvalues[1].real(), mb.eigenvalues[1].imag(),
                      mb.eigenvalues[2].real(), mb.eigenvalues[2].imag(), mb.max_real_part()});
    }
  }
  out.set("command", std::string("linear-analyze"));
  out.set("modes", static_cast<double>(lam.size()));
  out.set("lambda0", basis->lambda0());
  out.set("lambda_max", basis->max_eigenvalue());
  out.set("spectral_bound", sb.value);
  out.set("branch", quoted(sb.branch));
  out.set("heat", sb.heat);
  out.set("oscillatory", sb.oscillatory);
  out.set("overdamped", sb.overdamped);
  out.set("numeric_sup", sup);
  out.set("discrepancy", std::abs(sup - sb.value));
  out.set("linear_rate", 2.0 * std::abs(sb.value));
  out.write_summary();
  return {};
}

// -- picard -----------------------------------------------------------------------

Outcome cmd_picard(const SolverConfig& cfg, Output& out) {
  const ModelParams& p = cfg.params;
  const BasisPtr basis = make_basis(cfg);
  const CompatibilityData data = initial_data(cfg, basis, p);
  out.set("command", std::string("picard"));

  std::vector<double> ratios;
  auto csv = open(out.artifact("picard.csv"));
  write_header(csv, {"iteration", "increment", "ratio"});
  PicardOptions opts = cfg.picard();
  opts.on_iteration = [&](int m, double inc, double ratio) {
    write_row(csv, {double(m), inc, m > 1 ? ratio : kNaN});
    csv.flush();
    if (m > 1) ratios.push_back(ratio);
  };

  PicardResult res;
  try {
    res = picard_solve(data, p, cfg.solver.T, cfg.solver.dt, opts);
  } catch (const std::exception&) {
    out.set("status", std::string("failed"));
    out.set("ratios", join(ratios));
    out.write_summary();
    throw;
  }
  const PicardReport& r = res.report;
  out.set("status", std::string("converged"));
  out.set("iterations", static_cast<double>(r.iterations));
  out.set("ratios", join(r.ratios));
  out.set("max_ratio", r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end()));
  out.set_bool("contraction", std::all_of(r.ratios.begin(), r.ratios.end(), [](double q) { return q < 1.0; }));
  out.set("final_residual", r.final_residual);

  const Trajectory stepped = solve(data, p, cfg.solver.T, cfg.solver.dt, cfg.stepper());
  if (stepped.status == SolveStatus::complete && stepped.size() == res.trajectory.size()) {
    const double vs = v_norm(stepped);
    const double diff = v_norm(difference(res.trajectory, stepped));
    out.set("v_norm", vs);
    out.set("stepper_v_diff", diff);
    out.set("stepper_v_rel_diff", vs > 0.0 ? diff / vs : diff);
  } else {
    out.set("stepper_status", std::string(to_string(stepped.status)));
  }
  out.write_summary();
  return {};
}

// -- convergence ------------------------------------------------------------------

Outcome cmd_convergence(const SolverConfig& cfg, Output& out) {
  const ConvergenceSpec& cs = cfg.convergence;
  DomainSpec d1 = cfg.domain;
  d1.dimension = 1;
  d1.quadrature_points = 0;
  d1.allow_aliasing = false;

  const auto spatial = spatial_convergence(d1, cfg.params, cs.epsilon, cs.T, cfg.solver.dt,
                                           cs.modes, cfg.stepper(), cfg.solver.exec);
  const BasisPtr basis = Basis::create(d1, cfg.solver.exec);
  const TemporalStudy temporal =
      temporal_convergence(basis, cfg.params, cs.amplitude, cs.T, cs.dts, cfg.stepper());
  DomainSpec da = d1;
  const AliasingCheck alias = aliasing_check(da, cfg.seed);

  {
    auto csv = open(out.artifact("convergence.csv"));
    write_header(csv, {"study", "modes", "dt", "error"});
    for (const auto& r : spatial) csv << "spatial," << r.modes << ',' << fmt(cfg.solver.dt) << ',' << fmt(r.error) << '\n';
    for (std::size_t i = 0; i < temporal.differences.size(); ++i)
      csv << "temporal," << d1.modes << ',' << fmt(temporal.dts[i]) << ',' << fmt(temporal.differences[i]) << '\n';
    csv << "product_aliased," << alias.modes << ",nan," << fmt(alias.error_aliased) << '\n';
    csv << "product_dealiased," << alias.modes << ",nan," << fmt(alias.error_dealiased) << '\n';
  }

  out.set("command", std::string("convergence"));
  for (const auto& r : spatial) out.set("spatial_error_N" + std::to_string(r.modes), r.error);
  if (spatial.size() >= 2) {
    const auto& a = spatial[spatial.size() - 2];
    const auto& b = spatial.back();
    out.set("spatial_ratio", a.error / b.error);
    out.set("spatial_decay_slope", std::log(a.error / b.error) / double(b.modes - a.modes));
  }
  for (std::size_t i = 0; i < temporal.orders.size(); ++i)
    out.set("temporal_order_" + std::to_string(i + 1), temporal.orders[i]);
  if (!temporal.orders.empty()) out.set("temporal_order", temporal.orders.back());
  out.set("aliased_product_error", alias.error_aliased);
  out.set("dealiased_product_error", alias.error_dealiased);
  out.set_bool("aliasing_flagged", alias.error_aliased > 1e3 * std::max(alias.error_dealiased, 1e-15));
  out.write_summary();
  return {};
}

// -- decay-study ------------------------------------------------------------------

Outcome cmd_decay_study(const SolverConfig& cfg, Output& out) {
  const BasisPtr basis = make_basis(cfg);
  const double window = cfg.analysis.window_fraction;
  const double T = cfg.solver.T;
  const double dt = cfg.solver.dt;
  const StepperConfig sc = cfg.stepper();

  auto csv = open(out.artifact("decay_study.csv"));
  write_header(csv, {"study", "amplitude", "a", "b", "c", "k", "s", "omega", "omega_linear",
                     "ratio", "closed_form_rate", "mode_rate"});
  out.set("command", std::string("decay-study"));

  auto data_for = [&](double amplitude, const ModelParams& p) {
    InitialSpec spec = cfg.initial;
    const double scale = cfg.initial.amplitude != 0.0 ? amplitude / cfg.initial.amplitude : 0.0;
    spec.amplitude = amplitude;
    spec.u1_amplitude *= scale;
    spec.u2_amplitude *= scale;
    InitialFields f = make_initial_fields(basis, spec, cfg.seed);
    return CompatibilityData::make(std::move(f.u0), std::move(f.u1), std::move(f.u2), p, cfg.solver.eps_deg);
  };
  auto run_omega = [&](const CompatibilityData& d, const ModelParams& p) {
    const Trajectory tr = solve(d, p, T, dt, sc);
    if (tr.status != SolveStatus::complete)
      throw FitError("decay-study run stopped early: " + tr.diagnostic);
    return decay_omega(tr, p, window);
  };
  auto closed = [&](const ModelParams& p) {
    const auto sb = bound_if_defined(p, basis->lambda0());
    return sb ? 2.0 * std::abs(sb->value) : kNaN;
  };

  ModelParams lin = cfg.params;
  lin.k = 0.0;
  lin.s = 0;

  // nonlinear against linear rate as the amplitude shrinks
  double last_ratio = kNaN;
  for (double A : cfg.sweep.amplitudes) {
    const double om = run_omega(data_for(A, cfg.params), cfg.params);
    const auto dl = data_for(A, lin);
    const double ol = run_omega(dl, lin);
    last_ratio = om / ol;
    const ModelParams& p = cfg.params;
    write_row(csv << "amplitude,", {A, p.a, p.b, p.c, p.k, double(p.s), om, ol, om / ol, closed(p),
                                    excited_mode_rate(dl, lin)});
  }
  if (!cfg.sweep.amplitudes.empty()) {
    const auto it = std::min_element(cfg.sweep.amplitudes.begin(), cfg.sweep.amplitudes.end());
    out.set("smallest_amplitude", *it);
    out.set("ratio_at_last_amplitude", last_ratio);
  }

  // local nonlinearity on and off at fixed k
  for (int s : cfg.sweep.s_values) {
    ModelParams p = cfg.params;
    p.s = s;
    const double om = run_omega(data_for(cfg.initial.amplitude, p), p);
    write_row(csv << "s_toggle,", {cfg.initial.amplitude, p.a, p.b, p.c, p.k, double(s), om, kNaN,
                                   kNaN, closed(p), kNaN});
    out.set("omega_s" + std::to_string(s), om);
  }

  // linear rate across the branches of the spectral bound
  for (double b : cfg.sweep.b_values) {
    ModelParams p = lin;
    p.b = b;
    const auto d = data_for(cfg.initial.amplitude, p);
    const DecayFit f = linear_decay_report(d.state(), p, T, dt);
    const auto sb = bound_if_defined(p, basis->lambda0());
    const double mode_rate = excited_mode_rate(d, p);
    write_row(csv << "b_sweep,", {cfg.initial.amplitude, p.a, b, p.c, 0.0, 0.0, f.omega, kNaN,
                                  f.omega / mode_rate, closed(p), mode_rate});
    if (sb) out.set("branch_b" + fmt(b), quoted(sb->branch));
  }
  csv.close();
  out.write_summary();
  return {};
}

Outcome run_command(const std::string& command, const SolverConfig& cfg, Output& out) {
  static const std::map<std::string, Outcome (*)(const SolverConfig&, Output&)> table = {
      {"simulate", cmd_simulate},
      {"linear-analyze", cmd_linear_analyze},
      {"picard", cmd_picard},
      {"convergence", cmd_convergence},
      {"decay-study", cmd_decay_study}};
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command '" + command + "'");
  return it->second(cfg, out);
}

}  // namespace bck::cli
