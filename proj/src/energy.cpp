#include "bck/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bck/errors.hpp"

namespace bck {

namespace {

double sq(double x) { return x * x; }

double trapezoid(const std::vector<double>& y, double dt) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dt;
}

// running trapezoid integral, out[0] = 0
std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double dt) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (y[i - 1] + y[i]);
  return out;
}

SpectralField centred_difference(std::span<const SpectralField> v, std::size_t i, double dt) {
  const std::size_t n = v.size();
  if (n < 2) return SpectralField(v[i].basis_ptr());
  if (i == 0) return (1.0 / dt) * (v[1] - v[0]);
  if (i + 1 == n) return (1.0 / dt) * (v[n - 1] - v[n - 2]);
  return (0.5 / dt) * (v[i + 1] - v[i - 1]);
}

}  // namespace

WFields w_field(const EvolutionState& st, const SpectralField& uttt, const ModelParams& p) {
  return {st.ut + p.a * fractional_power(st.u, 1.0), st.utt + p.a * fractional_power(st.ut, 1.0),
          uttt + p.a * fractional_power(st.utt, 1.0)};
}

double linear_energy(const EvolutionState& st, const ModelParams& p) {
  const auto lam = st.u.basis().eigenvalues();
  SpectralField v = st.utt;
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] += p.b * lam[i] * st.ut[i] + p.c * p.c * lam[i] * st.u[i];
  return sq(sobolev_norm(st.u, 4)) + sq(sobolev_norm(st.ut, 4)) + sq(sobolev_norm(v, 2));
}

EnergyReport energies(const EvolutionState& st, const SpectralField& uttt, const ModelParams& p,
                      const SpectralField* utttt) {
  EnergyReport r;
  r.t = st.t;
  const WFields w = w_field(st, uttt, p);
  r.E1 = 0.5 * (sq(sobolev_norm(w.wtt, 1)) + sq(sobolev_norm(w.wt, 1)) + sq(sobolev_norm(w.w, 2)));
  r.E2 = 0.5 * (sq(sobolev_norm(uttt, 1)) + sq(sobolev_norm(st.utt, 2)) +
                sq(sobolev_norm(st.ut, 3)) + sq(sobolev_norm(st.u, 3)));
  r.E_total = r.E1 + r.E2;
  if (utttt) {
    r.has_k = true;
    r.k_functional = sq(sobolev_norm(*utttt, 0)) + sq(sobolev_norm(uttt, 2)) +
                     sq(sobolev_norm(st.utt, 3)) + sq(sobolev_norm(st.ut, 4)) +
                     sq(sobolev_norm(st.u, 4));
  }
  r.linear_energy = linear_energy(st, p);
  r.sobolev["H4_u"] = sobolev_norm(st.u, 4);
  r.sobolev["H3_u"] = sobolev_norm(st.u, 3);
  r.sobolev["H4_ut"] = sobolev_norm(st.ut, 4);
  r.sobolev["H3_ut"] = sobolev_norm(st.ut, 3);
  r.sobolev["H3_utt"] = sobolev_norm(st.utt, 3);
  r.sobolev["H2_utt"] = sobolev_norm(st.utt, 2);
  r.sobolev["H1_uttt"] = sobolev_norm(uttt, 1);
  r.sobolev["H2_uttt"] = sobolev_norm(uttt, 2);
  if (utttt) r.sobolev["L2_utttt"] = sobolev_norm(*utttt, 0);
  r.linf_ut = grid_max_abs(dealiased_samples(st.ut));
  r.decay_norm_sum = sq(r.sobolev["H4_u"]) + sq(r.sobolev["H3_ut"]) + sq(r.sobolev["H3_utt"]) +
                     sq(r.sobolev["H1_uttt"]);
  return r;
}

std::vector<EnergyReport> energy_series(const Trajectory& traj, const ModelParams& params) {
  std::vector<EnergyReport> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const SpectralField d4 = traj.utttt(i);
    out.push_back(energies(traj.states[i], traj.uttt[i], params, &d4));
  }
  return out;
}

// -- heat identity ------------------------------------------------------------------

HeatAudit heat_identity_audit(std::span<const SpectralField> v, std::span<const SpectralField> vt,
                              double dt, double a) {
  HeatAudit h;
  if (v.empty()) return h;
  if (!vt.empty() && vt.size() != v.size())
    throw std::invalid_argument("heat_identity_audit: v and v_t lengths differ");
  const std::size_t n = v.size();
  std::vector<double> lhs_i(n);
  std::vector<double> vt_i(n);
  std::vector<double> av_i(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SpectralField d = vt.empty() ? centred_difference(v, i, dt) : vt[i];
    const SpectralField av = fractional_power(v[i], 1.0);
    lhs_i[i] = sq(sobolev_norm(d + a * av, 0));
    vt_i[i] = sq(sobolev_norm(d, 0));
    av_i[i] = sq(a * sobolev_norm(av, 0));
  }
  const double b_end = a * sq(sobolev_norm(v[n - 1], 1));
  const double b_start = a * sq(sobolev_norm(v[0], 1));
  const double integral = trapezoid(vt_i, dt) + trapezoid(av_i, dt);
  h.lhs = trapezoid(lhs_i, dt);
  h.rhs = b_end - b_start + integral;
  const double scale = std::abs(h.lhs) + b_end + b_start + integral;
  h.residual = scale > 0.0 ? std::abs(h.lhs - h.rhs) / scale : 0.0;
  return h;
}

double HeatInstances::max_residual() const {
  double m = 0.0;
  for (const auto& a : audits) m = std::max(m, a.residual);
  return m;
}

HeatInstances heat_identity_instances(const Trajectory& tr, const ModelParams& p) {
  const std::size_t n = tr.size();
  std::array<std::vector<SpectralField>, 4> v;
  std::array<std::vector<SpectralField>, 4> vt;
  for (std::size_t i = 0; i < n; ++i) {
    const EvolutionState& s = tr.states[i];
    v[0].push_back(tr.uttt[i]);
    vt[0].push_back(tr.utttt(i));
    v[1].push_back(fractional_power(s.utt, 0.5));
    vt[1].push_back(fractional_power(tr.uttt[i], 0.5));
    v[2].push_back(fractional_power(s.ut, 1.0));
    vt[2].push_back(fractional_power(s.utt, 1.0));
    v[3].push_back(fractional_power(s.u, 1.0));
    vt[3].push_back(fractional_power(s.ut, 1.0));
  }
  HeatInstances out;
  for (int k = 0; k < 4; ++k) out.audits[k] = heat_identity_audit(v[k], vt[k], tr.dt, p.a);
  return out;
}

// -- estimates --------------------------------------------------------------------

std::vector<SpectralField> forcing_series(const Trajectory& tr, const ModelParams& p,
                                          const SourceFn& source) {
  std::vector<SpectralField> f;
  f.reserve(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    SpectralField fi = forcing_f(tr.states[i], tr.uttt[i], p);
    if (source) fi += source(tr.t(i));
    f.push_back(std::move(fi));
  }
  return f;
}

EstimateAudit estimate_audit_linear(const Trajectory& tr, std::span<const SpectralField> f,
                                    const ModelParams& p) {
  if (f.size() != tr.size())
    throw std::invalid_argument("estimate_audit_linear: forcing and trajectory lengths differ");
  EstimateAudit audit;
  const std::size_t n = tr.size();
  if (n == 0) return audit;
  const auto series = energy_series(tr, p);
  std::vector<double> e(n);
  std::vector<double> ek(n);
  std::vector<double> ff(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = series[i].E_total;
    ek[i] = series[i].E_total + series[i].k_functional;
    ff[i] = sq(sobolev_norm(f[i], 0)) + sq(sobolev_norm(centred_difference(f, i, tr.dt), 0));
  }
  const auto int_ek = cumulative_trapezoid(ek, tr.dt);
  const auto int_ff = cumulative_trapezoid(ff, tr.dt);
  audit.t.resize(n);
  audit.lhs.resize(n);
  audit.rhs.resize(n);
  const double tiny = 1e-300;
  for (std::size_t i = 0; i < n; ++i) {
    audit.t[i] = tr.t(i);
    audit.lhs[i] = e[i] + int_ek[i];
    audit.rhs[i] = e[0] + int_ff[i];
    if (audit.rhs[i] > tiny) {
      audit.c_min = std::max(audit.c_min, audit.lhs[i] / audit.rhs[i]);
    } else if (audit.lhs[i] > tiny) {
      throw DivisionGuard("estimate audit: right side vanishes at t=" + short_num(tr.t(i)) +
                          " while the left side is " + short_num(audit.lhs[i]));
    }
  }
  return audit;
}

BarrierAudit barrier_audit(const std::vector<EnergyReport>& series, double dt, double eta,
                           double c_hat) {
  BarrierAudit b;
  if (series.empty()) {
    b.pass = true;
    return b;
  }
  std::vector<double> ek(series.size());
  for (std::size_t i = 0; i < series.size(); ++i)
    ek[i] = series[i].E_total + series[i].k_functional;
  const auto integ = cumulative_trapezoid(ek, dt);
  const double e0 = series.front().E_total;
  const double barrier = 2.0 * std::max(1.0, c_hat) * eta;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double e = series[i].E_total;
    if (barrier > 0.0) b.max_ratio = std::max(b.max_ratio, e / barrier);
    else if (e > 0.0) b.max_ratio = std::numeric_limits<double>::infinity();
    const double lhs = e + 0.5 * integ[i];
    const double rhs = c_hat * e0;
    if (rhs > 0.0) b.integrated_ratio = std::max(b.integrated_ratio, lhs / rhs);
    else if (lhs > 0.0) b.integrated_ratio = std::numeric_limits<double>::infinity();
  }
  b.pass = b.max_ratio <= 1.0 && b.integrated_ratio <= 1.0;
  return b;
}

// -- decay fit ----------------------------------------------------------------------

DecayFit decay_fit(std::span<const double> t, std::span<const double> energy,
                   double window_fraction, std::optional<double> monotone_tol) {
  if (t.size() != energy.size()) throw FitError("decay_fit: t and energy lengths differ");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw FitError("decay_fit: window fraction must be in (0, 1]");
  const std::size_t n = t.size();
  const auto first = static_cast<std::size_t>(
      std::floor((1.0 - window_fraction) * static_cast<double>(n > 0 ? n - 1 : 0)));
  if (n < 2 || n - first < 2) throw FitError("decay_fit: fewer than two samples in the window");

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double m = static_cast<double>(n - first);
  for (std::size_t i = first; i < n; ++i) {
    if (!(energy[i] > 0.0) || !std::isfinite(energy[i]))
      throw FitError("decay_fit: nonpositive energy " + short_num(energy[i]) +
                     " at t=" + short_num(t[i]));
    if (monotone_tol && i > first && energy[i] > energy[i - 1] * (1.0 + *monotone_tol))
      throw FitError("decay_fit: energy increases at t=" + short_num(t[i]));
    const double y = std::log(energy[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double denom = m * stt - st * st;
  if (!(denom > 0.0)) throw FitError("decay_fit: degenerate time window");
  const double slope = (m * sty - st * sy) / denom;
  const double icpt = (sy - slope * st) / m;

  DecayFit fit;
  fit.omega = -slope;
  fit.M = std::exp(icpt);
  fit.window_start = t[first];
  fit.window_end = t[n - 1];
  double ss = 0.0;
  for (std::size_t i = first; i < n; ++i) ss += sq(std::log(energy[i]) - (icpt + slope * t[i]));
  fit.residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace bck
