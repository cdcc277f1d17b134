#include "bck/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bck/errors.hpp"

namespace bck {

void ModelParams::validate() const {
  auto bad = [](double v) { return !std::isfinite(v); };
  if (bad(a) || !(a > 0.0)) throw std::invalid_argument("params: a must be > 0");
  if (bad(b) || b < 0.0) throw std::invalid_argument("params: b must be >= 0");
  if (bad(c) || !(c > 0.0)) throw std::invalid_argument("params: c must be > 0");
  if (bad(k) || k < 0.0) throw std::invalid_argument("params: k must be >= 0");
  if (s != 0 && s != 1) throw std::invalid_argument("params: s must be 0 or 1");
}

double ModelParams::degeneracy_threshold() const {
  return k > 0.0 ? 1.0 / (2.0 * k) : std::numeric_limits<double>::infinity();
}

ModelParams derive_params(const PhysicalParams& p) {
  for (double v : {p.nu, p.Pr, p.Lambda, p.c0})
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("physical: nu, Pr, Lambda, c0 must be positive");
  if (p.gamma.has_value() == p.B_over_A.has_value())
    throw std::invalid_argument("physical: give exactly one of gamma or B_over_A");
  const double nonlin = p.gamma ? *p.gamma - 1.0 : *p.B_over_A;
  if (p.gamma && !(*p.gamma > 0.0)) throw std::invalid_argument("physical: gamma must be > 0");
  if (p.B_over_A && !(*p.B_over_A > 0.0))
    throw std::invalid_argument("physical: B_over_A must be > 0");
  ModelParams m;
  m.a = p.nu / p.Pr;
  m.b = (p.Lambda + nonlin / p.Pr) * p.nu;
  m.c = p.c0;
  m.k = nonlin / (2.0 * p.c0 * p.c0);
  m.s = 1;
  return m;
}

EvolutionState EvolutionState::zero(const BasisPtr& basis, double t) {
  return {t, SpectralField(basis), SpectralField(basis), SpectralField(basis)};
}

bool EvolutionState::is_finite() const {
  return std::isfinite(t) && u.is_finite() && ut.is_finite() && utt.is_finite();
}

EvolutionState EvolutionState::scaled(double alpha) const {
  return {t, alpha * u, alpha * ut, alpha * utt};
}

DegeneracyReport degeneracy_factor(const EvolutionState& state, const ModelParams& params,
                                   double eps_deg) {
  DegeneracyReport r;
  r.factor = dealiased_samples(state.ut);
  double max_abs = 0.0;
  double min_f = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < r.factor.samples.size(); ++j) {
    const double v = r.factor.samples[j];
    if (std::abs(v) > max_abs) {
      max_abs = std::abs(v);
      r.worst_index = j;
    }
    const double f = 1.0 + 2.0 * params.k * v;
    r.factor.samples[j] = f;
    min_f = std::min(min_f, f);
  }
  r.min_factor = min_f;
  r.guard_min = 1.0 - 2.0 * params.k * max_abs;
  r.degenerate = !(r.guard_min > eps_deg);
  return r;
}

SpectralField linear_part(const EvolutionState& state, const ModelParams& p) {
  const auto lam = state.u.basis().eigenvalues();
  SpectralField out(state.u.basis_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double l = lam[i];
    out[i] = -(p.a + p.b) * l * state.utt[i] - p.c * p.c * l * state.ut[i] -
             p.a * p.b * l * l * state.ut[i] - p.a * p.c * p.c * l * l * state.u[i];
  }
  return out;
}

namespace {

// 2s (|grad u_t|^2 + grad u . grad u_tt) accumulated into `acc` on the dealiasing grid.
void add_gradient_terms(const EvolutionState& st, double two_s, std::vector<double>& acc) {
  const Basis& basis = st.u.basis();
  for (int ax = 0; ax < basis.dimension(); ++ax) {
    const GridField dut = dealiased_samples(st.ut, ax);
    const GridField du = dealiased_samples(st.u, ax);
    const GridField dutt = dealiased_samples(st.utt, ax);
    kernels::multiply_add(basis.exec(), two_s, dut.samples, dut.samples, acc);
    kernels::multiply_add(basis.exec(), two_s, du.samples, dutt.samples, acc);
  }
}

// Grid values of 2k u_tt^2 + 2s(|grad u_t|^2 + grad u . grad u_tt).
std::vector<double> explicit_quadratic_grid(const EvolutionState& st, const ModelParams& p,
                                            bool force_gradient_terms) {
  const Basis& basis = st.u.basis();
  std::vector<double> acc(basis.grid_size(), 0.0);
  if (p.k != 0.0) {
    const GridField utt = dealiased_samples(st.utt);
    kernels::multiply_add(basis.exec(), 2.0 * p.k, utt.samples, utt.samples, acc);
  }
  if (p.s != 0 || force_gradient_terms) add_gradient_terms(st, 2.0 * p.s, acc);
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

SpectralField forcing_f(const EvolutionState& state, const SpectralField& uttt,
                        const ModelParams& p, bool force_gradient_terms) {
  const Basis& basis = state.u.basis();
  std::vector<double> acc = explicit_quadratic_grid(state, p, force_gradient_terms);
  if (p.k != 0.0) {
    const GridField ut = dealiased_samples(state.ut);
    const GridField x = dealiased_samples(uttt);
    kernels::multiply_add(basis.exec(), 2.0 * p.k, ut.samples, x.samples, acc);
  }
  return project_dealiased(GridField{state.u.basis_ptr(), GridKind::dealiasing, std::move(acc)});
}

SpectralField quadratic_potential(const EvolutionState& state, const ModelParams& p) {
  const Basis& basis = state.u.basis();
  std::vector<double> acc(basis.grid_size(), 0.0);
  if (p.k != 0.0) {
    const GridField ut = dealiased_samples(state.ut);
    kernels::multiply_add(basis.exec(), p.k, ut.samples, ut.samples, acc);
  }
  if (p.s != 0) {
    for (int ax = 0; ax < basis.dimension(); ++ax) {
      const GridField du = dealiased_samples(state.u, ax);
      kernels::multiply_add(basis.exec(), static_cast<double>(p.s), du.samples, du.samples, acc);
    }
  }
  return project_dealiased(GridField{state.u.basis_ptr(), GridKind::dealiasing, std::move(acc)});
}

SpectralField acceleration(const EvolutionState& state, const ModelParams& p,
                           const AccelerationOptions& opts, const SpectralField* source) {
  const BasisPtr& bp = state.u.basis_ptr();
  const Basis& basis = *bp;

  SpectralField rhs = linear_part(state, p);
  if (p.k != 0.0 || p.s != 0 || opts.force_gradient_terms) {
    std::vector<double> q = explicit_quadratic_grid(state, p, opts.force_gradient_terms);
    rhs -= project_dealiased(GridField{bp, GridKind::dealiasing, std::move(q)});
  }
  if (source) rhs -= *source;
  if (p.k == 0.0) return rhs;

  const DegeneracyReport guard = degeneracy_factor(state, p, opts.eps_deg);
  if (guard.degenerate) throw DegeneracyError(state.t, guard.worst_index, guard.guard_min);

  // weight 2k u_t on the dealiasing grid
  std::vector<double> wk = dealiased_samples(state.ut).samples;
  for (double& v : wk) v *= 2.0 * p.k;

  auto apply = [&](const SpectralField& x) {
    GridField g = dealiased_samples(x);
    kernels::multiply(basis.exec(), wk, g.samples, g.samples);
    SpectralField y = project_dealiased(g);
    y += x;
    return y;
  };

  SpectralField x(bp);
  SpectralField r = rhs;
  SpectralField d = r;
  double rr = dot(r.coeffs(), r.coeffs());
  const double stop = opts.cg_rel_tol * opts.cg_rel_tol * rr;
  for (int it = 0; it < opts.cg_max_iter && rr > stop && rr > 0.0; ++it) {
    const SpectralField md = apply(d);
    const double dmd = dot(d.coeffs(), md.coeffs());
    if (!(dmd > 0.0)) break;
    const double alpha = rr / dmd;
    x.axpy(alpha, d);
    r.axpy(-alpha, md);
    const double rr_new = dot(r.coeffs(), r.coeffs());
    d *= rr_new / rr;
    d += r;
    rr = rr_new;
  }
  return x;
}

SpectralField compatibility_uttt0(const SpectralField& u0, const SpectralField& u1,
                                  const SpectralField& u2, const ModelParams& params,
                                  double eps_deg) {
  AccelerationOptions opts;
  opts.eps_deg = eps_deg;
  return acceleration(EvolutionState{0.0, u0, u1, u2}, params, opts);
}

CompatibilityData CompatibilityData::make(SpectralField u0, SpectralField u1, SpectralField u2,
                                          const ModelParams& params, double eps_deg,
                                          const SourceFn& source) {
  CompatibilityData d{std::move(u0), std::move(u1), std::move(u2), {}};
  AccelerationOptions opts;
  opts.eps_deg = eps_deg;
  if (source) {
    const SpectralField s0 = source(0.0);
    d.uttt0 = acceleration(d.state(), params, opts, &s0);
  } else {
    d.uttt0 = acceleration(d.state(), params, opts);
  }
  return d;
}

EvolutionState CompatibilityData::state() const { return {0.0, u0, u1, u2}; }

double pde_residual(const EvolutionState& prev, const EvolutionState& cur,
                    const EvolutionState& next, const ModelParams& params,
                    const SourceFn& source) {
  const double dt = cur.t - prev.t;
  if (!(dt > 0.0) || std::abs((next.t - cur.t) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
    throw std::invalid_argument("pde_residual: states must be uniformly spaced in time");

  const SpectralField lin = linear_part(cur, params);
  const SpectralField uttt = (0.5 / dt) * (next.utt - prev.utt);
  SpectralField ntt(cur.u.basis_ptr());
  if (!params.is_linear()) {
    const SpectralField q0 = quadratic_potential(prev, params);
    const SpectralField q1 = quadratic_potential(cur, params);
    const SpectralField q2 = quadratic_potential(next, params);
    ntt = (1.0 / (dt * dt)) * (q2 - 2.0 * q1 + q0);
  }
  SpectralField res = lin - uttt - ntt;
  double scale = std::max({sobolev_norm(lin, 0), sobolev_norm(uttt, 0), sobolev_norm(ntt, 0)});
  if (source) {
    const SpectralField s = source(cur.t);
    res -= s;
    scale = std::max(scale, sobolev_norm(s, 0));
  }
  if (scale == 0.0) return 0.0;
  return sobolev_norm(res, 0) / scale;
}

}  // namespace bck
