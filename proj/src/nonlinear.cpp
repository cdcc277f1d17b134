#include "bck/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bck/errors.hpp"

namespace bck {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::complete:
      return "complete";
    case SolveStatus::degenerate:
      return "degenerate";
    case SolveStatus::overflow:
      return "overflow";
  }
  return "unknown";
}

SpectralField Trajectory::utttt(std::size_t i) const {
  const std::size_t n = uttt.size();
  if (n < 2) return SpectralField(states.at(i).u.basis_ptr());
  if (i == 0) return (1.0 / dt) * (uttt[1] - uttt[0]);
  if (i + 1 == n) return (1.0 / dt) * (uttt[n - 1] - uttt[n - 2]);
  return (0.5 / dt) * (uttt[i + 1] - uttt[i - 1]);
}

Trajectory Trajectory::scaled(double alpha) const {
  Trajectory out = *this;
  for (auto& s : out.states) s = s.scaled(alpha);
  for (auto& f : out.uttt) f *= alpha;
  return out;
}

Trajectory difference(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || a.uttt.size() != b.uttt.size())
    throw std::invalid_argument("difference: trajectories have different lengths");
  Trajectory out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.states[i].u -= b.states[i].u;
    out.states[i].ut -= b.states[i].ut;
    out.states[i].utt -= b.states[i].utt;
  }
  for (std::size_t i = 0; i < a.uttt.size(); ++i) out.uttt[i] -= b.uttt[i];
  return out;
}

// -- stepper ----------------------------------------------------------------------

Stepper::Stepper(BasisPtr basis, const ModelParams& params, double dt, StepperConfig cfg,
                 SourceFn source)
    : params_(params), cfg_(cfg), source_(std::move(source)), prop_(std::move(basis), params, dt) {}

SpectralField Stepper::acceleration_at(const EvolutionState& state) const {
  AccelerationOptions opts;
  opts.eps_deg = cfg_.eps_deg;
  if (source_) {
    const SpectralField s = source_(state.t);
    return acceleration(state, params_, opts, &s);
  }
  return acceleration(state, params_, opts);
}

namespace {

double max_state_norm(const EvolutionState& s) {
  return std::max({sobolev_norm(s.u, 0), sobolev_norm(s.ut, 0), sobolev_norm(s.utt, 0)});
}

SemigroupState g_vector(const EvolutionState& st, const SpectralField& uttt,
                        const ModelParams& p) {
  return forcing_vector(uttt - linear_part(st, p));
}

}  // namespace

Stepper::Result Stepper::advance(const EvolutionState& state, const SpectralField& uttt) const {
  const double t1 = state.t + prop_.dt();
  const SemigroupState un = to_semigroup(state, params_);
  const SemigroupState gn = g_vector(state, uttt, params_);

  SemigroupState u1 = prop_.forced(un, gn, gn);
  EvolutionState s1 = from_semigroup(u1, params_, t1);
  for (int it = 0; it < cfg_.substep_iters; ++it) {
    const SpectralField a1 = acceleration_at(s1);
    u1 = prop_.forced(un, gn, g_vector(s1, a1, params_));
    s1 = from_semigroup(u1, params_, t1);
  }
  const double norm = max_state_norm(s1);
  if (!s1.is_finite() || norm > cfg_.blowup) throw OverflowError(t1, norm);
  // also enforces the guard at the new state
  SpectralField a1 = acceleration_at(s1);
  return {std::move(s1), std::move(a1)};
}

EvolutionState step(const EvolutionState& state, double dt, const ModelParams& params,
                    int substep_iters) {
  StepperConfig cfg;
  cfg.substep_iters = substep_iters;
  const Stepper stepper(state.u.basis_ptr(), params, dt, cfg);
  return stepper.advance(state, stepper.acceleration_at(state)).state;
}

Trajectory solve(const CompatibilityData& initial, const ModelParams& params, double T, double dt,
                 const StepperConfig& cfg, const SourceFn& source) {
  if (!(T >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("solve: need T >= 0 and dt > 0");
  const EvolutionState s0 = initial.state();
  const DegeneracyReport g0 = degeneracy_factor(s0, params, cfg.eps_deg);
  if (g0.degenerate) throw DegeneracyError(0.0, g0.worst_index, g0.guard_min);

  const Stepper stepper(s0.u.basis_ptr(), params, dt, cfg, source);
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(steps + 1);
  traj.uttt.reserve(steps + 1);
  traj.states.push_back(s0);
  traj.uttt.push_back(initial.uttt0);
  for (std::size_t n = 1; n <= steps; ++n) {
    try {
      auto r = stepper.advance(traj.states.back(), traj.uttt.back());
      // pin sample times to the grid to avoid drift from repeated addition
      r.state.t = s0.t + static_cast<double>(n) * dt;
      traj.states.push_back(std::move(r.state));
      traj.uttt.push_back(std::move(r.uttt));
    } catch (const DegeneracyError& e) {
      traj.status = SolveStatus::degenerate;
      traj.diagnostic = e.what();
      break;
    } catch (const OverflowError& e) {
      traj.status = SolveStatus::overflow;
      traj.diagnostic = e.what();
      break;
    }
  }
  return traj;
}

// -- fixed-point map ---------------------------------------------------------------

Trajectory picard_apply(const Trajectory& phi, const CompatibilityData& initial,
                        const ModelParams& params, double eps_deg, const SourceFn& source) {
  if (phi.size() == 0 || phi.uttt.size() != phi.size())
    throw std::invalid_argument("picard_apply: phi needs states and u_ttt at every sample");
  const std::size_t n = phi.size();
  std::vector<SpectralField> g(n);  // -f[phi] - S
  for (std::size_t i = 0; i < n; ++i) {
    const EvolutionState& st = phi.states[i];
    if (params.k != 0.0) {
      const DegeneracyReport rep = degeneracy_factor(st, params, eps_deg);
      if (rep.degenerate) throw DegeneracyError(st.t, rep.worst_index, rep.guard_min);
    }
    g[i] = params.is_linear() ? SpectralField(st.u.basis_ptr())
                              : -forcing_f(st, phi.uttt[i], params);
    if (source) g[i] -= source(st.t);
  }
  std::vector<SemigroupState> forcing;
  forcing.reserve(n);
  for (const auto& gi : g) forcing.push_back(forcing_vector(gi));

  const std::vector<SemigroupState> U =
      solve_duhamel(to_semigroup(initial.state(), params), forcing, phi.dt, params);

  Trajectory out;
  out.dt = phi.dt;
  out.states.reserve(n);
  out.uttt.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    EvolutionState st = from_semigroup(U[i], params, phi.states[i].t);
    // the linear equation gives u_ttt = Lin(u) - f[phi] - S exactly
    out.uttt.push_back(linear_part(st, params) + g[i]);
    out.states.push_back(std::move(st));
  }
  return out;
}

PicardResult picard_solve(const CompatibilityData& initial, const ModelParams& params, double T,
                          double dt, const PicardOptions& opts, const SourceFn& source) {
  if (!(T >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("picard: need T >= 0 and dt > 0");
  const EvolutionState s0 = initial.state();
  const DegeneracyReport g0 = degeneracy_factor(s0, params, opts.eps_deg);
  if (g0.degenerate) throw DegeneracyError(0.0, g0.worst_index, g0.guard_min);

  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  Trajectory zero;
  zero.dt = dt;
  for (std::size_t i = 0; i <= steps; ++i) {
    zero.states.push_back(EvolutionState::zero(s0.u.basis_ptr(), s0.t + static_cast<double>(i) * dt));
    zero.uttt.emplace_back(s0.u.basis_ptr());
  }
  ModelParams lin = params;
  lin.k = 0.0;
  lin.s = 0;

  PicardResult res;
  res.trajectory = picard_apply(zero, initial, lin, opts.eps_deg, source);
  for (int m = 0; m < opts.max_iter; ++m) {
    Trajectory next = picard_apply(res.trajectory, initial, params, opts.eps_deg, source);
    for (const auto& st : next.states)
      if (!st.is_finite() || max_state_norm(st) > opts.blowup)
        throw NonConvergenceError("picard: iterate blew up at m=" + std::to_string(m + 1),
                                  res.report.ratios);
    const double inc = v_norm(difference(next, res.trajectory));
    const double size = v_norm(next);
    res.report.increments.push_back(inc);
    double ratio = 0.0;
    if (res.report.increments.size() >= 2) {
      const double prev = res.report.increments[res.report.increments.size() - 2];
      if (prev > 0.0) {
        ratio = inc / prev;
        res.report.ratios.push_back(ratio);
      }
    }
    if (opts.on_iteration) opts.on_iteration(m + 1, inc, ratio);
    res.trajectory = std::move(next);
    res.report.iterations = m + 1;
    res.report.final_residual = size > 0.0 ? inc / size : inc;
    if (inc <= opts.tol * size) {
      res.report.converged = true;
      return res;
    }
  }
  throw NonConvergenceError("picard: no convergence in " + std::to_string(opts.max_iter) +
                                " iterations, last relative increment " +
                                short_num(res.report.final_residual),
                            res.report.ratios);
}

// -- norms ------------------------------------------------------------------------

namespace {

double trapezoid(const std::vector<double>& y, double dt) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dt;
}

double sq(double x) { return x * x; }

// ||d_t^i v||_{H^s}^2 at every sample, i = 0..4.
struct DerivativeNorms {
  std::array<std::array<std::vector<double>, 5>, 5> by_order;  // [i][s]

  explicit DerivativeNorms(const Trajectory& tr) {
    const std::size_t n = tr.size();
    for (auto& row : by_order)
      for (auto& v : row) v.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const EvolutionState& st = tr.states[j];
      const SpectralField d4 = tr.utttt(j);
      const SpectralField* fields[5] = {&st.u, &st.ut, &st.utt, &tr.uttt[j], &d4};
      for (int i = 0; i < 5; ++i)
        for (int s = 0; s < 5; ++s) by_order[i][s][j] = sq(sobolev_norm(*fields[i], s));
    }
  }

  // sum over derivative orders 0..m of ||d_t^i v||_{H^s}^2 per sample
  std::vector<double> cumulative(int m, int s) const {
    std::vector<double> out(by_order[0][s].size(), 0.0);
    for (int i = 0; i <= m; ++i)
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += by_order[i][s][j];
    return out;
  }
};

double sup(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

VNormReport vtilde_norm(const Trajectory& tr) {
  VNormReport r;
  if (tr.size() == 0) return r;
  const DerivativeNorms d(tr);
  const auto& b = d.by_order;
  r.components[0] = trapezoid(b[4][0], tr.dt);
  r.components[1] = trapezoid(b[3][1], tr.dt);
  r.components[2] = trapezoid(b[2][1], tr.dt);
  r.components[3] = sup(b[2][2]);
  r.components[4] = trapezoid(b[1][1], tr.dt);
  r.components[5] = sup(b[1][3]);
  r.components[6] = sup(b[0][3]);
  r.max = *std::max_element(r.components.begin(), r.components.end());
  return r;
}

double v_norm(const Trajectory& tr) {
  if (tr.size() == 0) return 0.0;
  const DerivativeNorms d(tr);
  double s = 0.0;
  s += sup(d.by_order[0][4]);
  s += trapezoid(d.cumulative(1, 4), tr.dt);
  s += sup(d.cumulative(2, 3));
  s += trapezoid(d.cumulative(2, 3), tr.dt);
  s += sup(d.cumulative(3, 1));
  s += trapezoid(d.cumulative(3, 2), tr.dt);
  s += trapezoid(d.cumulative(4, 0), tr.dt);
  return std::sqrt(s);
}

}  // namespace bck
