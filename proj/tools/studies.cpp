#include "studies.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bck::cli {

namespace {

// modes beyond which 2 eps r^k is below double resolution of the leading term
constexpr int kManufacturedExtra = 48;
// corrector sweeps after which the trapezoid fixed point is reached to rounding
constexpr int kConvergedSweeps = 8;

double sq(double x) { return x * x; }

}  // namespace

SpectralField ManufacturedProblem::exact(double t) const { return (1.0 + t) * g; }

double ManufacturedProblem::tail_norm(double t) const {
  const int n = basis->modes();
  double s = 0.0;
  for (int k = n + 1; k <= n + kManufacturedExtra + 200; ++k)
    s += sq(2.0 * eps * (1.0 + t) * std::pow(r, k));
  return std::sqrt(s * basis->mode_norm_sq());
}

CompatibilityData ManufacturedProblem::data(double eps_deg) const {
  return CompatibilityData::make(g, g, SpectralField(basis), params, eps_deg, source);
}

ManufacturedProblem make_manufactured(const BasisPtr& basis, const ModelParams& params, double eps) {
  if (basis->dimension() != 1) throw std::invalid_argument("manufactured solution is 1D");
  ManufacturedProblem mp;
  mp.basis = basis;
  mp.params = params;
  mp.eps = eps;
  mp.r = 1.5 - std::sqrt(1.25);
  const int n = basis->modes();
  mp.g = SpectralField(basis);
  for (int k = 1; k <= n; ++k) mp.g[static_cast<std::size_t>(k - 1)] = 2.0 * eps * std::pow(mp.r, k);

  // P_N[|g'|^2] of the untruncated g, from a wider basis
  SpectralField grad_sq(basis);
  if (params.s != 0) {
    DomainSpec wide = basis->domain();
    wide.modes = n + kManufacturedExtra;
    wide.quadrature_points = 0;
    const BasisPtr big = Basis::create(wide, basis->exec());
    SpectralField gb(big);
    for (int k = 1; k <= wide.modes; ++k)
      gb[static_cast<std::size_t>(k - 1)] = 2.0 * eps * std::pow(mp.r, k);
    const SpectralField prod = gradient_dot(gb, gb);
    for (int k = 0; k < n; ++k) grad_sq[static_cast<std::size_t>(k)] = prod[static_cast<std::size_t>(k)];
  }

  // S(t) = Lin(u) - u_ttt - (k u_t^2 + s|grad u|^2)_tt with u_t = g, u_tt = u_ttt = 0
  const auto lam = basis->eigenvalues();
  SpectralField lin_const(basis);
  SpectralField lin_slope(basis);
  for (std::size_t i = 0; i < lin_const.size(); ++i) {
    const double l = lam[i];
    const double base = -params.c * params.c * l - params.a * params.b * l * l;
    const double u_coeff = -params.a * params.c * params.c * l * l;
    lin_const[i] = (base + u_coeff) * mp.g[i];
    lin_slope[i] = u_coeff * mp.g[i];
  }
  const SpectralField nonlin = (2.0 * params.s) * grad_sq;
  mp.source = [lin_const, lin_slope, nonlin](double t) {
    SpectralField s = lin_const;
    s.axpy(t, lin_slope);
    s -= nonlin;
    return s;
  };
  return mp;
}

std::vector<SpatialRow> spatial_convergence(const DomainSpec& base, const ModelParams& params,
                                            double eps, double T, double dt,
                                            const std::vector<int>& modes,
                                            const StepperConfig& cfg, Exec exec) {
  StepperConfig sc = cfg;
  sc.substep_iters = std::max(sc.substep_iters, kConvergedSweeps);
  std::vector<SpatialRow> rows;
  for (int n : modes) {
    DomainSpec d = base;
    d.dimension = 1;
    d.modes = n;
    d.quadrature_points = 0;
    d.allow_aliasing = false;
    const BasisPtr basis = Basis::create(d, exec);
    const ManufacturedProblem mp = make_manufactured(basis, params, eps);
    const Trajectory tr = solve(mp.data(sc.eps_deg), params, T, dt, sc, mp.source);
    if (tr.status != SolveStatus::complete)
      throw std::runtime_error("manufactured run stopped early: " + tr.diagnostic);
    const double t_end = tr.states.back().t;
    const double in_basis = sobolev_norm(tr.states.back().u - mp.exact(t_end), 0);
    rows.push_back({n, std::hypot(in_basis, mp.tail_norm(t_end))});
  }
  return rows;
}

TemporalStudy temporal_convergence(const BasisPtr& basis, const ModelParams& params,
                                   double amplitude, double T, const std::vector<double>& dts,
                                   const StepperConfig& cfg) {
  TemporalStudy st;
  st.dts = dts;
  const CompatibilityData data = CompatibilityData::make(
      SpectralField::single_mode(basis, amplitude, 1), SpectralField(basis), SpectralField(basis),
      params, cfg.eps_deg);
  std::vector<EvolutionState> finals;
  for (double dt : dts) {
    const Trajectory tr = solve(data, params, T, dt, cfg);
    if (tr.status != SolveStatus::complete)
      throw std::runtime_error("self-convergence run stopped early: " + tr.diagnostic);
    finals.push_back(tr.states.back());
  }
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    const EvolutionState& a = finals[i];
    const EvolutionState& b = finals[i + 1];
    st.differences.push_back(std::sqrt(sq(sobolev_norm(a.u - b.u, 0)) +
                                       sq(sobolev_norm(a.ut - b.ut, 0)) +
                                       sq(sobolev_norm(a.utt - b.utt, 0))));
  }
  for (std::size_t i = 0; i + 1 < st.differences.size(); ++i)
    st.orders.push_back(std::log(st.differences[i] / st.differences[i + 1]) /
                        std::log(dts[i] / dts[i + 1]));
  return st;
}

AliasingCheck aliasing_check(const DomainSpec& base, std::uint64_t seed) {
  AliasingCheck out;
  out.modes = base.modes;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto make_basis = [&](int m) {
    DomainSpec d = base;
    d.quadrature_points = m;
    d.allow_aliasing = true;
    return Basis::create(d, Exec::serial);
  };
  const BasisPtr ref = make_basis(2 * base.modes);
  const BasisPtr aliased = make_basis(base.modes);
  const BasisPtr dealiased = make_basis(DomainSpec::min_quadrature_points(base.modes));
  std::vector<double> fc(ref->size());
  std::vector<double> gc(ref->size());
  for (auto& v : fc) v = normal(rng);
  for (auto& v : gc) v = normal(rng);

  auto product = [&](const BasisPtr& b) {
    return product_dealiased(SpectralField(b, fc), SpectralField(b, gc));
  };
  const SpectralField exact = product(ref);
  auto err = [&](const SpectralField& p) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::abs(p[i] - exact[i]));
    return m;
  };
  out.error_aliased = err(product(aliased));
  out.error_dealiased = err(product(dealiased));
  return out;
}

}  // namespace bck::cli
