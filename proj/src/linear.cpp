#include "bck/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bck/errors.hpp"
#include "bck/expm.hpp"

namespace bck {

double ModeBlock::max_real_part() const {
  double m = eigenvalues[0].real();
  for (const auto& e : eigenvalues) m = std::max(m, e.real());
  return m;
}

ModeBlock mode_matrix(double lambda, const ModelParams& p) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mode_matrix: lambda must be > 0");
  ModeBlock blk;
  blk.lambda = lambda;
  const double c2l = p.c * p.c * lambda;
  const double bl = p.b * lambda;
  blk.matrix << 0.0, 1.0, 0.0, -c2l, -bl, 1.0, 0.0, 0.0, -p.a * lambda;

  blk.eigenvalues[0] = {-p.a * lambda, 0.0};
  const double disc = bl * bl - 4.0 * c2l;
  if (disc >= 0.0) {
    // q carries the larger-magnitude root; the other follows from the product c^2 lambda
    const double q = -0.5 * (bl + std::sqrt(disc));
    blk.eigenvalues[1] = {c2l / q, 0.0};
    blk.eigenvalues[2] = {q, 0.0};
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    blk.eigenvalues[1] = {-0.5 * bl, im};
    blk.eigenvalues[2] = {-0.5 * bl, -im};
  }
  return blk;
}

SpectralBound spectral_bound(const ModelParams& p, double lambda0) {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("spectral_bound: lambda0 must be > 0");
  if (!(p.b > 0.0)) throw std::invalid_argument("spectral_bound: requires b > 0");
  SpectralBound sb;
  sb.heat = p.a * lambda0;
  sb.oscillatory = 0.5 * p.b * lambda0;
  sb.overdamped = p.c * p.c / p.b;
  double m = sb.heat;
  sb.branch = "heat (aλ₀)";
  if (sb.oscillatory < m) {
    m = sb.oscillatory;
    sb.branch = "oscillatory (b/2·λ₀)";
  }
  if (sb.overdamped < m) {
    m = sb.overdamped;
    sb.branch = "overdamped (c²/b)";
  }
  sb.value = -m;
  return sb;
}

double spectral_sup(const ModelParams& params, std::span<const double> lambdas) {
  double m = -std::numeric_limits<double>::infinity();
  for (double l : lambdas) m = std::max(m, mode_matrix(l, params).max_real_part());
  return m;
}

SemigroupState SemigroupState::zero(const BasisPtr& basis) {
  return {basis, std::vector<std::array<double, 3>>(basis->size(), {0.0, 0.0, 0.0})};
}

bool SemigroupState::is_finite() const {
  return std::all_of(modes.begin(), modes.end(), [](const auto& m) {
    return std::isfinite(m[0]) && std::isfinite(m[1]) && std::isfinite(m[2]);
  });
}

SemigroupState to_semigroup(const EvolutionState& st, const ModelParams& p) {
  const BasisPtr& basis = st.u.basis_ptr();
  const auto lam = basis->eigenvalues();
  SemigroupState U{basis, std::vector<std::array<double, 3>>(basis->size())};
  for (std::size_t i = 0; i < U.modes.size(); ++i)
    U.modes[i] = {st.u[i], st.ut[i],
                  st.utt[i] + p.b * lam[i] * st.ut[i] + p.c * p.c * lam[i] * st.u[i]};
  return U;
}

EvolutionState from_semigroup(const SemigroupState& U, const ModelParams& p, double t) {
  EvolutionState st = EvolutionState::zero(U.basis, t);
  const auto lam = U.basis->eigenvalues();
  for (std::size_t i = 0; i < U.modes.size(); ++i) {
    const auto& m = U.modes[i];
    st.u[i] = m[0];
    st.ut[i] = m[1];
    st.utt[i] = m[2] - p.b * lam[i] * m[1] - p.c * p.c * lam[i] * m[0];
  }
  return st;
}

Propagator::Propagator(BasisPtr basis, const ModelParams& params, double dt)
    : basis_(std::move(basis)), params_(params), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Propagator: dt must be > 0");
  const auto lam = basis_->eigenvalues();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(lam.size());
  exp_.resize(lam.size());
  phi1_.resize(lam.size());
  phi2_.resize(lam.size());
  const bool par = basis_->exec() == Exec::parallel && n >= 64;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Eigen::Matrix3d a = mode_matrix(lam[static_cast<std::size_t>(i)], params_).matrix;
    Eigen::Matrix<double, 9, 9> aug = Eigen::Matrix<double, 9, 9>::Zero();
    aug.block<3, 3>(0, 0) = dt_ * a;
    aug.block<3, 3>(0, 3) = dt_ * Eigen::Matrix3d::Identity();
    aug.block<3, 3>(3, 6) = Eigen::Matrix3d::Identity();
    const Eigen::Matrix<double, 9, 9> e = expm<9>(aug);
    auto& ex = exp_[static_cast<std::size_t>(i)];
    auto& p1 = phi1_[static_cast<std::size_t>(i)];
    auto& p2 = phi2_[static_cast<std::size_t>(i)];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        ex[static_cast<std::size_t>(3 * r + c)] = e(r, c);
        p1[static_cast<std::size_t>(3 * r + c)] = e(r, 3 + c);
        p2[static_cast<std::size_t>(3 * r + c)] = e(r, 6 + c);
      }
  }
}

SemigroupState Propagator::homogeneous(const SemigroupState& U) const {
  SemigroupState out{basis_, std::vector<std::array<double, 3>>(U.modes.size())};
  kernels::apply_blocks(basis_->exec(), exp_, U.modes, out.modes);
  return out;
}

SemigroupState Propagator::forced(const SemigroupState& U, const SemigroupState& F0,
                                  const SemigroupState& F1) const {
  const std::size_t n = U.modes.size();
  std::vector<std::array<double, 3>> diff(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) diff[i][j] = F1.modes[i][j] - F0.modes[i][j];
  SemigroupState out{basis_, std::vector<std::array<double, 3>>(n)};
  kernels::apply_blocks(basis_->exec(), exp_, U.modes, out.modes);
  kernels::apply_blocks_add(basis_->exec(), phi1_, F0.modes, out.modes);
  kernels::apply_blocks_add(basis_->exec(), phi2_, diff, out.modes);
  return out;
}

SemigroupState step_homogeneous(const SemigroupState& U, const Propagator& prop) {
  return prop.homogeneous(U);
}

SemigroupState step_homogeneous(const SemigroupState& U, const ModelParams& params, double dt) {
  return Propagator(U.basis, params, dt).homogeneous(U);
}

SemigroupState forcing_vector(const SpectralField& g) {
  SemigroupState F = SemigroupState::zero(g.basis_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) F.modes[i][2] = g[i];
  return F;
}

std::vector<SemigroupState> solve_duhamel(const SemigroupState& initial,
                                          std::span<const SemigroupState> forcing, double dt,
                                          const ModelParams& params) {
  if (forcing.empty()) throw std::invalid_argument("solve_duhamel: empty forcing samples");
  const Propagator prop(initial.basis, params, dt);
  std::vector<SemigroupState> out;
  out.reserve(forcing.size());
  out.push_back(initial);
  for (std::size_t n = 0; n + 1 < forcing.size(); ++n)
    out.push_back(prop.forced(out.back(), forcing[n], forcing[n + 1]));
  return out;
}

namespace {

double semigroup_linear_energy(const SemigroupState& U) {
  const auto lam = U.basis->eigenvalues();
  double s = 0.0;
  for (std::size_t i = 0; i < U.modes.size(); ++i) {
    const double l2 = lam[i] * lam[i];
    const auto& m = U.modes[i];
    s += l2 * l2 * (m[0] * m[0] + m[1] * m[1]) + l2 * m[2] * m[2];
  }
  return s * U.basis->mode_norm_sq();
}

}  // namespace

DecayFit linear_decay_report(const EvolutionState& initial, const ModelParams& params, double T,
                             double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("linear_decay_report: T, dt > 0");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const Propagator prop(initial.u.basis_ptr(), params, dt);
  SemigroupState U = to_semigroup(initial, params);
  std::vector<double> t(steps + 1);
  std::vector<double> e(steps + 1);
  t[0] = initial.t;
  e[0] = semigroup_linear_energy(U);
  if (!(e[0] > 0.0)) throw FitError("linear_decay_report: zero initial data");
  for (std::size_t n = 1; n <= steps; ++n) {
    U = prop.homogeneous(U);
    t[n] = initial.t + static_cast<double>(n) * dt;
    e[n] = semigroup_linear_energy(U);
  }
  return decay_fit(t, e, 0.5, 1e-8);
}

double weighted_norm(const SemigroupState& U, const ModelParams& p, double alpha) {
  const auto lam = U.basis->eigenvalues();
  const double w = 0.5 * alpha * p.b;
  double s = 0.0;
  for (std::size_t i = 0; i < U.modes.size(); ++i) {
    const double l = lam[i];
    const auto& m = U.modes[i];
    s += w * w * l * l * l * l * m[0] * m[0] + l * l * m[1] * m[1] + m[2] * m[2];
  }
  return std::sqrt(s * U.basis->mode_norm_sq());
}

RelativeBoundSample relative_bound(const SemigroupState& U, const ModelParams& p, double alpha) {
  const auto lam = U.basis->eigenvalues();
  SemigroupState a1 = SemigroupState::zero(U.basis);
  SemigroupState a2 = SemigroupState::zero(U.basis);
  for (std::size_t i = 0; i < U.modes.size(); ++i) {
    const auto& m = U.modes[i];
    a1.modes[i] = {0.0, -p.b * lam[i] * m[1], -p.a * lam[i] * m[2]};
    a2.modes[i] = {m[1], -p.c * p.c * lam[i] * m[0] + m[2], 0.0};
  }
  RelativeBoundSample r;
  r.lhs = weighted_norm(a2, p, alpha);
  r.rhs = 0.5 * alpha * weighted_norm(a1, p, alpha) +
          std::sqrt(2.0) * std::max(2.0 * p.c * p.c / (alpha * p.b), 1.0) *
              weighted_norm(U, p, alpha);
  return r;
}

}  // namespace bck
