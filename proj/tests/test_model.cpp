#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bck/errors.hpp"
#include "bck/model.hpp"
#include "bck/nonlinear.hpp"
#include "oracles.hpp"

using namespace bck;

namespace {

constexpr double pi = std::numbers::pi;

BasisPtr basis1d(int n, double L = pi) {
  DomainSpec d;
  d.lengths = {L, L};
  d.modes = n;
  return Basis::create(d, Exec::serial);
}

SpectralField random_field(const BasisPtr& b, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField f(b);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = scale * n(rng) / double((i + 1) * (i + 1));
  return f;
}

std::vector<double> vec(const SpectralField& f) { return {f.coeffs().begin(), f.coeffs().end()}; }

double rel_diff(const SpectralField& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0 ? num / den : num;
}

double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (double v : f.coeffs()) m = std::max(m, std::abs(v));
  return m;
}

ModelParams params(double k, int s, double a = 1, double b = 1, double c = 1) {
  ModelParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.k = k;
  p.s = s;
  return p;
}

oracle::Params oparams(const ModelParams& p) { return {p.a, p.b, p.c, p.k, p.s}; }

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("parameter validation") {
    CHECK_NOTHROW(params(0.0, 0).validate());
    CHECK_THROWS_AS(params(-0.1, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(0.1, 2).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(0.1, 1, -1.0).validate(), std::invalid_argument);
    CHECK(params(0.25, 0).degeneracy_threshold() == 2.0);
    CHECK(std::isinf(params(0.0, 0).degeneracy_threshold()));
  }

  TEST_CASE("physical parameters") {
    PhysicalParams ph;
    ph.nu = 1e-5;
    ph.Pr = 0.7;
    ph.Lambda = 4.0 / 3.0;
    ph.c0 = 1.0;
    ph.gamma = 1.4;
    const ModelParams m = derive_params(ph);
    CHECK(std::abs(m.a - 1e-5 / 0.7) < 1e-12 * m.a);
    CHECK(std::abs(m.b - (4.0 / 3.0 + 0.4 / 0.7) * 1e-5) < 1e-12 * m.b);
    CHECK(std::abs(m.b - 1.904762e-5) < 1e-11);
    CHECK(std::abs(m.k - 0.2) < 1e-12);
    CHECK(m.c == 1.0);
    CHECK(m.s == 1);

    PhysicalParams ba = ph;
    ba.gamma.reset();
    ba.B_over_A = 5.0;
    ba.c0 = 2.0;
    CHECK(std::abs(derive_params(ba).k - 5.0 / 8.0) < 1e-12);

    PhysicalParams both = ph;
    both.B_over_A = 5.0;
    CHECK_THROWS_AS(derive_params(both), std::invalid_argument);
    PhysicalParams neg = ph;
    neg.nu = -1.0;
    CHECK_THROWS_AS(derive_params(neg), std::invalid_argument);
  }

  TEST_CASE("degeneracy factor") {
    const auto b = basis1d(16);
    const auto z = EvolutionState::zero(b);
    const auto r0 = degeneracy_factor(z, params(0.5, 0));
    CHECK(r0.min_factor == 1.0);
    CHECK(r0.guard_min == 1.0);
    for (double v : r0.factor.samples) CHECK(v == 1.0);

    EvolutionState st = z;
    st.ut = SpectralField::single_mode(b, 0.9, 1);
    const auto r = degeneracy_factor(st, params(0.5, 0));
    // grid max of 0.9 sin(x) is just below 0.9
    const double grid_max = grid_max_abs(dealiased_samples(st.ut));
    CHECK(std::abs(r.guard_min - (1.0 - grid_max)) < 1e-14);
    CHECK(r.guard_min >= 0.1 - 1e-14);
    CHECK(r.guard_min < 0.1 + 0.01);
    CHECK_FALSE(r.degenerate);
    CHECK(r.min_factor >= 1.0);

    st.ut = SpectralField::single_mode(b, -0.9, 1);
    const auto rn = degeneracy_factor(st, params(0.5, 0));
    CHECK(std::abs(rn.min_factor - rn.guard_min) < 1e-14);

    const auto rk = degeneracy_factor(st, params(0.0, 0));
    for (double v : rk.factor.samples) CHECK(v == 1.0);

    st.ut = SpectralField::single_mode(b, 0.97, 1);
    CHECK(degeneracy_factor(st, params(0.5, 0)).degenerate);
  }

  TEST_CASE("forcing f") {
    const auto b = basis1d(8);
    const auto z = EvolutionState::zero(b);
    CHECK(max_abs(forcing_f(z, SpectralField(b), params(0.3, 1))) == 0.0);

    EvolutionState st = z;
    st.utt = SpectralField::single_mode(b, 1.0, 1);
    const auto f = forcing_f(st, SpectralField(b), params(1.0, 0));
    const auto ref = oracle::sine_coeffs([](double x) { return 2 * std::sin(x) * std::sin(x); }, pi, 8);
    CHECK(rel_diff(f, ref) < 1e-12);

    std::mt19937_64 rng(3);
    EvolutionState r{0.0, random_field(b, rng), random_field(b, rng), random_field(b, rng)};
    const auto uttt = random_field(b, rng);
    const auto f1 = forcing_f(r, uttt, params(1.0, 0));
    const auto f2 = forcing_f(r, uttt, params(2.0, 0));
    CHECK(rel_diff(f2, vec(2.0 * f1)) < 1e-14);

    // full expansion against quadrature
    const auto fp = forcing_f(r, uttt, params(0.3, 1));
    const auto u = vec(r.u), ut = vec(r.ut), utt = vec(r.utt), u3 = vec(uttt);
    const auto fref = oracle::sine_coeffs(
        [&](double x) {
          using oracle::eval, oracle::eval_dx;
          return 2 * 0.3 * std::pow(eval(utt, pi, x), 2) + 2 * 0.3 * eval(ut, pi, x) * eval(u3, pi, x) +
                 2 * std::pow(eval_dx(ut, pi, x), 2) + 2 * eval_dx(u, pi, x) * eval_dx(utt, pi, x);
        },
        pi, 8);
    CHECK(rel_diff(fp, fref) < 1e-12);
  }

  TEST_CASE("s = 0 gradient path contributes exact zeros") {
    const auto b = basis1d(12);
    std::mt19937_64 rng(5);
    EvolutionState st{0.0, random_field(b, rng, 1e-2), random_field(b, rng, 1e-2), random_field(b, rng, 1e-2)};
    const auto uttt = random_field(b, rng);
    const ModelParams p = params(0.2, 0);
    const auto f0 = forcing_f(st, uttt, p, false);
    const auto f1 = forcing_f(st, uttt, p, true);
    CHECK(std::equal(f0.coeffs().begin(), f0.coeffs().end(), f1.coeffs().begin()));
    AccelerationOptions o0, o1;
    o1.force_gradient_terms = true;
    const auto a0 = acceleration(st, p, o0);
    const auto a1 = acceleration(st, p, o1);
    CHECK(std::equal(a0.coeffs().begin(), a0.coeffs().end(), a1.coeffs().begin()));
  }

  TEST_CASE("acceleration in the linear case") {
    const auto b = basis1d(4);
    CHECK(max_abs(acceleration(EvolutionState::zero(b), params(0.2, 1))) == 0.0);
    EvolutionState st = EvolutionState::zero(b);
    st.u = SpectralField::single_mode(b, 1.0, 1);
    CHECK(std::abs(acceleration(st, params(0, 0))[0] + 1.0) < 1e-12);

    std::mt19937_64 rng(9);
    EvolutionState r{0.0, random_field(b, rng), random_field(b, rng), random_field(b, rng)};
    const ModelParams p = params(0, 0, 0.3, 1.7, 2.2);
    const auto a = acceleration(r, p);
    const auto as = acceleration(r.scaled(3.5), p);
    CHECK(rel_diff(as, vec(3.5 * a)) < 1e-12);
    const auto lam = b->eigenvalues();
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::abs(a[i] - oracle::lin(lam[i], oparams(p), r.u[i], r.ut[i], r.utt[i])) <= 1e-12 * std::abs(a[i]));
  }

  TEST_CASE("nonlinear acceleration against the dense oracle") {
    const auto b = basis1d(8);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 3; ++trial) {
      EvolutionState st{0.0, random_field(b, rng), random_field(b, rng), random_field(b, rng)};
      const double s = 0.01 / grid_max_abs(dealiased_samples(st.ut));
      st = st.scaled(s);
      const ModelParams p = params(0.2, 1, 0.7, 1.3, 1.1);
      const auto a = acceleration(st, p);
      const auto ref = oracle::acceleration(vec(st.u), vec(st.ut), vec(st.utt), pi, oparams(p));
      CHECK(rel_diff(a, ref) < 1e-10);
    }
  }

  TEST_CASE("acceleration throws on degenerate data and skips the guard for k = 0") {
    const auto b = basis1d(8);
    EvolutionState st = EvolutionState::zero(b, 0.25);
    st.ut = SpectralField::single_mode(b, 1.0, 1);
    try {
      (void)acceleration(st, params(0.5, 0));
      FAIL("no DegeneracyError");
    } catch (const DegeneracyError& e) {
      CHECK(e.time() == 0.25);
      CHECK(e.factor() <= 0.05);
    }
    CHECK_NOTHROW((void)acceleration(st, params(0.0, 1)));
  }

  TEST_CASE("compatibility value") {
    const auto b = basis1d(8);
    const SpectralField z(b);
    CHECK(max_abs(compatibility_uttt0(z, z, z, params(0.2, 1))) == 0.0);

    std::mt19937_64 rng(13);
    const auto u0 = random_field(b, rng), u1 = random_field(b, rng), u2 = random_field(b, rng);
    const ModelParams p = params(0, 0, 0.4, 0.9, 1.6);
    const auto v = compatibility_uttt0(u0, u1, u2, p);
    // (a+b) Delta u2 + c^2 Delta u1 - ab Delta^2 u1 - ac^2 Delta^2 u0
    const auto lap = [](const SpectralField& f) { return -1.0 * fractional_power(f, 1.0); };
    const auto bih = [](const SpectralField& f) { return fractional_power(f, 2.0); };
    const SpectralField ref = (p.a + p.b) * lap(u2) + p.c * p.c * lap(u1) - p.a * p.b * bih(u1) -
                              p.a * p.c * p.c * bih(u0);
    CHECK(rel_diff(v, vec(ref)) < 1e-13);

    const auto m = SpectralField::single_mode(b, 0.01, 1);
    const ModelParams pn = params(0.2, 1);
    const auto vn = compatibility_uttt0(m, m, m, pn);
    const auto on = oracle::acceleration(vec(m), vec(m), vec(m), pi, oparams(pn));
    CHECK(rel_diff(vn, on) < 1e-10);

    const auto big = SpectralField::single_mode(b, 1.0, 1);
    CHECK_THROWS_AS(CompatibilityData::make(z, big, z, params(0.5, 0)), DegeneracyError);
    const auto cd = CompatibilityData::make(m, m, m, pn);
    CHECK(rel_diff(cd.uttt0, vec(vn)) == 0.0);
  }

  TEST_CASE("quadratic potential") {
    const auto b = basis1d(8);
    EvolutionState st = EvolutionState::zero(b);
    st.u = SpectralField::single_mode(b, 1.0, 1);
    st.ut = SpectralField::single_mode(b, 1.0, 2);
    const auto q = quadratic_potential(st, params(0.3, 1));
    const auto ref = oracle::sine_coeffs(
        [](double x) { return 0.3 * std::pow(std::sin(2 * x), 2) + std::pow(std::cos(x), 2); }, pi, 8);
    CHECK(rel_diff(q, ref) < 1e-12);
  }

  TEST_CASE("pde residual") {
    const auto b = basis1d(8);
    const auto z0 = EvolutionState::zero(b, 0.0), z1 = EvolutionState::zero(b, 0.1),
               z2 = EvolutionState::zero(b, 0.2);
    CHECK(pde_residual(z0, z1, z2, params(0.2, 1)) == 0.0);
    CHECK_THROWS_AS(pde_residual(z0, z1, EvolutionState::zero(b, 0.3), params(0.2, 1)), std::invalid_argument);

    // exact linear single-mode solution from the 3x3 ODE
    const ModelParams p = params(0, 0);
    Eigen::MatrixXd A(3, 3);
    A << 0, 1, 0, 0, 0, 1, -p.a * p.c * p.c, -p.c * p.c - p.a * p.b, -(p.a + p.b);
    Eigen::VectorXd y0(3);
    y0 << 1.0, 0.0, 0.0;
    const double dt = 1e-3, t = 0.5;
    auto state_at = [&](double tt) {
      const Eigen::VectorXd y = oracle::integrate_linear(A, y0, tt);
      EvolutionState s = EvolutionState::zero(b, tt);
      s.u[0] = y(0);
      s.ut[0] = y(1);
      s.utt[0] = y(2);
      return s;
    };
    const double r = pde_residual(state_at(t - dt), state_at(t), state_at(t + dt), p);
    CHECK(r < 1e-4);
    CHECK(r > 0.0);
  }

  TEST_CASE("compatibility consistency along a run") {
    const auto b = basis1d(8);
    const ModelParams p = params(0.2, 1);
    const auto data = CompatibilityData::make(SpectralField::single_mode(b, 1e-2, 1),
                                              SpectralField::single_mode(b, 1e-2, 2), SpectralField(b), p);
    std::vector<double> err;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      const Trajectory tr = solve(data, p, 2 * dt, dt);
      const SpectralField est = (1.0 / dt) * (tr.states[1].utt - tr.states[0].utt);
      err.push_back(sobolev_norm(est - data.uttt0, 0));
    }
    CHECK(err[0] / err[1] > 1.8);
    CHECK(err[1] / err[2] > 1.8);
  }

  TEST_CASE("forcing f is the second time derivative of the quadratic potential") {
    const auto b = basis1d(8);
    const ModelParams p = params(0.2, 1);
    const auto data = CompatibilityData::make(SpectralField::single_mode(b, 0.05, 1),
                                              SpectralField::single_mode(b, 0.05, 2), SpectralField(b), p);
    std::vector<double> err;
    const double T = 0.2;
    for (double dt : {0.02, 0.01, 0.005}) {
      const Trajectory tr = solve(data, p, T, dt);
      const std::size_t i = tr.size() / 2;
      const SpectralField d2 = (1.0 / (dt * dt)) * (quadratic_potential(tr.states[i + 1], p) -
                                                    2.0 * quadratic_potential(tr.states[i], p) +
                                                    quadratic_potential(tr.states[i - 1], p));
      err.push_back(sobolev_norm(d2 - forcing_f(tr.states[i], tr.uttt[i], p), 0));
    }
    CHECK(err[0] / err[1] > 3.0);
    CHECK(err[1] / err[2] > 3.0);
  }
}
