#include <doctest.h>
#include <omp.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "bck/errors.hpp"
#include "bck/linear.hpp"
#include "oracles.hpp"

using namespace bck;

namespace {

constexpr double pi = std::numbers::pi;

BasisPtr basis1d(int n, double L = pi, Exec e = Exec::serial) {
  DomainSpec d;
  d.lengths = {L, L};
  d.modes = n;
  return Basis::create(d, e);
}

ModelParams params(double a, double b, double c) {
  ModelParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  return p;
}

Eigen::MatrixXd to_eigen(const Eigen::Matrix3d& m) { return m; }

Eigen::VectorXd mode_vec(const SemigroupState& U, std::size_t i) {
  Eigen::VectorXd v(3);
  v << U.modes[i][0], U.modes[i][1], U.modes[i][2];
  return v;
}

double state_diff(const SemigroupState& a, const SemigroupState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.modes.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) m = std::max(m, std::abs(a.modes[i][j] - b.modes[i][j]));
  return m;
}

SemigroupState random_state(const BasisPtr& b, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SemigroupState U = SemigroupState::zero(b);
  for (auto& m : U.modes)
    for (auto& v : m) v = n(rng);
  return U;
}

}  // namespace

TEST_SUITE("linear") {
  TEST_CASE("mode matrix and its spectrum") {
    const ModeBlock mb = mode_matrix(1.0, params(1, 1, 1));
    Eigen::Matrix3d ref;
    ref << 0, 1, 0, -1, -1, 1, 0, 0, -1;
    CHECK((mb.matrix - ref).cwiseAbs().maxCoeff() < 1e-12);
    std::vector<std::complex<double>> ev(mb.eigenvalues.begin(), mb.eigenvalues.end());
    auto has = [&](std::complex<double> z) {
      return std::any_of(ev.begin(), ev.end(), [&](auto e) { return std::abs(e - z) < 1e-12; });
    };
    CHECK(has({-1.0, 0.0}));
    CHECK(has({-0.5, std::sqrt(3.0) / 2}));
    CHECK(has({-0.5, -std::sqrt(3.0) / 2}));
    CHECK(std::abs(mb.max_real_part() + 0.5) < 1e-12);

    const ModeBlock od = mode_matrix(1.0, params(1, 4, 1));
    ev.assign(od.eigenvalues.begin(), od.eigenvalues.end());
    CHECK(has({-2.0 + std::sqrt(3.0), 0.0}));
    CHECK(has({-2.0 - std::sqrt(3.0), 0.0}));
  }

  TEST_CASE("triangular spectrum against a general eigensolver") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lg(-1.0, 2.0);
    for (int trial = 0; trial < 10000; ++trial) {
      const double lam = std::pow(10.0, lg(rng));
      const ModelParams p = params(std::pow(10.0, lg(rng) - 1), std::pow(10.0, lg(rng) - 1),
                                   std::pow(10.0, lg(rng) - 1));
      const ModeBlock mb = mode_matrix(lam, p);
      Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(mb.matrix));
      const double scale = std::max(1.0, mb.matrix.cwiseAbs().maxCoeff());
      for (int i = 0; i < 3; ++i) {
        const auto z = es.eigenvalues()(i);
        double best = 1e300;
        for (auto e : mb.eigenvalues) best = std::min(best, std::abs(e - z));
        // a near-double root is ill-conditioned for the general solver
        const double disc = std::abs(p.b * p.b * lam * lam - 4 * p.c * p.c * lam);
        const double tol = 1e-10 * scale * std::max(1.0, scale / std::sqrt(disc + 1e-300) * 1e-6);
        CHECK(best < tol);
      }
    }
  }

  TEST_CASE("spectral bound closed form") {
    auto sb = spectral_bound(params(1, 1, 1), 1.0);
    CHECK(std::abs(sb.value + 0.5) < 1e-12);
    CHECK(sb.branch == "oscillatory (b/2·λ₀)");
    sb = spectral_bound(params(0.1, 1, 1), 1.0);
    CHECK(std::abs(sb.value + 0.1) < 1e-12);
    CHECK(sb.branch == "heat (aλ₀)");
    sb = spectral_bound(params(0.01, 1, 1), 1.0);
    CHECK(std::abs(sb.value + 0.01) < 1e-12);
    sb = spectral_bound(params(1, 4, 1), 1.0);
    CHECK(std::abs(sb.value + 0.25) < 1e-12);
    CHECK(sb.branch == "overdamped (c²/b)");
    CHECK_THROWS_AS(spectral_bound(params(1, 0, 1), 1.0), std::invalid_argument);
  }

  TEST_CASE("spectral bound equals the sup over the spectrum") {
    const auto b = basis1d(256);
    const double sup = spectral_sup(params(1, 1, 1), b->eigenvalues());
    CHECK(std::abs(sup + 0.5) < 1e-10);

    // saturation: the sup over lambda >= lambda0 sits at lambda0 or in the limit -c^2/b
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    std::vector<double> lams;
    for (int i = 0; i <= 120; ++i) lams.push_back(std::pow(10.0, 0.1 * i));
    for (int trial = 0; trial < 200; ++trial) {
      const ModelParams p = params(u(rng), u(rng), u(rng));
      const double at0 = mode_matrix(1.0, p).max_real_part();
      const double limit = -p.c * p.c / p.b;
      const double sup_all = spectral_sup(p, lams);
      const auto sb = spectral_bound(p, 1.0);
      CHECK(std::abs(sup_all - sb.value) < 1e-9);
      CHECK(std::abs(sb.value - std::max(at0, limit)) < 1e-9);
    }
  }

  TEST_CASE("b = 0 loses the bounded imaginary-to-real ratio") {
    auto ratio = [](const ModelParams& p, int n) {
      const auto b = basis1d(n);
      double r = 0.0;
      for (double l : b->eigenvalues())
        for (auto z : mode_matrix(l, p).eigenvalues) r = std::max(r, std::abs(z.imag()) / (1 + std::abs(z.real())));
      return r;
    };
    const ModelParams p0 = params(1, 0, 1), p1 = params(1, 1, 1);
    std::vector<double> r0, r1;
    for (int n : {16, 64, 256}) {
      r0.push_back(ratio(p0, n) / double(n));  // sqrt(lambda_max) = n
      r1.push_back(ratio(p1, n));
    }
    for (double v : r0) CHECK(v > 0.99);
    for (double v : r1) CHECK(v < 2.0);
  }

  TEST_CASE("semigroup state maps") {
    const auto b = basis1d(8);
    const ModelParams p = params(0.3, 1.2, 0.7);
    EvolutionState st = EvolutionState::zero(b, 0.5);
    std::mt19937_64 rng(29);
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t i = 0; i < 8; ++i) {
      st.u[i] = n(rng);
      st.ut[i] = n(rng);
      st.utt[i] = n(rng);
    }
    const EvolutionState back = from_semigroup(to_semigroup(st, p), p, 0.5);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(back.u[i] - st.u[i]) < 1e-14);
      CHECK(std::abs(back.ut[i] - st.ut[i]) < 1e-14);
      CHECK(std::abs(back.utt[i] - st.utt[i]) < 1e-14 * std::max(1.0, 64 * 2.0));
    }
    const auto z = to_semigroup(EvolutionState::zero(b), p);
    for (const auto& m : z.modes) CHECK(m == std::array<double, 3>{0, 0, 0});

    EvolutionState one = EvolutionState::zero(b);
    one.u[0] = 1.0;
    const auto U = to_semigroup(one, params(1, 1, 1));
    CHECK(U.modes[0] == std::array<double, 3>{1.0, 0.0, 1.0});
  }

  TEST_CASE("homogeneous steps") {
    const auto b = basis1d(16);
    const ModelParams p = params(1, 1, 1);
    const auto U = random_state(b, 31);
    const auto two = step_homogeneous(step_homogeneous(U, p, 0.05), p, 0.05);
    const auto once = step_homogeneous(U, p, 0.1);
    CHECK(state_diff(two, once) < 1e-12);

    // single mode against dopri5 on the 3x3 system
    for (std::size_t i : {0u, 3u, 7u}) {
      const double lam = b->eigenvalues()[i];
      const Eigen::VectorXd ref = oracle::integrate_linear(mode_matrix(lam, p).matrix, mode_vec(U, i), 1.0);
      SemigroupState V = U;
      for (int n = 0; n < 10; ++n) V = step_homogeneous(V, p, 0.1);
      CHECK((mode_vec(V, i) - ref).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }

    // dt = 10: no CFL restriction
    const auto big = step_homogeneous(U, p, 10.0);
    CHECK(big.is_finite());
    double n0 = 0.0, n1 = 0.0;
    for (std::size_t i = 0; i < U.modes.size(); ++i) {
      n0 += mode_vec(U, i).squaredNorm();
      n1 += mode_vec(big, i).squaredNorm();
    }
    CHECK(n1 < n0);
  }

  TEST_CASE("asymptotic modal rate") {
    const ModelParams p = params(1, 1, 1);
    const auto b = basis1d(4);
    for (std::size_t i : {0u, 2u}) {
      const double lam = b->eigenvalues()[i];
      const double mu = mode_matrix(lam, p).max_real_part();
      SemigroupState U = SemigroupState::zero(b);
      U.modes[i] = {1.0, 0.3, -0.2};
      const Propagator prop(b, p, 0.05);
      std::vector<double> t, e;
      for (int n = 0; n <= 800; ++n) {
        t.push_back(n * 0.05);
        e.push_back(mode_vec(U, i).squaredNorm());
        U = prop.homogeneous(U);
      }
      // sup-envelope slope over the trailing half: log of running max on windows
      const DecayFit f = decay_fit(t, e, 0.5);
      CHECK(std::abs(f.omega / (-2 * mu) - 1.0) < 0.01);
    }
  }

  TEST_CASE("parallel and serial propagation agree bitwise") {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(4);
    const ModelParams p = params(0.5, 1.5, 2.0);
    const auto bs = basis1d(128, 2.0, Exec::serial);
    const auto bp = basis1d(128, 2.0, Exec::parallel);
    const Propagator ps(bs, p, 0.01), pp(bp, p, 0.01);
    auto Us = random_state(bs, 37);
    auto Up = Us;
    Up.basis = bp;
    const auto F0 = random_state(bs, 38), F1 = random_state(bs, 39);
    auto F0p = F0, F1p = F1;
    F0p.basis = bp;
    F1p.basis = bp;
    const auto rs = ps.forced(Us, F0, F1), rp = pp.forced(Up, F0p, F1p);
    CHECK(rs.modes == rp.modes);
    omp_set_num_threads(saved);
  }

  TEST_CASE("Duhamel solves") {
    const auto b = basis1d(4);
    const ModelParams p = params(1, 1, 1);
    const auto U0 = random_state(b, 41);
    const double dt = 0.01;

    std::vector<SemigroupState> zero(51, SemigroupState::zero(b));
    const auto hom = solve_duhamel(U0, zero, dt, p);
    SemigroupState V = U0;
    for (std::size_t n = 1; n < hom.size(); ++n) {
      V = step_homogeneous(V, p, dt);
      CHECK(state_diff(hom[n], V) == 0.0);
    }

    // constant forcing: U(t) = e^{tL}(U0 + L^{-1}F) - L^{-1}F
    const auto F = random_state(b, 42);
    std::vector<SemigroupState> cf(101, F);
    const auto sol = solve_duhamel(U0, cf, dt, p);
    for (std::size_t i = 0; i < 4; ++i) {
      const Eigen::Matrix3d L = mode_matrix(b->eigenvalues()[i], p).matrix;
      const Eigen::Vector3d Linv_F = L.partialPivLu().solve(Eigen::Vector3d(mode_vec(F, i)));
      const Eigen::VectorXd ref = oracle::integrate_linear(L, mode_vec(U0, i) + Linv_F, 1.0) - Linv_F;
      CHECK((mode_vec(sol.back(), i) - ref).cwiseAbs().maxCoeff() < 1e-9);
    }

    // manufactured U(t) = e^{-t}(sin t, cos t, -sin t + b lam cos t + c^2 lam sin t) per mode
    auto exact = [&](double t, double lam) {
      Eigen::Vector3d v(std::sin(t), std::cos(t),
                        -std::sin(t) + p.b * lam * std::cos(t) + p.c * p.c * lam * std::sin(t));
      return Eigen::Vector3d(std::exp(-t) * v);
    };
    auto dexact = [&](double t, double lam) {
      const double h = 1e-5;
      Eigen::Vector3d d = Eigen::Vector3d::Zero();
      const double w[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
      const double o[4] = {-2, -1, 1, 2};
      for (int j = 0; j < 4; ++j) d += w[j] * exact(t + o[j] * h, lam);
      return Eigen::Vector3d(d / h);
    };
    std::vector<double> errs;
    for (double h : {0.02, 0.01, 0.005}) {
      const auto n = static_cast<std::size_t>(std::llround(1.0 / h));
      std::vector<SemigroupState> forcing(n + 1, SemigroupState::zero(b));
      SemigroupState init = SemigroupState::zero(b);
      for (std::size_t i = 0; i < 4; ++i) {
        const double lam = b->eigenvalues()[i];
        const Eigen::Matrix3d L = mode_matrix(lam, p).matrix;
        const auto e0 = exact(0, lam);
        init.modes[i] = {e0(0), e0(1), e0(2)};
        for (std::size_t m = 0; m <= n; ++m) {
          const double t = double(m) * h;
          const Eigen::Vector3d f = dexact(t, lam) - L * exact(t, lam);
          forcing[m].modes[i] = {f(0), f(1), f(2)};
        }
      }
      const auto s = solve_duhamel(init, forcing, h, p);
      double err = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        err = std::max(err, (mode_vec(s.back(), i) - exact(1.0, b->eigenvalues()[i])).cwiseAbs().maxCoeff());
      errs.push_back(err);
    }
    CHECK(errs[0] / errs[1] > 3.5);
    CHECK(errs[1] / errs[2] > 3.5);
  }

  TEST_CASE("linear decay report") {
    const auto b = basis1d(16);
    const ModelParams p = params(1, 1, 1);
    EvolutionState st = EvolutionState::zero(b);
    st.u = SpectralField::single_mode(b, 1.0, 1);
    const DecayFit f = linear_decay_report(st, p, 20.0, 0.01);
    CHECK(std::abs(f.omega - 1.0) < 0.05);

    st.u = SpectralField::single_mode(b, 1.0, 3);
    const double rate = -2 * mode_matrix(9.0, p).max_real_part();
    const DecayFit f3 = linear_decay_report(st, p, 20.0, 0.01);
    CHECK(std::abs(f3.omega / rate - 1.0) < 0.05);

    CHECK_THROWS_AS(linear_decay_report(EvolutionState::zero(b), p, 20.0, 0.01), FitError);
  }

  TEST_CASE("weighted norm and relative bound are finite diagnostics") {
    const auto b = basis1d(8);
    const ModelParams p = params(1, 1, 1);
    const auto U = random_state(b, 43);
    CHECK(weighted_norm(U, p) > 0.0);
    CHECK(weighted_norm(SemigroupState::zero(b), p) == 0.0);
    const auto rb = relative_bound(U, p);
    CHECK(std::isfinite(rb.lhs));
    CHECK(std::isfinite(rb.rhs));
    CHECK(rb.lhs >= 0.0);
  }
}
