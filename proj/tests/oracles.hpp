#pragma once

// Reference computations that share no code with the library: Golub-Welsch
// Gauss-Legendre in x, direct sin/cos evaluation, Eigen LU for the modal
// system, Boost.Odeint dopri5 for time integration.

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [0, L] from the Jacobi matrix eigenproblem.
inline Rule gauss_legendre(int n, double L) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  for (int i = 0; i < n; ++i) {
    const double y = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.x.push_back(0.5 * L * (y + 1.0));
    r.w.push_back(L * v0 * v0);  // 2 v0^2 on [-1, 1], times L/2
  }
  return r;
}

/// c_k = (2/L) int_0^L f sin(k pi x/L) dx, k = 1..N.
inline std::vector<double> sine_coeffs(const std::function<double(double)>& f, double L, int N,
                                       int points = 400) {
  const Rule r = gauss_legendre(points, L);
  std::vector<double> c(static_cast<std::size_t>(N), 0.0);
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    const double fx = f(r.x[j]) * r.w[j];
    for (int k = 1; k <= N; ++k) c[static_cast<std::size_t>(k - 1)] += fx * std::sin(k * pi * r.x[j] / L);
  }
  for (auto& v : c) v *= 2.0 / L;
  return c;
}

/// 2D analogue on [0, L0] x [0, L1], flat index k0 fastest.
inline std::vector<double> sine_coeffs_2d(const std::function<double(double, double)>& f,
                                          double L0, double L1, int N, int points = 120) {
  const Rule r0 = gauss_legendre(points, L0);
  const Rule r1 = gauss_legendre(points, L1);
  std::vector<double> c(static_cast<std::size_t>(N * N), 0.0);
  for (std::size_t j1 = 0; j1 < r1.x.size(); ++j1)
    for (std::size_t j0 = 0; j0 < r0.x.size(); ++j0) {
      const double fx = f(r0.x[j0], r1.x[j1]) * r0.w[j0] * r1.w[j1];
      for (int k1 = 1; k1 <= N; ++k1)
        for (int k0 = 1; k0 <= N; ++k0)
          c[static_cast<std::size_t>((k1 - 1) * N + (k0 - 1))] +=
              fx * std::sin(k0 * pi * r0.x[j0] / L0) * std::sin(k1 * pi * r1.x[j1] / L1);
    }
  for (auto& v : c) v *= 4.0 / (L0 * L1);
  return c;
}

/// Value and x-derivative of a 1D sine series.
inline double eval(const std::vector<double>& c, double L, double x) {
  double s = 0.0;
  for (std::size_t k = 1; k <= c.size(); ++k) s += c[k - 1] * std::sin(double(k) * pi * x / L);
  return s;
}
inline double eval_dx(const std::vector<double>& c, double L, double x) {
  double s = 0.0;
  for (std::size_t k = 1; k <= c.size(); ++k) {
    const double w = double(k) * pi / L;
    s += c[k - 1] * w * std::cos(w * x);
  }
  return s;
}

struct Params {
  double a = 1, b = 1, c = 1, k = 0;
  int s = 0;
};

/// Per-mode Lin(u) = -(a+b) lam u_tt - c^2 lam u_t - ab lam^2 u_t - a c^2 lam^2 u.
inline double lin(double lam, const Params& p, double u, double ut, double utt) {
  return -(p.a + p.b) * lam * utt - p.c * p.c * lam * ut - p.a * p.b * lam * lam * ut -
         p.a * p.c * p.c * lam * lam * u;
}

/// u_ttt of the 1D Galerkin system
///   u_ttt + P[2k u_t u_ttt] = Lin - P[2k u_tt^2 + 2s u_tx^2 + 2s u_x u_ttx]
/// by dense quadrature and a dense LU solve.
inline std::vector<double> acceleration(const std::vector<double>& u, const std::vector<double>& ut,
                                        const std::vector<double>& utt, double L, const Params& p,
                                        int points = 200) {
  const int N = static_cast<int>(u.size());
  const Rule r = gauss_legendre(points, L);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N);
  Eigen::VectorXd rhs(N);
  for (int i = 1; i <= N; ++i) {
    const double lam = std::pow(i * pi / L, 2);
    rhs(i - 1) = lin(lam, p, u[i - 1], ut[i - 1], utt[i - 1]);
  }
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    const double x = r.x[j];
    const double vt = eval(ut, L, x);
    const double vtt = eval(utt, L, x);
    const double q = 2.0 * p.k * vtt * vtt +
                     2.0 * p.s * (std::pow(eval_dx(ut, L, x), 2) + eval_dx(u, L, x) * eval_dx(utt, L, x));
    for (int i = 1; i <= N; ++i) {
      const double si = std::sin(i * pi * x / L) * r.w[j] * 2.0 / L;
      rhs(i - 1) -= q * si;
      for (int m = 1; m <= N; ++m) M(i - 1, m - 1) += 2.0 * p.k * vt * std::sin(m * pi * x / L) * si;
    }
  }
  const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
  return {sol.data(), sol.data() + N};
}

using State = std::vector<double>;  // (u_1..u_N, ut_1..ut_N, utt_1..utt_N)

/// Dense adaptive dopri5 solve of the modal system, sampled at `times`.
inline std::vector<State> integrate(const State& y0, double L, const Params& p,
                                    const std::vector<double>& times, double tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  const std::size_t N = y0.size() / 3;
  auto rhs = [&](const State& y, State& dy, double) {
    std::vector<double> u(y.begin(), y.begin() + long(N));
    std::vector<double> ut(y.begin() + long(N), y.begin() + long(2 * N));
    std::vector<double> utt(y.begin() + long(2 * N), y.end());
    const auto uttt = acceleration(u, ut, utt, L, p);
    dy.resize(y.size());
    for (std::size_t i = 0; i < N; ++i) {
      dy[i] = ut[i];
      dy[N + i] = utt[i];
      dy[2 * N + i] = uttt[i];
    }
  };
  std::vector<State> out;
  State y = y0;
  ode::integrate_times(ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>()), rhs, y,
                       times.begin(), times.end(), 1e-4,
                       [&](const State& s, double) { out.push_back(s); });
  return out;
}

/// Dense adaptive solve of y' = A y for a small matrix.
inline Eigen::VectorXd integrate_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& y0, double T,
                                        double tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  std::vector<double> y(y0.data(), y0.data() + y0.size());
  auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double) {
    Eigen::Map<const Eigen::VectorXd> v(s.data(), long(s.size()));
    const Eigen::VectorXd d = A * v;
    ds.assign(d.data(), d.data() + d.size());
  };
  ode::integrate_adaptive(ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<std::vector<double>>()),
                          rhs, y, 0.0, T, 1e-4);
  return Eigen::Map<Eigen::VectorXd>(y.data(), long(y.size()));
}

}  // namespace oracle
