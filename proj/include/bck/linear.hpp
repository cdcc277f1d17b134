#pragma once

// Linear semigroup, mode by mode. On the eigenspace of lambda the generator
// acts on U = (u, u_t, u_tt + b lambda u_t + c^2 lambda u) as
//   A_lambda = [[0, 1, 0], [-c^2 lambda, -b lambda, 1], [0, 0, -a lambda]].

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bck/fit.hpp"
#include "bck/model.hpp"

namespace bck {

struct ModeBlock {
  double lambda = 0.0;
  Eigen::Matrix3d matrix;
  /// {-a lambda, mu_+, mu_-}, mu the roots of mu^2 + b lambda mu + c^2 lambda.
  std::array<std::complex<double>, 3> eigenvalues;

  double max_real_part() const;
};

ModeBlock mode_matrix(double lambda, const ModelParams& params);

struct SpectralBound {
  double value = 0.0;
  std::string branch;
  double heat = 0.0;         // a lambda0
  double oscillatory = 0.0;  // b lambda0 / 2
  double overdamped = 0.0;   // c^2 / b
};

/// s(A) = -min{a lambda0, b lambda0 / 2, c^2 / b}; requires b > 0.
SpectralBound spectral_bound(const ModelParams& params, double lambda0);

/// max over the basis eigenvalues of the largest real part of the mode spectrum.
double spectral_sup(const ModelParams& params, std::span<const double> lambdas);

struct SemigroupState {
  BasisPtr basis;
  std::vector<std::array<double, 3>> modes;

  static SemigroupState zero(const BasisPtr& basis);
  bool is_finite() const;
};

SemigroupState to_semigroup(const EvolutionState& state, const ModelParams& params);
EvolutionState from_semigroup(const SemigroupState& U, const ModelParams& params, double t);

/// Per-mode e^{hA}, h phi_1(hA), h phi_2(hA) for one step size, with
/// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2. Built from the
/// exponential of the augmented matrix [[hA, hI, 0], [0, 0, I], [0, 0, 0]].
class Propagator {
 public:
  Propagator(BasisPtr basis, const ModelParams& params, double dt);

  double dt() const { return dt_; }
  const BasisPtr& basis() const { return basis_; }
  const ModelParams& params() const { return params_; }

  std::span<const std::array<double, 9>> exp_blocks() const { return exp_; }
  std::span<const std::array<double, 9>> phi1_blocks() const { return phi1_; }
  std::span<const std::array<double, 9>> phi2_blocks() const { return phi2_; }

  /// e^{hA} U
  SemigroupState homogeneous(const SemigroupState& U) const;
  /// e^{hA} U + h phi_1 F0 + h phi_2 (F1 - F0): exact for forcing linear in time.
  SemigroupState forced(const SemigroupState& U, const SemigroupState& F0,
                        const SemigroupState& F1) const;

 private:
  BasisPtr basis_;
  ModelParams params_;
  double dt_;
  std::vector<std::array<double, 9>> exp_;
  std::vector<std::array<double, 9>> phi1_;
  std::vector<std::array<double, 9>> phi2_;
};

SemigroupState step_homogeneous(const SemigroupState& U, const Propagator& prop);
SemigroupState step_homogeneous(const SemigroupState& U, const ModelParams& params, double dt);

/// Semigroup forcing (0, 0, g) per mode.
SemigroupState forcing_vector(const SpectralField& g);

/// U^{n+1} = e^{dt A} U^n + dt phi_1 F^n + dt phi_2 (F^{n+1} - F^n), with F
/// sampled at t_n = n dt. Returns forcing.size() states starting with `initial`.
std::vector<SemigroupState> solve_duhamel(const SemigroupState& initial,
                                          std::span<const SemigroupState> forcing, double dt,
                                          const ModelParams& params);

/// Homogeneous run over [0, T] fitted on the trailing half with the energy
/// ||u||_{H4}^2 + ||u_t||_{H4}^2 + ||u_tt - b Delta u_t - c^2 Delta u||_{H2}^2.
/// Throws FitError for zero data or a non-monotone trailing window.
DecayFit linear_decay_report(const EvolutionState& initial, const ModelParams& params, double T,
                             double dt);

/// ||v||_H^2 = (alpha b/2)^2 ||A^2 v1||^2 + ||A v2||^2 + ||v3||^2.
double weighted_norm(const SemigroupState& U, const ModelParams& params, double alpha = 0.1);

/// Splitting A = A1 + A2 with A1 = diag(0, -bA, -aA). For a given U reports
/// ||A2 U||_H and (alpha/2)||A1 U||_H + sqrt(2) max{2c^2/(alpha b), 1} ||U||_H.
struct RelativeBoundSample {
  double lhs = 0.0;
  double rhs = 0.0;
};
RelativeBoundSample relative_bound(const SemigroupState& U, const ModelParams& params,
                                   double alpha = 0.1);

}  // namespace bck
