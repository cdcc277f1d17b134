#pragma once

// BCK / BCW model:
//   (a Delta - d_t)(u_tt - b Delta u_t - c^2 Delta u) = (k u_t^2 + s |grad u|^2)_tt
// with u = Delta u = 0 on the boundary. Expanding the right side by the product
// rule gives the explicit third-order form
//   (1 + 2k u_t) u_ttt = Lin(u) - 2k u_tt^2 - 2s |grad u_t|^2 - 2s grad u . grad u_tt
//   Lin(u) = (a+b) Delta u_tt + c^2 Delta u_t - ab Delta^2 u_t - ac^2 Delta^2 u.

#include <functional>
#include <optional>

#include "bck/spectral.hpp"

namespace bck {

struct ModelParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double k = 0.0;
  int s = 0;

  /// Throws std::invalid_argument. k = 0 and b = 0 are accepted.
  void validate() const;
  /// (2k)^-1, infinite for k = 0.
  double degeneracy_threshold() const;
  bool is_linear() const { return k == 0.0 && s == 0; }
};

struct PhysicalParams {
  double nu = 0.0;
  double Pr = 0.0;
  double Lambda = 0.0;
  double c0 = 0.0;
  std::optional<double> gamma;
  std::optional<double> B_over_A;
};

/// a = nu/Pr, b = (Lambda + (gamma-1)/Pr) nu, c = c0, k from gamma or B/A, s = 1.
/// When only B/A is given, gamma - 1 in b is taken as B/A as well.
ModelParams derive_params(const PhysicalParams& phys);

struct EvolutionState {
  double t = 0.0;
  SpectralField u;
  SpectralField ut;
  SpectralField utt;

  static EvolutionState zero(const BasisPtr& basis, double t = 0.0);
  bool is_finite() const;
  EvolutionState scaled(double alpha) const;
};

/// Time-dependent right-hand side S(t) added to the model: the solved equation
/// becomes (a Delta - d_t)(...) - (k u_t^2 + s|grad u|^2)_tt = S.
using SourceFn = std::function<SpectralField(double t)>;

struct DegeneracyReport {
  GridField factor;        // 1 + 2k u_t on the dealiasing grid
  double min_factor = 1.0;  // min of factor
  double guard_min = 1.0;   // 1 - 2k max|u_t|
  std::size_t worst_index = 0;
  bool degenerate = false;  // guard_min <= eps_deg
};

DegeneracyReport degeneracy_factor(const EvolutionState& state, const ModelParams& params,
                                   double eps_deg = 0.05);

struct AccelerationOptions {
  double eps_deg = 0.05;
  /// Evaluate the gradient products even when s = 0.
  bool force_gradient_terms = false;
  double cg_rel_tol = 1e-15;
  int cg_max_iter = 200;
};

/// Per-mode Lin(u).
SpectralField linear_part(const EvolutionState& state, const ModelParams& params);

/// f = P[2k u_tt^2 + 2k u_t u_ttt + 2s|grad u_t|^2 + 2s grad u . grad u_tt],
/// the product-rule expansion of (k u_t^2 + s|grad u|^2)_tt.
SpectralField forcing_f(const EvolutionState& state, const SpectralField& uttt,
                        const ModelParams& params, bool force_gradient_terms = false);

/// Galerkin P[k u_t^2 + s|grad u|^2].
SpectralField quadratic_potential(const EvolutionState& state, const ModelParams& params);

/// u_ttt from the explicit form. The Galerkin system
///   u_ttt + 2k P[u_t u_ttt] = Lin - P[2k u_tt^2 + 2s|grad u_t|^2 + 2s grad u.grad u_tt] - S
/// is symmetric positive definite while 1 + 2k u_t > 0 and is solved by CG.
/// Throws DegeneracyError when the guard fails.
SpectralField acceleration(const EvolutionState& state, const ModelParams& params,
                           const AccelerationOptions& opts = {},
                           const SpectralField* source = nullptr);

SpectralField compatibility_uttt0(const SpectralField& u0, const SpectralField& u1,
                                  const SpectralField& u2, const ModelParams& params,
                                  double eps_deg = 0.05);

struct CompatibilityData {
  SpectralField u0;
  SpectralField u1;
  SpectralField u2;
  SpectralField uttt0;

  static CompatibilityData make(SpectralField u0, SpectralField u1, SpectralField u2,
                                const ModelParams& params, double eps_deg = 0.05,
                                const SourceFn& source = {});
  EvolutionState state() const;
};

/// L2 norm of (a Delta - d_t)(u_tt - b Delta u_t - c^2 Delta u) - (k u_t^2 + s|grad u|^2)_tt - S
/// at the middle state, d_t u_tt and the second time derivative of the quadratic
/// term by centred differences. Normalised by the largest term; 0 when all vanish.
double pde_residual(const EvolutionState& prev, const EvolutionState& cur,
                    const EvolutionState& next, const ModelParams& params,
                    const SourceFn& source = {});

}  // namespace bck
