#pragma once

// Full BCK / BCW solvers: a time stepper with the linear part exact per mode,
// and the fixed-point map phi -> u that solves the linear problem with the
// nonlinearity frozen at phi.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "bck/linear.hpp"
#include "bck/model.hpp"

namespace bck {

enum class SolveStatus { complete, degenerate, overflow };

const char* to_string(SolveStatus s);

/// Uniform samples t_n = t0 + n dt with the stored u_ttt of each state.
struct Trajectory {
  double dt = 0.0;
  std::vector<EvolutionState> states;
  std::vector<SpectralField> uttt;
  SolveStatus status = SolveStatus::complete;
  std::string diagnostic;

  std::size_t size() const { return states.size(); }
  double t(std::size_t i) const { return states[i].t; }
  /// Centred difference of u_ttt; first order one-sided at the ends.
  SpectralField utttt(std::size_t i) const;
  Trajectory scaled(double alpha) const;
};

/// Sample-wise difference a - b (same grid and basis).
Trajectory difference(const Trajectory& a, const Trajectory& b);

struct StepperConfig {
  int substep_iters = 2;
  double eps_deg = 0.05;
  double blowup = 1e12;
};

/// Exponential trapezoid rule: with G(U) = (0, 0, u_ttt - Lin(u)) = (0, 0, -f - S),
///   U* = e^{hA} U_n + h phi_1 G_n,
///   U* <- e^{hA} U_n + h phi_1 G_n + h phi_2 (G(U*) - G_n)   (substep_iters times).
class Stepper {
 public:
  Stepper(BasisPtr basis, const ModelParams& params, double dt, StepperConfig cfg = {},
          SourceFn source = {});

  struct Result {
    EvolutionState state;
    SpectralField uttt;
  };

  /// Advances (state, u_ttt(state)) by dt. Throws DegeneracyError or OverflowError.
  Result advance(const EvolutionState& state, const SpectralField& uttt) const;
  /// u_ttt of a state, with the source at state.t.
  SpectralField acceleration_at(const EvolutionState& state) const;

  const Propagator& propagator() const { return prop_; }

 private:
  ModelParams params_;
  StepperConfig cfg_;
  SourceFn source_;
  Propagator prop_;
};

EvolutionState step(const EvolutionState& state, double dt, const ModelParams& params,
                    int substep_iters = 2);

/// Throws DegeneracyError when the data fail the guard at t = 0. A failure
/// later returns the trajectory up to the last good sample with status set.
Trajectory solve(const CompatibilityData& initial, const ModelParams& params, double T, double dt,
                 const StepperConfig& cfg = {}, const SourceFn& source = {});

/// u = T(phi): the linear problem with forcing f[phi] and the data of `initial`,
/// on phi's time grid. f[phi] uses phi's stored u_ttt.
Trajectory picard_apply(const Trajectory& phi, const CompatibilityData& initial,
                        const ModelParams& params, double eps_deg = 0.05,
                        const SourceFn& source = {});

struct PicardOptions {
  double tol = 1e-10;  // relative V-norm increment
  int max_iter = 10;
  double eps_deg = 0.05;
  double blowup = 1e12;
  /// Called after every iteration with (m, increment, ratio or 0 for m = 1).
  std::function<void(int, double, double)> on_iteration;
};

struct PicardReport {
  int iterations = 0;
  std::vector<double> increments;  // ||phi^{m+1} - phi^m||_V
  std::vector<double> ratios;      // increments[m] / increments[m-1]
  double final_residual = 0.0;     // last increment relative to ||phi||_V
  bool converged = false;
};

struct PicardResult {
  Trajectory trajectory;
  PicardReport report;
};

/// phi^0 the linear solution with f = 0, phi^{m+1} = T(phi^m). Throws
/// NonConvergenceError with the ratio history when max_iter is exhausted or an
/// iterate blows up.
PicardResult picard_solve(const CompatibilityData& initial, const ModelParams& params, double T,
                          double dt, const PicardOptions& opts = {}, const SourceFn& source = {});

struct VNormReport {
  static constexpr std::array<const char*, 7> names = {
      "L2L2_v_tttt", "L2H1_v_ttt", "L2H1_v_tt", "LinfH2_v_tt",
      "L2H1_v_t",    "LinfH3_v_t", "LinfH3_v"};
  std::array<double, 7> components{};
  double max = 0.0;
};

/// Squared components of the small-data norm and their max. Time integrals by
/// the trapezoid rule, suprema over samples.
VNormReport vtilde_norm(const Trajectory& traj);

/// Square root of the sum of the seven squared Bochner norms
/// L_inf H4, H1 H4, W2_inf H3, H2 H3, W3_inf H1, H3 H2, H4 L2, where
/// W^m_p(X) collects all time derivatives up to order m.
double v_norm(const Trajectory& traj);

}  // namespace bck
