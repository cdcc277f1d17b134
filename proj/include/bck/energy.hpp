#pragma once

// Energy functionals, with w = D_h u = u_t + a A u:
//   E1[w] = 1/2 (||A^{1/2} w_tt||^2 + ||A^{1/2} w_t||^2 + ||A w||^2)
//   E2[u] = 1/2 (||A^{1/2} u_ttt||^2 + ||A u_tt||^2 + ||A^{3/2} u_t||^2 + ||A^{3/2} u||^2)
//   E     = E1 + E2
//   k[u]  = ||u_tttt||^2 + ||A u_ttt||^2 + ||A^{3/2} u_tt||^2 + ||A^2 u_t||^2 + ||A^2 u||^2
// and the linear energy ||u||_{H4}^2 + ||u_t||_{H4}^2 + ||u_tt - b Delta u_t - c^2 Delta u||_{H2}^2.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bck/fit.hpp"
#include "bck/model.hpp"
#include "bck/nonlinear.hpp"

namespace bck {

struct WFields {
  SpectralField w;
  SpectralField wt;
  SpectralField wtt;
};

WFields w_field(const EvolutionState& state, const SpectralField& uttt, const ModelParams& params);

struct EnergyReport {
  double t = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  double E_total = 0.0;
  double k_functional = 0.0;
  bool has_k = false;  // false when u_tttt was not supplied
  double linear_energy = 0.0;
  /// H4_u, H3_ut, H3_utt, H1_uttt, plus the other orders used above.
  std::map<std::string, double> sobolev;
  double linf_ut = 0.0;
  /// ||u||_{H4}^2 + ||u_t||_{H3}^2 + ||u_tt||_{H3}^2 + ||u_ttt||_{H1}^2
  double decay_norm_sum = 0.0;
};

EnergyReport energies(const EvolutionState& state, const SpectralField& uttt,
                      const ModelParams& params, const SpectralField* utttt = nullptr);

double linear_energy(const EvolutionState& state, const ModelParams& params);

/// One report per sample, with k[u] from the trajectory's u_tttt.
std::vector<EnergyReport> energy_series(const Trajectory& traj, const ModelParams& params);

// -- heat identity ---------------------------------------------------------------
//   int_0^T ||v_t + a A v||^2 = a||A^{1/2} v(T)||^2 - a||A^{1/2} v(0)||^2
//                               + int_0^T (||v_t||^2 + a^2 ||A v||^2)

struct HeatAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| over the sum of magnitudes of all terms (0 when all vanish).
  double residual = 0.0;
};

/// Uniform samples of v and v_t; an empty `vt` selects centred differences
/// (one-sided at the ends). Integrals by the trapezoid rule.
HeatAudit heat_identity_audit(std::span<const SpectralField> v, std::span<const SpectralField> vt,
                              double dt, double a);

/// The four instantiations v = u_ttt, A^{1/2} u_tt, A u_t, A u along a trajectory.
struct HeatInstances {
  static constexpr std::array<const char*, 4> names = {"u_ttt", "A^1/2 u_tt", "A u_t", "A u"};
  std::array<HeatAudit, 4> audits;
  double max_residual() const;
};
HeatInstances heat_identity_instances(const Trajectory& traj, const ModelParams& params);

// -- estimates --------------------------------------------------------------------

struct EstimateAudit {
  std::vector<double> t;
  std::vector<double> lhs;  // E(t) + int_0^t (E + k)
  std::vector<double> rhs;  // E(0) + int_0^t (||f||^2 + ||f_t||^2)
  double c_min = 0.0;       // max_t lhs / rhs
};

/// f sampled on the trajectory grid; f_t by centred differences. Throws
/// DivisionGuard when rhs vanishes while lhs does not.
EstimateAudit estimate_audit_linear(const Trajectory& traj, std::span<const SpectralField> f,
                                    const ModelParams& params);

/// Nonlinear forcing f = forcing_f along a trajectory (plus an optional source).
std::vector<SpectralField> forcing_series(const Trajectory& traj, const ModelParams& params,
                                          const SourceFn& source = {});

struct BarrierAudit {
  double max_ratio = 0.0;         // max_t E(t) / (2 max{1, c_hat} eta)
  double integrated_ratio = 0.0;  // max_t (E(t) + 1/2 int (E + k)) / (c_hat E(0))
  bool pass = false;
};

BarrierAudit barrier_audit(const std::vector<EnergyReport>& series, double dt, double eta,
                           double c_hat);

}  // namespace bck
