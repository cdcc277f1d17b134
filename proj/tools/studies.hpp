#pragma once

// Verification studies shared by the command line front-end and the tests.

#include <cstdint>
#include <vector>

#include "bck/energy.hpp"
#include "bck/nonlinear.hpp"

namespace bck::cli {

/// Smooth manufactured solution u = (1 + t) g with
///   g(x) = eps sin(pi x/L) / (1.5 - cos(pi x/L)) = 2 eps sum_k r^k sin(k pi x/L),
///   r = 1.5 - sqrt(1.25), on a 1D domain. The source makes it an exact solution.
struct ManufacturedProblem {
  BasisPtr basis;
  ModelParams params;
  double eps = 0.0;
  double r = 0.0;
  SpectralField g;  // truncated to the basis
  SourceFn source;

  SpectralField exact(double t) const;
  /// L2 norm of the part of u(t) beyond the basis.
  double tail_norm(double t) const;
  CompatibilityData data(double eps_deg = 0.05) const;
};

ManufacturedProblem make_manufactured(const BasisPtr& basis, const ModelParams& params, double eps);

struct SpatialRow {
  int modes = 0;
  double error = 0.0;  // L2 error of u(T) including the truncated tail
};

/// The exponential trapezoid rule is exact in time for u = (1 + t) g once its
/// corrector has converged, so at least 8 sweeps are used and the error is spatial.
std::vector<SpatialRow> spatial_convergence(const DomainSpec& base, const ModelParams& params,
                                            double eps, double T, double dt,
                                            const std::vector<int>& modes,
                                            const StepperConfig& cfg, Exec exec);

struct TemporalStudy {
  std::vector<double> dts;
  std::vector<double> differences;  // ||U_{dt_i} - U_{dt_{i+1}}|| at T
  std::vector<double> orders;       // from consecutive difference pairs
};

/// Richardson-type self-convergence of the full nonlinear stepper on
/// single-mode data u0 = amplitude sin(pi x / L).
TemporalStudy temporal_convergence(const BasisPtr& basis, const ModelParams& params,
                                   double amplitude, double T, const std::vector<double>& dts,
                                   const StepperConfig& cfg);

struct AliasingCheck {
  int modes = 0;
  double error_aliased = 0.0;    // M = N
  double error_dealiased = 0.0;  // M = ceil(3N/2)
};

/// Products of two random fields against a 2N-point reference.
AliasingCheck aliasing_check(const DomainSpec& base, std::uint64_t seed);

}  // namespace bck::cli
