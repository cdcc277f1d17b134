#pragma once

// Run configuration: INI-style sections, strict keys, `section.key=value`
// overrides from the command line.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bck/model.hpp"
#include "bck/nonlinear.hpp"
#include "bck/spectral.hpp"

namespace bck::cli {

struct InitialSpec {
  std::string preset = "single-mode";  // zero | single-mode | multi-mode | random
  double amplitude = 1e-3;             // u0
  double u1_amplitude = 0.0;
  double u2_amplitude = 0.0;
  int mode = 1;
  int mode_y = 1;
  int count = 4;            // multi-mode: modes 1..count with halving amplitudes
  double spectrum_power = 2.0;  // random: coefficient std ~ |k|^-power
};

struct SolverSpec {
  double T = 1.0;
  double dt = 1e-2;
  double eps_deg = 0.05;
  int substep_iters = 2;
  double blowup = 1e12;
  double picard_tol = 1e-10;
  int picard_max_iter = 10;
  Exec exec = Exec::parallel;
};

struct AnalysisSpec {
  double window_fraction = 0.5;
  double abar = 1e-4;  // small-data ball radius for the V~ norm
};

struct SweepSpec {
  std::vector<double> amplitudes{1e-4, 1e-3, 1e-2};
  std::vector<double> b_values{0.5, 1.0, 2.0, 4.0};
  std::vector<int> s_values{0, 1};
};

struct ConvergenceSpec {
  std::vector<int> modes{16, 32};
  std::vector<double> dts{0.02, 0.01, 0.005};
  double epsilon = 0.05;  // manufactured-solution amplitude
  double T = 0.5;
  double amplitude = 0.05;  // temporal self-convergence data
};

struct SolverConfig {
  DomainSpec domain;
  ModelParams params;
  std::optional<PhysicalParams> physical;
  InitialSpec initial;
  SolverSpec solver;
  AnalysisSpec analysis;
  SweepSpec sweep;
  ConvergenceSpec convergence;
  int output_stride = 1;
  std::uint64_t seed = 0;

  /// Canonical `section.key=value` lines after overrides, sorted.
  std::map<std::string, std::string> raw;

  std::uint64_t hash() const;
  std::string hash_hex() const;
  StepperConfig stepper() const;
  PicardOptions picard() const;
};

/// Parses the file, applies overrides, validates. Throws ConfigError.
SolverConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed);

/// Same from in-memory text.
SolverConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed);

/// u0, u1, u2 from the initial spec.
struct InitialFields {
  SpectralField u0;
  SpectralField u1;
  SpectralField u2;
};
InitialFields make_initial_fields(const BasisPtr& basis, const InitialSpec& spec,
                                  std::uint64_t seed);

}  // namespace bck::cli
