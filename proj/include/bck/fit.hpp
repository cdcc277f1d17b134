#pragma once

#include <optional>
#include <span>

namespace bck {

/// E(t) ~ M exp(-omega t) on [window_start, window_end].
struct DecayFit {
  double omega = 0.0;
  double M = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  /// RMS of the log-residuals over the window.
  double residual = 0.0;
};

/// Least-squares fit of log E against t over the trailing `window_fraction` of
/// the samples. Throws FitError on nonpositive values in the window or fewer than
/// two samples. With `monotone_tol` set, also throws when E increases by more than
/// that relative amount between consecutive window samples.
DecayFit decay_fit(std::span<const double> t, std::span<const double> energy,
                   double window_fraction, std::optional<double> monotone_tol = std::nullopt);

}  // namespace bck
