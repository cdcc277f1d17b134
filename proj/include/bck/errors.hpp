#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace bck {

/// Short %g rendering for diagnostics.
inline std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// 1 + 2k u_t came within the guard margin of zero.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(double t, std::size_t grid_index, double factor)
      : std::runtime_error("degeneracy at t=" + short_num(t) + " grid_index=" +
                           std::to_string(grid_index) + " factor=" + short_num(factor)),
        t_(t),
        index_(grid_index),
        factor_(factor) {}

  double time() const { return t_; }
  std::size_t grid_index() const { return index_; }
  /// 1 - 2k|u_t| at the offending node.
  double factor() const { return factor_; }

 private:
  double t_;
  std::size_t index_;
  double factor_;
};

/// A state norm exceeded the blow-up bound.
class OverflowError : public std::runtime_error {
 public:
  OverflowError(double t, double norm)
      : std::runtime_error("overflow at t=" + short_num(t) + " norm=" + short_num(norm)),
        t_(t),
        norm_(norm) {}
  double time() const { return t_; }
  double norm() const { return norm_; }

 private:
  double t_;
  double norm_;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> ratios)
      : std::runtime_error(what), ratios_(std::move(ratios)) {}
  const std::vector<double>& ratios() const { return ratios_; }

 private:
  std::vector<double> ratios_;
};

class FitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Division by a vanishing reference quantity in an audit.
class DivisionGuard : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bck
