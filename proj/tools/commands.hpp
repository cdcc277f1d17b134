#pragma once

// The five bck-sim commands. Each writes its artifacts into an Output and
// returns normally on success; failures propagate as exceptions, except for
// runs that stop early after emitting a partial trajectory, which report the
// failure through the returned Outcome.

#include <exception>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace bck::cli {

/// Round-trip formatting, 17 significant digits.
std::string fmt(double v);

class Output {
 public:
  explicit Output(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  /// Full path of an artifact; the name is recorded in the artifact list.
  std::filesystem::path artifact(const std::string& name);
  const std::vector<std::string>& artifacts() const { return artifacts_; }

  void set(const std::string& key, double v);
  void set(const std::string& key, const std::string& v);
  void set_bool(const std::string& key, bool v);
  const std::vector<std::pair<std::string, std::string>>& summary() const { return summary_; }
  /// Writes summary.txt when any key was set.
  void write_summary();

 private:
  std::filesystem::path dir_;
  std::vector<std::string> artifacts_;
  std::vector<std::pair<std::string, std::string>> summary_;
};

struct Outcome {
  int exit_code = 0;
  /// One line, `error=<kind> key=value ...`; empty on success.
  std::string reason;
};

/// Exit code and reason line for an exception thrown by a command.
Outcome classify(std::exception_ptr e);

extern const std::vector<std::string> csv_columns;

Outcome cmd_simulate(const SolverConfig& cfg, Output& out);
Outcome cmd_linear_analyze(const SolverConfig& cfg, Output& out);
Outcome cmd_picard(const SolverConfig& cfg, Output& out);
Outcome cmd_convergence(const SolverConfig& cfg, Output& out);
Outcome cmd_decay_study(const SolverConfig& cfg, Output& out);

/// Dispatch by name; throws ConfigError for an unknown command.
Outcome run_command(const std::string& command, const SolverConfig& cfg, Output& out);

}  // namespace bck::cli
