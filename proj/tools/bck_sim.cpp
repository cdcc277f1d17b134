// bck-sim: batch front-end for the BCK / BCW solvers.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("bck-sim");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("BCK_SIM_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

void write_run_record(const std::string& dir, const std::string& hash, const std::string& command,
                      int status, double wall, std::vector<std::string> artifacts) {
  std::filesystem::create_directories(dir);
  artifacts.push_back("run_record.txt");
  std::ofstream f(std::filesystem::path(dir) / "run_record.txt", std::ios::binary);
  f << "config_hash: " << hash << '\n'
    << "command: " << command << '\n'
    << "exit_status: " << status << '\n'
    << "wall_time_s: " << bck::cli::fmt(wall) << '\n'
    << "artifacts: ";
  for (std::size_t i = 0; i < artifacts.size(); ++i) f << (i ? "," : "") << artifacts[i];
  f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  const auto start = std::chrono::steady_clock::now();

  CLI::App app{"BCK / BCW nonlinear acoustics solver"};
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "simulate | linear-analyze | picard | convergence | decay-study")
      ->required()
      ->check(CLI::IsMember({"simulate", "linear-analyze", "picard", "convergence", "decay-study"}));
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--set", overrides, "override, section.key=value")->take_all();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "bck-sim: error=usage message=\"" << e.what() << "\"\n";
    return 3;
  }

  std::string hash = "unknown";
  bck::cli::Outcome outcome;
  std::vector<std::string> artifacts;
  try {
    const bck::cli::SolverConfig cfg = bck::cli::load_config(config_path, overrides, seed);
    hash = cfg.hash_hex();
    spdlog::info("command={} config_hash={} out={}", command, hash, out_dir);
    bck::cli::Output out(out_dir);
    try {
      outcome = bck::cli::run_command(command, cfg, out);
    } catch (...) {
      artifacts = out.artifacts();
      throw;
    }
    artifacts = out.artifacts();
  } catch (...) {
    outcome = bck::cli::classify(std::current_exception());
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_run_record(out_dir, hash, command, outcome.exit_code, wall, artifacts);
  } catch (const std::exception& e) {
    spdlog::error("cannot write run record: {}", e.what());
  }
  if (outcome.exit_code != 0) std::cerr << "bck-sim: " << outcome.reason << '\n';
  spdlog::info("exit_status={} wall_time_s={}", outcome.exit_code, wall);
  return outcome.exit_code;
}
