#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diffbeam/designer.hpp"

namespace diffbeam::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigInvalid = 2,
  kExitDesignFailed = 3,
};

struct Overrides {
  std::optional<double> steer_deg;
  std::optional<double> wng_slack_db;
  std::optional<std::string> method;
  std::optional<double> fmin_hz;
  std::optional<double> fmax_hz;
  std::optional<int> fcount;
};

struct CliInvocation {
  std::string subcommand;
  std::string config_path;
  std::string output_dir = ".";
  Overrides overrides;
  unsigned threads = 0;

  // evaluate
  std::string filters_path;
  std::string measured_path;
  std::vector<double> eval_frequencies_hz;
  std::optional<std::uint64_t> seed;
  double grid_step_deg = 5.0;

  // sweep
  std::string sweep_param;
  std::vector<std::string> sweep_values;

  // nulls
  std::vector<double> coefficients;
};

// Loads the config and applies command-line overrides (which win).
DesignConfig load_config_with_overrides(const CliInvocation& inv);

// Each returns a process exit code and reports diagnostics on `err`.
int run_design(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int run_evaluate(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int run_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int run_nulls(const CliInvocation& inv, std::ostream& out, std::ostream& err);

// Parses DIFFBEAM_THREADS; 0 (auto) when unset or invalid.
unsigned threads_from_env();

}  // namespace diffbeam::cli
