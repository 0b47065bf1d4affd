#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

void add_common(CLI::App* cmd, diffbeam::cli::CliInvocation& inv) {
  cmd->add_option("-c,--config", inv.config_path, "Design configuration (JSON)")->required();
  cmd->add_option("-o,--out", inv.output_dir, "Output directory");
  auto& o = inv.overrides;
  cmd->add_option("--steer-deg", o.steer_deg, "Override the steering direction (degrees)");
  cmd->add_option("--wng-slack-db", o.wng_slack_db, "Override the WNG slack v (dB)");
  cmd->add_option("--method", o.method, "Design method: inc or nc");
  cmd->add_option("--fmin", o.fmin_hz, "Lowest design frequency (Hz)");
  cmd->add_option("--fmax", o.fmax_hz, "Highest design frequency (Hz)");
  cmd->add_option("--fcount", o.fcount, "Number of log-spaced design frequencies");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace diffbeam::cli;

  CLI::App app{"Design and evaluate steerable differential beamformers for line arrays"};
  app.require_subcommand(1);

  CliInvocation inv;
  inv.threads = threads_from_env();

  auto* design = app.add_subcommand("design", "Broadband NC/INC design: filters.json, metrics.csv, beampattern.csv");
  add_common(design, inv);

  auto* evaluate = app.add_subcommand("evaluate", "Offline beampattern evaluation on measured or synthetic sets");
  add_common(evaluate, inv);
  evaluate->add_option("--filters", inv.filters_path, "filters.json from a design run (designed on the fly if absent)");
  evaluate->add_option("--measured", inv.measured_path, "Measured set CSV theta_deg,mic_index,re,im");
  evaluate->add_option("--frequency", inv.eval_frequencies_hz, "Evaluation frequencies (Hz)")->delimiter(',');
  evaluate->add_option("--seed", inv.seed, "Override the perturbation seed");
  evaluate->add_option("--grid-step-deg", inv.grid_step_deg, "Rotation grid step (degrees)");

  auto* sweep = app.add_subcommand("sweep", "Repeat a design over a parameter list");
  add_common(sweep, inv);
  sweep->add_option("--param", inv.sweep_param, "steer_deg, wng_slack_db or element_type")->required();
  sweep->add_option("--values", inv.sweep_values, "Comma-separated parameter values")->delimiter(',')->required();

  auto* nulls = app.add_subcommand("nulls", "Null offsets (degrees) of a normalised cosine-series pattern");
  nulls->add_option("--coeffs", inv.coefficients, "Coefficients a_0..a_N")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigInvalid;
  }

  if (*design) return run_design(inv, std::cout, std::cerr);
  if (*evaluate) return run_evaluate(inv, std::cout, std::cerr);
  if (*sweep) return run_sweep(inv, std::cout, std::cerr);
  return run_nulls(inv, std::cout, std::cerr);
}
