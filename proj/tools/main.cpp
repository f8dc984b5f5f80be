// potluck: simulate and check the cooperative/competitive bandit game.
//
//   potluck run SCENARIO -o traj.csv [--force]
//   potluck qstar SCENARIO [--resolution R] [--refine K]
//   potluck check-potential SCENARIO [--nodes N] [--h H] [--threshold T]
//   potluck kronecker --preset alternating|harmonic|custom [--path FILE] [-n LEN]
//   potluck sweep SCENARIO --param strategy.p --grid 0:1:21 -o OUT_DIR

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace potluck::cli;

  CLI::App app{"Simulation and numerical checks for the empirical-frequency bandit game"};
  app.require_subcommand(1);
  app.set_version_flag("--version", POTLUCK_VERSION);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write its trajectory CSV");
  run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("-o,--out", run.out, "Trajectory CSV path (metadata goes to <out>.meta.json)")->required();
  run_cmd->add_flag("--force", run.force, "Run even if the weight sequence fails validation");

  QStarOptions qstar;
  auto* qstar_cmd = app.add_subcommand("qstar", "Maximize the mean payoff q over the simplex");
  qstar_cmd->add_option("scenario", qstar.scenario, "Scenario JSON file")->required();
  qstar_cmd->add_option("--resolution", qstar.resolution, "Coarse grid spacing")->capture_default_str();
  qstar_cmd->add_option("--refine", qstar.refine, "Local refinement rounds")->capture_default_str();

  CheckPotentialOptions pot;
  auto* pot_cmd = app.add_subcommand("check-potential",
                                     "Build the potential (d = 1) or test integrability (d >= 2)");
  pot_cmd->set_help_flag("--help", "Print this help message and exit");  // -h is taken by --h
  pot_cmd->add_option("scenario", pot.scenario, "Scenario JSON file")->required();
  pot_cmd->add_option("--nodes", pot.nodes, "Antiderivative table nodes")->capture_default_str();
  pot_cmd->add_option("--h", pot.h, "Finite-difference step")->capture_default_str();
  pot_cmd->add_option("--threshold", pot.threshold, "Pass threshold")->capture_default_str();
  pot_cmd->add_option("--samples", pot.samples, "Sample points")->capture_default_str();

  KroneckerOptions kr;
  auto* kr_cmd = app.add_subcommand("kronecker", "Summation-by-parts identity and Kronecker-type check");
  kr_cmd->add_option("--preset", kr.preset, "alternating | harmonic | custom")
      ->check(CLI::IsMember({"alternating", "harmonic", "custom"}))
      ->capture_default_str();
  kr_cmd->add_option("--path", kr.path, "CSV of a,b rows for --preset custom");
  kr_cmd->add_option("-n,--length", kr.length, "Series length for presets")->capture_default_str();
  kr_cmd->add_option("--eps", kr.eps, "Tolerance")->capture_default_str();

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one scenario per grid value (in parallel)");
  sweep_cmd->add_option("scenario", sweep.scenario, "Scenario JSON file")->required();
  sweep_cmd->add_option("--param", sweep.param, "strategy.p | weights.theta | weights.r | horizon")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "lo:hi:count or a single value")->required();
  sweep_cmd->add_option("-o,--out-dir", sweep.out_dir, "Output directory")->required();
  sweep_cmd->add_flag("--force", sweep.force, "Run even if weight sequences fail validation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*qstar_cmd) return cmd_qstar(qstar, std::cout, std::cerr);
  if (*pot_cmd) return cmd_check_potential(pot, std::cout, std::cerr);
  if (*kr_cmd) return cmd_kronecker(kr, std::cout, std::cerr);
  if (*sweep_cmd) return cmd_sweep(sweep, std::cout, std::cerr);
  return kExitError;
}
