#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "dualact/errors.hpp"
#include "dualact/runner.hpp"
#include "dualact/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario file")->required();
  cmd->add_option("--out", args.out_dir, "Output directory (default: current)");
  cmd->add_option("--threads", args.threads, "Worker threads for node-level work (default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
}

dualact::RunOptions make_options(const CommonArgs& args) {
  dualact::RunOptions options;
  options.out_dir = args.out_dir;
  options.threads = args.threads;
  options.seed = args.seed;
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dualact: periodic solutions of multi-time Hamilton systems via the dual variational "
      "principle"};
  app.require_subcommand(1);

  CommonArgs solve_args, conj_args, verify_args, conserve_args, sweep_args;
  std::string verify_field;
  std::string conserve_field;

  CLI::App* solve = app.add_subcommand("solve", "Search for a periodic critical point");
  add_common(solve, solve_args);

  CLI::App* conj = app.add_subcommand("conjugate-check",
                                      "Conjugation property suite (inverse identity, bounds)");
  add_common(conj, conj_args);

  CLI::App* verify = app.add_subcommand("verify", "Residual checks on a stored field");
  add_common(verify, verify_args);
  verify->add_option("--field", verify_field, "Field CSV written by solve")->required();

  CLI::App* conserve =
      app.add_subcommand("conserve", "Energy-moment tensor and first-integral reports");
  add_common(conserve, conserve_args);
  conserve->add_option("--field", conserve_field, "Trajectory or field CSV (default: reference)");

  CLI::App* sweep = app.add_subcommand("sweep", "Grid-refinement study on the reference field");
  add_common(sweep, sweep_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (solve->parsed()) {
      const auto scenario = dualact::parse_scenario_file(solve_args.scenario_path);
      return dualact::run_solve(scenario, make_options(solve_args));
    }
    if (conj->parsed()) {
      const auto scenario = dualact::parse_scenario_file(conj_args.scenario_path);
      return dualact::run_conjugate_check(scenario, make_options(conj_args));
    }
    if (verify->parsed()) {
      const auto scenario = dualact::parse_scenario_file(verify_args.scenario_path);
      return dualact::run_verify(scenario, make_options(verify_args), verify_field);
    }
    if (conserve->parsed()) {
      const auto scenario = dualact::parse_scenario_file(conserve_args.scenario_path);
      std::optional<std::filesystem::path> field;
      if (!conserve_field.empty()) {
        field = conserve_field;
      }
      return dualact::run_conserve(scenario, make_options(conserve_args), field);
    }
    if (sweep->parsed()) {
      const auto scenario = dualact::parse_scenario_file(sweep_args.scenario_path);
      return dualact::run_sweep(scenario, make_options(sweep_args));
    }
  } catch (const dualact::ScenarioError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitInputError;
}
