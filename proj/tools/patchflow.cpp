#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "patchflow/cli.hpp"

int main(int argc, char** argv) {
  using namespace patchflow::cli;
  CLI::App app{"patchflow: congested tumor growth with nutrients on a periodic grid"};
  app.require_subcommand(1);

  std::string simulate_cfg, sweep_cfg, traj_dir;
  auto* simulate = app.add_subcommand("simulate", "run one configuration and write its trajectory");
  simulate->add_option("config", simulate_cfg, "config file")->required();
  auto* sweep = app.add_subcommand("sweep", "run the D sweep plus the D = 0 reference and both reports");
  sweep->add_option("config", sweep_cfg, "config file")->required();
  auto* invariants = app.add_subcommand("invariants", "check a stored trajectory and write invariants.csv");
  invariants->add_option("dir", traj_dir, "trajectory directory")->required();

  std::uint64_t seed = 0;
  int count = 50;
  bool inject = false;
  auto* oracle = app.add_subcommand("oracle-test", "randomized oracle comparisons for the projection and c-transform");
  oracle->add_option("--seed", seed, "random seed")->required();
  oracle->add_option("--count", count, "number of instances")->required();
  oracle->add_flag("--inject-ct-bug", inject, "scale the c-transform by 1.01 (mutation check)")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (*simulate) return cmd_simulate(simulate_cfg, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(sweep_cfg, std::cout, std::cerr);
  if (*invariants) return cmd_invariants(traj_dir, std::cout, std::cerr);
  return cmd_oracle_test(seed, count, inject, std::cout, std::cerr);
}
