#include "gdf/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"gdflab: resolvents, capacities, Yosida semigroups and subordinated chains on finite state spaces"};
  app.require_subcommand(1);

  gdf::RunOptions opt;
  long long seed_flag = -1;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* cfg = cmd->add_option("--config", opt.config_path, "experiment config file");
    if (needs_config) cfg->required();
    cmd->add_option("--seed", seed_flag, "override the config seed");
    cmd->add_option("--out", opt.out_dir, "output directory (overrides [output] dir)");
    cmd->add_option("--threads", opt.threads, "worker threads for Monte Carlo cells")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--tol-scale", opt.tol_scale, "tolerance multiplier for exploratory runs")
        ->check(CLI::PositiveNumber);
  };

  for (const char* name : {"capacity", "yosida-converge", "simulate", "exit-bound", "report"})
    add_common(app.add_subcommand(name), true);
  app.add_subcommand("selftest", "run the built-in example battery");

  CLI11_PARSE(app, argc, argv);

  opt.subcommand = app.get_subcommands().front()->get_name();
  if (seed_flag >= 0) opt.seed = static_cast<std::uint64_t>(seed_flag);
  return gdf::run(opt, std::cout, std::cerr);
}
