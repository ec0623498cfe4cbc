#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oids/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate parametric contextual bandits with optimistic information-directed sampling"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_override;
  app.add_option("--seed-override", seed_override, "Replace the base seed")->expected(1);
  std::size_t jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for repetitions")->check(CLI::PositiveNumber);

  oids::RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  run->add_option("--config", run_args.config_path, "Experiment JSON")->required();

  std::string example;
  std::optional<std::string> out_dir;
  auto* replicate = app.add_subcommand("replicate", "Replicate a worked example");
  replicate->add_option("name", example, "revealing | sparse | revelatory")->required();
  replicate->add_option("--out", out_dir, "Directory for summaries");

  std::string plot_dir;
  auto* plot = app.add_subcommand("export-plot", "Collect regret curves into plot.csv");
  plot->add_option("dir", plot_dir, "Run output directory")->required();

  oids::CheckBoundsArgs bounds;
  std::optional<double> lstar;
  auto* check = app.add_subcommand("check-bounds", "Check summaries against the regret bounds");
  check->add_option("dir", bounds.dir, "Run output directory")->required();
  check->add_option("--k", bounds.K, "Number of actions")->required();
  check->add_option("--n", bounds.N, "Number of parameters")->required();
  check->add_option("--lstar", lstar, "Optimal cumulative loss");
  check->add_option("--v", bounds.v, "Subgaussian parameter");

  // Subcommand-local copies of the global flags.
  for (auto* sub : {run, replicate, plot, check}) {
    sub->add_option("--seed-override", seed_override, "Replace the base seed");
    sub->add_option("--jobs", jobs, "Worker threads for repetitions")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : oids::kExitValidation;
  }

  if (*run) {
    run_args.seed_override = seed_override;
    run_args.jobs = jobs;
    return oids::cmd_run(run_args, std::cout, std::cerr);
  }
  if (*replicate) return oids::cmd_replicate(example, out_dir, seed_override, jobs, std::cout, std::cerr);
  if (*plot) return oids::cmd_export_plot(plot_dir, std::cout, std::cerr);
  bounds.lstar = lstar;
  return oids::cmd_check_bounds(bounds, std::cout, std::cerr);
}
