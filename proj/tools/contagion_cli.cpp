#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "contagion/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dynamic contagion reinsurance toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  const char* default_out = std::getenv("CONTAGION_OUT_DIR");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* out_opt = cmd->add_option("--out", out_dir, "output directory");
    if (default_out == nullptr) out_opt->required();
    cmd->add_option("--workers", workers,
                    "worker threads (0 = machine parallelism)");
    cmd->add_option("--seed", seed, "master seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  add_common(app.add_subcommand(
      "simulate", "dump simulated paths and the time-change diagnostic"));
  add_common(app.add_subcommand(
      "phi", "tabulate the reduced value function under a fixed policy"));
  add_common(app.add_subcommand(
      "optimize", "policy iteration: optimal strategy and value tables"));
  add_common(app.add_subcommand(
      "compare", "optimal strategy vs the shot-noise twin model"));
  add_common(app.add_subcommand(
      "check", "monotonicity condition margins and coupled probes"));

  CLI11_PARSE(app, argc, argv);

  contagion::RunOptions options;
  options.config_path = config_path;
  options.out_dir = out_dir.empty() && default_out ? default_out : out_dir;
  options.workers = workers;
  if (seed_set) options.seed_override = seed;

  return contagion::run_command(app.get_subcommands().front()->get_name(),
                                options);
}
