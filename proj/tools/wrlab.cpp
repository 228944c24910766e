#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wentzell/commands.hpp"

int main(int argc, char** argv) {
  using namespace wentzell;
  CLI::App app{"wrlab: elliptic operators with non-local Wentzell-Robin boundary conditions"};
  app.set_version_flag("--version", "wrlab 1.0 (schema " + std::to_string(kSchemaVersion) + ")");

  CommandOptions opts;
  std::string config;
  app.add_option("command", opts.command, "thresholds | classify | sweep | spectrum | evolve | check | eigenfunction | proj-rank")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config, "JSON configuration file ('-' reads stdin)");
  app.add_option("--tau", opts.tau, "boundary coupling strength of the example-8.1 preset");
  app.add_option("--n", opts.n, "number of grid cells");
  app.add_option("--t-final", opts.t_final, "final time for evolve");
  app.add_option("--samples", opts.samples, "time samples (evolve) or x samples (eigenfunction)");
  app.add_option("--out", opts.out, "output file (default stdout)");
  app.add_option("--format", opts.format, "json | csv | svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  app.add_option("--tol", opts.tol, "tolerance for certificates and probes");
  app.add_option("--tau-min", opts.tau_min, "sweep start (default 0)");
  app.add_option("--tau-max", opts.tau_max, "sweep end (default 5.5)");
  app.add_option("--steps", opts.steps, "sweep points (default 111)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (!config.empty()) opts.config_path = config;
  return dispatch(opts, std::cerr);
}
