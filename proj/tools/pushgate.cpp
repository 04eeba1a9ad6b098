// pushgate <config-file> [--out DIR] [--threads N]
#include "pushgate/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Two-ion pushing-gate simulator: error budgets, sweeps and pulse optimization"};
  std::string config_path;
  pushgate::RunOptions options;
  app.add_option("config", config_path, "flat key = value run configuration")->required();
  app.add_option("--out", options.out_dir, "output directory (overrides the config's output)");
  app.add_option("--threads", options.threads, "sweep worker threads")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return pushgate::run_cli(config_path, options, std::cerr);
}
