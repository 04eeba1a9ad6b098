#pragma once

#include "pushgate/config.hpp"

#include <iosfwd>
#include <string>

namespace pushgate {

struct RunOptions {
  std::string out_dir;  ///< empty: use the config's `output`
  int threads = 1;      ///< sweep workers
};

/// Executes the configured mode and writes its files into the output
/// directory. Data files are deterministic; wall time goes to summary.txt.
void run(const RunConfig& config, const RunOptions& options);

/// load_config + run with exit-code mapping: 0 ok, 1 config (or I/O) error,
/// 2 numerical failure. Messages go to `err`.
int run_cli(const std::string& config_path, const RunOptions& options, std::ostream& err);

}  // namespace pushgate
