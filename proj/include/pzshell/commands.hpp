#pragma once

#include <string>

#include "pzshell/run_config.hpp"

namespace pzshell {

// Subcommand bodies.  Each one writes its artifacts into cfg.output_dir and
// throws ConfigError / SolverError on failure.
void cmd_cell(const RunConfig& cfg);
void cmd_homogenize(const RunConfig& cfg);
void cmd_macro(const RunConfig& cfg);
void cmd_validate(const RunConfig& cfg);

// Loads the config, applies the output directory override when non-empty,
// dispatches, and maps errors to the process exit code: 0 on success, 2 for
// configuration errors, 3 for solver failures.
int run_cli(const std::string& command, const std::string& config_path,
            const std::string& output_dir);

}  // namespace pzshell
