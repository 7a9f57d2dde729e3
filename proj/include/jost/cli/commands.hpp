#pragma once
// Subcommands of jostctl.  Each writes <name>.csv and <name>.json into the
// configured output directory and returns the process exit code.

#include "jost/cli/config.hpp"

#include <optional>
#include <string>

namespace jost::cli {

enum ExitCode : int { Success = 0, ValidationFailure = 1, NumericalFailure = 2 };

struct RunOptions {
  std::optional<unsigned> seed;  // fault injection only
  unsigned threads = 1;
};

//! Worker count from JOST_THREADS (default 1, clamped to [1, 256]).
unsigned threads_from_env();

int cmd_phase(const RunConfig& cfg, const RunOptions& opt);
int cmd_jost_scan(const RunConfig& cfg, const RunOptions& opt);
int cmd_bound_states(const RunConfig& cfg, const RunOptions& opt);
int cmd_amplitude(const RunConfig& cfg, const RunOptions& opt);
int cmd_kernel_dump(const RunConfig& cfg, const RunOptions& opt);
int cmd_selftest(const RunConfig& cfg, const RunOptions& opt);

//! Dispatch by subcommand name; validation errors map to 1, numerical ones to 2.
int run(const std::string& command, const std::string& config_path, const RunOptions& opt);

}  // namespace jost::cli
