#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace lpnp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitDivergence = 3,
};

// Each command assumes a validated RunConfig and reports through `out`.
// Library exceptions propagate; run_cli maps them to exit codes.
int cmd_denoise(const RunConfig& cfg, bool oracle, std::ostream& out);
int cmd_simulate_sr(const RunConfig& cfg, std::ostream& out);
int cmd_simulate_qis(const RunConfig& cfg, std::ostream& out);
int cmd_restore(const RunConfig& cfg, std::ostream& out);
int cmd_bench_denoiser(const RunConfig& cfg, std::ostream& out);

/// Full command line (args[0] is the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpnp::cli
