#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cosim/cli/config.hpp"

namespace cosim::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_diverged = 3,
};

/// Where a command writes its CSV: a file (with the effective configuration
/// echoed next to it as <path>.config.json) or, when empty, `out`.
struct Destination {
  std::optional<std::string> path;
  std::ostream* out = nullptr;
};

/// One co-simulation run; one CSV row per synchronization point.
int cmd_run(const RunConfig& cfg, const Destination& dest, std::ostream& err);

/// One fixed-step run per step size, rows ordered by step size. `jobs` runs
/// are executed concurrently.
int cmd_sweep(const RunConfig& cfg, std::vector<double> dts, unsigned jobs,
              const Destination& dest, std::ostream& err);

/// Output and energy errors of a run against the monolithic reference.
int cmd_compare(const RunConfig& cfg, const Destination& dest, std::ostream& err);

/// Entry point of the `cosim` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cosim::cli
