#pragma once

#include <string>

#include "cli_config.hpp"

namespace whsboost::cli {

// Each command writes its outputs under `out_dir` (created on demand).
// Data files land via a `.partial` rename so an interrupted run never
// leaves a truncated final file; `run.log` is the only place timestamps
// appear. Returned value is the process exit code (0 ok, 2 partial or
// runtime failure); configuration problems throw ConfigError instead,
// which the driver maps to exit code 1.
int cmd_simulate(const RunConfig& config, const std::string& out_dir);
int cmd_bench(const RunConfig& config, const std::string& out_dir);
int cmd_stats(const RunConfig& config, const std::string& out_dir);

}  // namespace whsboost::cli
