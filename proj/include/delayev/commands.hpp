#pragma once

#include <string>
#include <vector>

#include "delayev/config.hpp"

namespace delayev {

/// Exit codes shared by all subcommands:
///   0 success, 1 configuration error, 2 certificate failure,
///   3 solver non-convergence, 4 envelope violation.
int cmd_check(const RunConfig& cfg, const std::string& outdir);
int cmd_simulate(const RunConfig& cfg, const std::string& outdir);
int cmd_certify_decay(const RunConfig& cfg, const std::string& outdir);
int cmd_sweep(const RunConfig& cfg, const std::string& param_path,
              const std::vector<double>& values, int workers,
              const std::string& outdir);
int cmd_model_info(const RunConfig& cfg, const std::string& outdir);

} // namespace delayev
