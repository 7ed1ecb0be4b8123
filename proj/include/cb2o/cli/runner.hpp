#pragma once

#include "cb2o/cli/config.hpp"
#include "cb2o/metrics.hpp"

#include <filesystem>
#include <ostream>
#include <vector>

namespace cb2o::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_simulation_error = 1,
    exit_config_error = 2,
    exit_oracle_failure = 3,
};

/// Runs the configured mode, writing its files under cfg.out. Returns the
/// process exit code; `report` receives human-readable progress and tables.
int run(const ExperimentConfig& cfg, std::ostream& report);

// Individual modes. They throw on error instead of mapping to exit codes.
std::vector<RoundMetrics> run_cb2o_mode(const ExperimentConfig& cfg, const std::filesystem::path& dir);
std::vector<RoundMetrics> run_fed_mode(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void run_sweep_mode(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& report);
/// Returns true when every oracle passed.
bool run_oracle_mode(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& report);

}  // namespace cb2o::cli
