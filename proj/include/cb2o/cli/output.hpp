#pragma once

#include "cb2o/metrics.hpp"
#include "cb2o/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace cb2o::cli {

inline constexpr int kSchemaVersion = 1;

/// Column names in file order. Federated runs append the FL columns.
std::vector<std::string> metrics_columns(bool federated);

/// One row per round after a `# schema_version=N` line and a header.
void write_metrics_csv(std::ostream& out, std::span<const RoundMetrics> rounds, bool federated);

/// Values of one row in column order, formatted as in the CSV.
std::vector<std::string> metrics_row(const RoundMetrics& m, bool federated);

void write_matrix_csv(std::ostream& out, const Matrix& m);

/// Shortest round-tripping decimal form; nan and inf spelled out.
std::string format_number(double v);

nlohmann::json metrics_json(const RoundMetrics& m);

/// Writes `text` to `path`, creating parent directories; throws on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

std::string git_describe();

}  // namespace cb2o::cli
