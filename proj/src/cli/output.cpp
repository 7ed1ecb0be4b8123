#include "cb2o/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef CB2O_GIT_DESCRIBE
#define CB2O_GIT_DESCRIBE "unknown"
#endif

namespace cb2o::cli {

namespace {

const char* const kCategories[] = {"same_benign", "same_malicious", "other_benign", "other_malicious"};

nlohmann::json number(double v)
{
    // JSON has no nan/inf; keep them readable as strings.
    if (!std::isfinite(v)) return format_number(v);
    return v;
}

}  // namespace

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> metrics_columns(bool federated)
{
    std::vector<std::string> cols{"round", "V_benign", "dist_mean", "consensus_dist", "sublevel_size"};
    if (federated) {
        cols.insert(cols.end(), {"overall_acc_mean", "source_acc_mean", "asr_mean"});
        for (const char* c : kCategories) cols.push_back(std::string("sel_") + c);
        for (const char* c : kCategories) cols.push_back(std::string("w_") + c);
    }
    return cols;
}

std::vector<std::string> metrics_row(const RoundMetrics& m, bool federated)
{
    std::vector<std::string> row{std::to_string(m.round), format_number(m.V_benign), format_number(m.dist_mean),
                                 format_number(m.consensus_dist), format_number(m.sublevel_size)};
    if (federated) {
        if (!m.fl) throw std::logic_error("federated row without federated metrics");
        const auto& f = *m.fl;
        row.insert(row.end(), {format_number(f.overall_acc_mean), format_number(f.source_acc_mean),
                               format_number(f.asr_mean)});
        for (const double v : f.selection) row.push_back(format_number(v));
        for (const double v : f.weight_mass) row.push_back(format_number(v));
    }
    return row;
}

void write_metrics_csv(std::ostream& out, std::span<const RoundMetrics> rounds, bool federated)
{
    out << "# schema_version=" << kSchemaVersion << "\n";
    const auto cols = metrics_columns(federated);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const auto& m : rounds) {
        const auto row = metrics_row(m, federated);
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_matrix_csv(std::ostream& out, const Matrix& m)
{
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_number(m(i, j));
        out << "\n";
    }
}

nlohmann::json metrics_json(const RoundMetrics& m)
{
    nlohmann::json j{{"round", m.round},
                     {"V_benign", number(m.V_benign)},
                     {"dist_mean", number(m.dist_mean)},
                     {"consensus_dist", number(m.consensus_dist)},
                     {"sublevel_size", number(m.sublevel_size)}};
    if (m.fl) {
        const auto& f = *m.fl;
        j["overall_acc_mean"] = number(f.overall_acc_mean);
        j["source_acc_mean"] = number(f.source_acc_mean);
        j["asr_mean"] = number(f.asr_mean);
        for (int c = 0; c < 4; ++c) {
            j["selection"][kCategories[c]] = number(f.selection[static_cast<std::size_t>(c)]);
            j["weight_mass"][kCategories[c]] = number(f.weight_mass[static_cast<std::size_t>(c)]);
        }
        auto list = [](const std::vector<double>& v) {
            nlohmann::json a = nlohmann::json::array();
            for (const double x : v) a.push_back(number(x));
            return a;
        };
        j["per_agent"] = {{"overall_acc", list(f.overall_acc)}, {"source_acc", list(f.source_acc)}, {"asr", list(f.asr)}};
    }
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string git_describe() { return CB2O_GIT_DESCRIBE; }

}  // namespace cb2o::cli
