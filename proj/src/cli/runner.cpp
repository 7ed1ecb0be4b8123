#include "cb2o/cli/runner.hpp"

#include "cb2o/cli/output.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <iomanip>
#include <sstream>

namespace cb2o::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_echo(const ExperimentConfig& cfg)
{
    json j = json::object();
    for (const auto& k : config_keys()) j[k.key] = get_value(cfg, k.key);
    return j;
}

json summary_header(const ExperimentConfig& cfg, double seconds)
{
    return {{"schema_version", kSchemaVersion}, {"mode", to_string(cfg.mode)}, {"seed", cfg.seed},
            {"git_describe", git_describe()},   {"wall_clock_seconds", seconds}, {"config", config_echo(cfg)}};
}

std::string csv_text(const std::vector<RoundMetrics>& rounds, bool federated)
{
    std::ostringstream os;
    write_metrics_csv(os, rounds, federated);
    return os.str();
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

std::vector<RoundMetrics> run_cb2o_mode(const ExperimentConfig& cfg, const fs::path& dir)
{
    Stopwatch clock;
    const auto problem = build_problem(cfg);
    const auto adversary = build_adversary(cfg, problem);
    const auto run_cfg = build_run_config(cfg);
    for (const auto& w : run_cfg.step.warnings(problem.dimension)) spdlog::warn("{}", w);

    auto traj = run_cb2o(problem, adversary, run_cfg);
    for (const auto t : traj.fallback_rounds) spdlog::info("round {}: empty sublevel set, used best-loss particle", t);

    write_file(dir / "metrics.csv", csv_text(traj.rounds, false));
    json s = summary_header(cfg, clock.seconds());
    s["final"] = metrics_json(traj.rounds.back());
    s["effective"] = {{"alpha", traj.consensus.alpha},
                      {"beta", traj.consensus.beta},
                      {"radius", format_number(traj.consensus.effective_radius())},
                      {"delta_q", traj.consensus.effective_delta_q()}};
    s["adversary"] = policy_name(adversary);
    s["fallback_rounds"] = traj.fallback_rounds;
    s["warnings"] = traj.warnings;
    s["final_consensus"] = std::vector<double>(traj.last_consensus.data(),
                                               traj.last_consensus.data() + traj.last_consensus.size());
    write_file(dir / "summary.json", s.dump(2) + "\n");
    return std::move(traj.rounds);
}

std::vector<RoundMetrics> run_fed_mode(const ExperimentConfig& cfg, const fs::path& dir)
{
    Stopwatch clock;
    auto fed_cfg = cfg.fed;
    fed_cfg.threads = cfg.threads;
    auto res = fed::run_federation(fed_cfg, cfg.data, cfg.seed);

    write_file(dir / "metrics.csv", csv_text(res.rounds, true));
    std::ostringstream sel, weight;
    write_matrix_csv(sel, res.selection_counts);
    write_matrix_csv(weight, res.weight_mass);
    write_file(dir / "selection_counts.csv", sel.str());
    write_file(dir / "weight_mass.csv", weight.str());

    json s = summary_header(cfg, clock.seconds());
    s["final"] = metrics_json(res.rounds.back());
    json roster = json::array();
    for (const auto& a : res.roster.agents)
        roster.push_back({{"cluster", a.cluster}, {"role", a.role == Role::benign ? "benign" : "malicious"}});
    s["roster"] = roster;
    write_file(dir / "summary.json", s.dump(2) + "\n");
    return std::move(res.rounds);
}

void run_sweep_mode(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& report)
{
    const bool federated = cfg.sweep.base_mode == Mode::fed;
    std::ostringstream merged;
    merged << "# schema_version=" << kSchemaVersion << "\n" << cfg.sweep.key;
    for (const auto& c : metrics_columns(federated)) merged << "," << c;
    merged << "\n";
    for (const auto& value : cfg.sweep.values) {
        ExperimentConfig sub = cfg;
        sub.mode = cfg.sweep.base_mode;
        set_value(sub, cfg.sweep.key, value);
        validate(sub);
        const fs::path sub_dir = dir / (cfg.sweep.key + "=" + value);
        sub.out = sub_dir.string();
        report << "sweep " << cfg.sweep.key << " = " << value << " -> " << sub_dir.string() << "\n";
        const auto rounds = federated ? run_fed_mode(sub, sub_dir) : run_cb2o_mode(sub, sub_dir);
        merged << value;
        for (const auto& v : metrics_row(rounds.back(), federated)) merged << "," << v;
        merged << "\n";
    }
    write_file(dir / "sweep.csv", merged.str());
}

bool run_oracle_mode(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& report)
{
    Stopwatch clock;
    auto suite = cfg.oracle;
    suite.seed = cfg.seed;
    const auto checks = oracle::run_suite(suite);
    bool all = true;
    json rows = json::array();
    report << std::left << std::setw(26) << "oracle" << std::setw(8) << "result" << std::setw(10) << "seconds"
           << "detail\n";
    for (const auto& c : checks) {
        all = all && c.passed;
        std::ostringstream secs;
        secs << std::fixed << std::setprecision(3) << c.seconds;
        report << std::left << std::setw(26) << c.name << std::setw(8) << (c.passed ? "PASS" : "FAIL") << std::setw(10)
               << secs.str() << c.detail << "\n";
        rows.push_back({{"name", c.name}, {"passed", c.passed}, {"seconds", c.seconds}, {"detail", c.detail}});
    }
    report << (all ? "all oracles passed" : "ORACLE FAILURE") << " in " << clock.seconds() << " s\n";
    json s = summary_header(cfg, clock.seconds());
    s["oracles"] = rows;
    s["passed"] = all;
    write_file(dir / "summary.json", s.dump(2) + "\n");
    return all;
}

int run(const ExperimentConfig& cfg, std::ostream& report)
{
    try {
        validate(cfg);
        const fs::path dir(cfg.out);
        switch (cfg.mode) {
        case Mode::cb2o: run_cb2o_mode(cfg, dir); break;
        case Mode::fed: run_fed_mode(cfg, dir); break;
        case Mode::sweep: run_sweep_mode(cfg, dir, report); break;
        case Mode::oracle: return run_oracle_mode(cfg, dir, report) ? exit_ok : exit_oracle_failure;
        }
        report << "wrote " << dir.string() << "\n";
        return exit_ok;
    } catch (const ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return exit_config_error;
    } catch (const InvalidArgument& e) {
        spdlog::error("invalid input: {}", e.what());
        return exit_config_error;
    } catch (const std::exception& e) {
        spdlog::error("run failed: {}", e.what());
        return exit_simulation_error;
    }
}

}  // namespace cb2o::cli
