// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "cb2o/cli/config.hpp"
#include "cb2o/cli/runner.hpp"
#include "cb2o/fed/federation.hpp"
#include "cb2o/oracles.hpp"
#include "cb2o/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace cb2o;
namespace fs = std::filesystem;

namespace {

// Accuracy level, rate slack and time horizon of the convergence check.
struct ConvergenceTargets {
    double epsilon = 1e-3;
    double vartheta = 0.5;
    double T_star = 20.0;
};

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> body;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

Outcome from_check(const oracle::Check& c) { return {c.passed, c.detail}; }

Outcome convergence()
{
    const ConvergenceTargets targets;
    const auto problem = ring_problem(2);
    Cb2oRunConfig cfg;
    cfg.n_particles = 200;
    cfg.n_iters = static_cast<std::size_t>(std::lround(targets.T_star / cfg.step.gamma));
    const double drift_margin =
        2.0 * cfg.step.lambda - static_cast<double>(problem.dimension) * cfg.step.sigma * cfg.step.sigma;
    if (!(drift_margin > 0.0)) return {false, "defaults violate 2 lambda > d sigma^2"};

    const auto traj = run_cb2o(problem, policy::None{}, cfg);
    std::vector<double> V;
    for (const auto& r : traj.rounds) V.push_back(r.V_benign);
    // Fit the decay phase only: up to the first time V reaches the accuracy level.
    std::size_t end = V.size();
    for (std::size_t k = 0; k < V.size(); ++k)
        if (V[k] <= targets.epsilon) {
            end = k + 1;
            break;
        }
    const auto fit = fit_decay_rate(std::span<const double>(V.data(), end), 50, cfg.step.gamma);
    const double dist = traj.rounds.back().dist_mean;
    const double rate_floor = (1.0 - targets.vartheta) * drift_margin;
    const bool ok = dist < 0.05 && fit.slope < 0.0 && fit.r_squared > 0.9;
    return {ok, fmt("final distance %.4f (< 0.05), slope %.3f per unit time (< 0, reference rate %.2f), r^2 %.4f (> 0.9) "
                    "over %zu points",
                    dist, fit.slope, -rate_floor, fit.r_squared, fit.points)};
}

Outcome decoy_robustness()
{
    const auto problem = ring_problem(2);
    const policy::FixedDecoy decoy{problem.worst_minimizer};
    Cb2oRunConfig cfg;
    cfg.n_particles = 200;
    cfg.n_malicious = 40;
    cfg.n_iters = 2000;
    cfg.robust = true;
    cfg.consensus.mode = QuantileMode::theoretical;
    cfg.consensus.delta_q = 0.01;
    cfg.consensus.radius = 20.0;
    cfg.consensus.alpha = 30.0;
    cfg.consensus.beta = 0.5;
    bool ok = true;
    std::string detail = fmt("w_m=%.2f;", static_cast<double>(cfg.n_malicious) / static_cast<double>(cfg.n_particles));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        cfg.seed = seed;
        cfg.weights = WeightSource::upper;
        const auto robust = run_cb2o(problem, decoy, cfg);
        cfg.weights = WeightSource::lower;
        const auto blind = run_cb2o(problem, decoy, cfg);
        const double a = robust.rounds.back().dist_mean;
        const double b = blind.rounds.back().dist_mean;
        ok = ok && a < 0.1 && b > 0.5;
        detail += fmt(" seed %llu: exp(-aG) %.4f (< 0.1), exp(-aL) %.4f (> 0.5);", static_cast<unsigned long long>(seed), a, b);
        if (seed == 1) detail += fmt(" alpha'=%.4f beta'=%.3f;", robust.consensus.alpha, robust.consensus.beta);
    }
    return {ok, detail};
}

Outcome hyperparameter_rule()
{
    const auto same = robust_hyperparams(30.0, 0.2, 1.0, 0.0, 0.01, 2.0);
    bool ok = same.alpha == 30.0 && same.beta == 0.2;
    for (const double wb : {0.25, 0.5, 0.8, 1.0}) {
        const auto r = robust_hyperparams(30.0, 0.4, wb, 1.0 - wb, 0.01, 2.0);
        ok = ok && r.beta == 0.4 * wb;
    }
    const auto five = robust_hyperparams(30.0, 0.2, 0.8, 0.2, 0.01, 2.0);
    const bool increment = std::abs(five.alpha - (30.0 + std::log(5.0))) <= 1e-12;
    return {ok && increment, fmt("w_m=0 unchanged (%g, %g); beta' = beta w_b exact; alpha increment %.15f vs log 5 %.15f",
                                 same.alpha, same.beta, five.alpha - 30.0, std::log(5.0))};
}

struct FedAverages {
    double overall = 0.0, source = 0.0, asr = 0.0;
};

FedAverages fed_average(const fed::FedConfig& cfg, const fed::SyntheticDatasetSpec& spec)
{
    FedAverages avg;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto res = fed::run_federation(cfg, spec, seed);
        const auto& fl = *res.rounds.back().fl;
        avg.overall += fl.overall_acc_mean / 3.0;
        avg.source += fl.source_acc_mean / 3.0;
        avg.asr += fl.asr_mean / 3.0;
    }
    return avg;
}

struct FedRuns {
    FedAverages cb2o, cbo, cb2o_no_switch;
};

const FedRuns& fed_runs()
{
    static const FedRuns runs = [] {
        fed::FedConfig cfg;
        const fed::SyntheticDatasetSpec spec;
        FedRuns r;
        cfg.mode = fed::AggregationMode::fedcb2o;
        r.cb2o = fed_average(cfg, spec);
        cfg.mode = fed::AggregationMode::fedcbo;
        r.cbo = fed_average(cfg, spec);
        cfg.mode = fed::AggregationMode::fedcb2o;
        cfg.T_G = 0;
        r.cb2o_no_switch = fed_average(cfg, spec);
        return r;
    }();
    return runs;
}

Outcome fed_comparison()
{
    const auto& r = fed_runs();
    const bool ok = r.cb2o.source >= r.cbo.source + 10.0 && r.cb2o.asr <= r.cbo.asr - 10.0 &&
                    std::abs(r.cb2o.overall - r.cbo.overall) <= 5.0;
    return {ok, fmt("FedCB2O overall %.2f source %.2f ASR %.2f | FedCBO overall %.2f source %.2f ASR %.2f", r.cb2o.overall,
                    r.cb2o.source, r.cb2o.asr, r.cbo.overall, r.cbo.source, r.cbo.asr)};
}

Outcome switch_round()
{
    const auto& r = fed_runs();
    const bool ok = r.cb2o.overall >= r.cb2o_no_switch.overall - 0.5 && r.cb2o.source > r.cb2o_no_switch.source - 5.0;
    return {ok, fmt("T_G=30 overall %.2f source %.2f | T_G=0 overall %.2f source %.2f", r.cb2o.overall, r.cb2o.source,
                    r.cb2o_no_switch.overall, r.cb2o_no_switch.source)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    const auto root = fs::temp_directory_path() / "cb2o_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> setups{
        {"cb2o", "cb2o.iters = 300\ncb2o.malicious = 40\nadversary.policy = random_noise\nadversary.scale = 0.5\n"},
        {"fed", "mode = fed\nfed.T = 10\nfed.T_G = 5\n"},
    };
    bool ok = true;
    std::string detail;
    std::ostringstream sink;
    for (const auto& [name, text] : setups) {
        std::string csv[2];
        const unsigned threads[2] = {1, 8};
        for (int k = 0; k < 2; ++k) {
            auto cfg = cli::parse_config(text);
            cfg.threads = threads[k];
            cfg.out = (root / (name + "_t" + std::to_string(threads[k]))).string();
            if (cli::run(cfg, sink) != cli::exit_ok) return {false, name + " run failed"};
            csv[k] = slurp(fs::path(cfg.out) / "metrics.csv");
        }
        const bool same = !csv[0].empty() && csv[0] == csv[1];
        ok = ok && same;
        detail += fmt("%s metrics.csv %s at 1 vs 8 threads (%zu bytes); ", name.c_str(), same ? "identical" : "DIFFERS",
                      csv[0].size());
    }
    fs::remove_all(root);
    return {ok, detail};
}

}  // namespace

int main()
{
    const oracle::SuiteConfig suite;
    const std::vector<Criterion> criteria{
        {1, "consensus oracle", 5, [&] { return from_check(oracle::consensus_check(suite)); }},
        {2, "quantile oracle", 5, [&] { return from_check(oracle::quantile_check(suite)); }},
        {3, "Laplace-bound check", 30, [&] { return from_check(oracle::laplace_sweep_check(suite)); }},
        {4, "attack-free convergence", 10, convergence},
        {5, "worst-case decoy robustness", 30, decoy_robustness},
        {6, "hyperparameter rule", 1, hyperparameter_rule},
        {7, "FedCB2O vs FedCBO", 120, fed_comparison},
        {8, "T_G ordering", 120, switch_round},
        {9, "ProbSampling coverage", 5, [&] { return from_check(oracle::coverage_check(suite)); }},
        {10, "SGD gradient oracle", 5, [&] { return from_check(oracle::gradient_check(suite)); }},
        {11, "determinism across threads", 60, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs < c.budget_seconds;
        const bool passed = out.passed && in_budget;
        failures += !passed;
        std::printf("criterion %2d %s: %s [%.2f s, budget %.0f s%s] %s\n", c.id, passed ? "PASS" : "FAIL", c.name.c_str(),
                    secs, c.budget_seconds, in_budget ? "" : ", OVER BUDGET", out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
