#pragma once

#include "cb2o/fed/aggregation.hpp"
#include "cb2o/fed/data.hpp"
#include "cb2o/fed/model.hpp"
#include "cb2o/metrics.hpp"

#include <cstdint>
#include <vector>

namespace cb2o::fed {

struct FedConfig {
    int clusters = 2;
    int benign_per_cluster = 7;
    int malicious_per_cluster = 3;
    std::size_t M = 4;
    std::size_t T = 60;
    int tau = 5;
    double lambda1 = 10.0;
    double lambda2 = 1.0;
    double alpha = 10.0;
    double kappa = 2.0;
    double zeta = 0.5;
    double gamma = 0.004;
    std::size_t T_G = 30;
    AggregationMode mode = AggregationMode::fedcb2o;
    Index batch_size = 100;
    double init_scale = 0.01;
    unsigned threads = 1;

    std::size_t agents() const
    {
        return static_cast<std::size_t>(clusters) * static_cast<std::size_t>(benign_per_cluster + malicious_per_cluster);
    }
    void validate() const;
    AggregationConfig aggregation() const { return {mode, alpha, lambda1, gamma, kappa, zeta, T_G}; }
    LocalUpdateConfig local() const { return {tau, lambda2 * gamma, batch_size}; }
};

/// Agents of cluster k occupy a contiguous block, benign first.
Roster make_roster(const FedConfig& cfg);

struct Evaluation {
    double overall = 0.0;  // percent
    double source = 0.0;   // NaN without source samples
    double asr = 0.0;      // NaN without source samples
};

Evaluation evaluate(const LogisticModel& model, const VecRef<double>& theta, const Dataset& test, int c_source,
                    int c_target);

/// Download categories from a benign agent's point of view.
enum Category { same_benign = 0, same_malicious = 1, other_benign = 2, other_malicious = 3 };

struct FedResult {
    Roster roster;
    std::vector<RoundMetrics> rounds;  // T + 1 entries, initial evaluation first
    Matrix selection_counts;           // [j, i]: times j downloaded i
    Matrix weight_mass;                // [j, i]: summed normalized weight j gave i
    std::vector<Vector> final_models;
};

FedResult run_federation(const FedConfig& cfg, const SyntheticDatasetSpec& spec, std::uint64_t seed);

}  // namespace cb2o::fed
