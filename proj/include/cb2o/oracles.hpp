#pragma once

#include "cb2o/consensus.hpp"
#include "cb2o/fed/model.hpp"
#include "cb2o/metrics.hpp"
#include "cb2o/problems.hpp"
#include "cb2o/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

// Slow, independent reference implementations used to cross-check the
// production code paths.
namespace cb2o::oracle {

/// inf{q : a <= #{l_i <= q} / N}, scanning every candidate value.
double brute_quantile(std::span<const double> losses, double a);

/// (1 / (hi - lo)) * integral of q_a over [lo, hi] by a midpoint rule on a
/// grid refined with the jump points k / N.
double riemann_mean_quantile(std::span<const double> losses, double lo, double hi, std::size_t cells = 4096);

/// Same integral through the empirical CDF: integral of q_a da equals
/// q_hi * hi - q_lo * lo - integral_{q_lo}^{q_hi} F(x) dx.
double parts_mean_quantile(std::span<const double> losses, double lo, double hi);

double brute_threshold(std::span<const double> losses, const ConsensusConfig& cfg);

/// Consensus point with each normalized weight formed as
/// 1 / sum_j exp(-alpha (G_j - G_i)) in a double loop.
Vector naive_consensus(const Matrix& positions, std::span<const double> losses, std::span<const double> uppers,
                       const ConsensusConfig& cfg);

/// Central finite differences of the mean cross-entropy.
Vector fd_gradient(const fed::LogisticModel& model, const VecRef<double>& theta, const fed::Dataset& data,
                   double h = 1e-5);

using ConsensusFn = std::function<Vector(const Matrix&, std::span<const double>, std::span<const double>,
                                         const ConsensusConfig&)>;

/// The production consensus point, wrapped for injection.
ConsensusFn production_consensus();

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteConfig {
    std::uint64_t seed = 2024;
    std::size_t consensus_trials = 1000;
    std::size_t quantile_trials = 1000;
    std::size_t laplace_configs = 100;
    std::size_t coverage_seeds = 100;
    std::size_t gradient_trials = 100;
    std::size_t sampling_trials = 100000;
    std::size_t probe_samples = 100000;
    ConsensusFn consensus;  // empty means production_consensus()
};

Check consensus_check(const SuiteConfig& cfg);
Check quantile_check(const SuiteConfig& cfg);
Check laplace_sweep_check(const SuiteConfig& cfg);
Check coverage_check(const SuiteConfig& cfg);
Check sampling_frequency_check(const SuiteConfig& cfg);
Check gradient_check(const SuiteConfig& cfg);
Check probe_check(const SuiteConfig& cfg);

std::vector<Check> run_suite(const SuiteConfig& cfg);

/// One random admissible configuration for the Laplace-bound sweep on a
/// ring problem with random dimension and target, together with its result.
struct LaplaceCase {
    BiLevelProblem problem;
    Ensemble ensemble;
    ConsensusConfig consensus;
    LaplaceBoundParams params;
    LaplaceBoundResult result;
};
LaplaceCase random_laplace_case(rng::Stream& rng);

}  // namespace cb2o::oracle
