#pragma once

#include "cb2o/adversary.hpp"
#include "cb2o/consensus.hpp"
#include "cb2o/dynamics.hpp"
#include "cb2o/ensemble.hpp"
#include "cb2o/metrics.hpp"
#include "cb2o/problems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cb2o {

/// Objective whose Gibbs weights drive the consensus point.
enum class WeightSource {
    upper,  // exp(-alpha G): bi-level consensus
    lower,  // exp(-alpha L): single-level consensus, blind to G
};

struct Cb2oRunConfig {
    ConsensusConfig consensus;
    StepConfig step;
    Index n_particles = 200;
    Index n_malicious = 0;
    std::size_t n_iters = 2000;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    /// Benign particles start uniform on center + [-half_width, half_width]^d.
    double init_half_width = 2.0;
    Vector init_center;  // empty means the origin

    WeightSource weights = WeightSource::upper;

    /// Replace (alpha, beta) by robust_hyperparams(.) for the run's w_b, w_m.
    bool robust = false;
    double epsilon = 0.01;

    void validate(Index dimension) const;
};

struct RobustHyperparams {
    double alpha;
    double beta;
};

/// beta' = beta * w_b and alpha' = alpha + max{0, log((w_m / w_b) * R_K_G / sqrt(epsilon))}.
RobustHyperparams robust_hyperparams(double base_alpha, double base_beta, double w_b, double w_m, double epsilon,
                                     double R_K_G);

struct Trajectory {
    std::vector<RoundMetrics> rounds;  // n_iters + 1 entries, initial state first
    Ensemble final_ensemble;
    ConsensusConfig consensus;         // configuration actually applied
    Vector last_consensus;
    /// Rounds whose sublevel set was empty and fell back to the best-loss
    /// particle inside B_R(0).
    std::vector<std::size_t> fallback_rounds;
    std::vector<std::string> warnings;
};

/// Evaluates benign-side metrics for a snapshot and its consensus point.
RoundMetrics particle_metrics(const Ensemble& ensemble, const BiLevelProblem& problem, const VecRef<double>& consensus,
                              std::size_t round, std::size_t sublevel_size);

Ensemble initialize_ensemble(const BiLevelProblem& problem, const AdversaryPolicy& adversary,
                             const Cb2oRunConfig& cfg);

Trajectory run_cb2o(const BiLevelProblem& problem, const AdversaryPolicy& adversary, const Cb2oRunConfig& cfg);

}  // namespace cb2o
