#pragma once

#include "cb2o/fed/data.hpp"
#include "cb2o/fed/model.hpp"
#include "cb2o/rng.hpp"
#include "cb2o/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace cb2o::fed {

enum class AggregationMode {
    fedcb2o,  // robustness-criterion weights from round T_G on
    fedcbo,   // average validation loss weights
    uniform,  // sample-count weights
};

/// Picks min(M, |P|) slots: never-scored slots (P_i == 0) first, uniformly;
/// otherwise sequential weighted draws without replacement, proportional to P.
std::vector<std::size_t> prob_sampling(std::span<const double> likelihood, std::size_t M, rng::Stream& rng);

/// P_i <- (1 - zeta) P_i + zeta exp(-kappa max(0, loss_i)) for the selected slots.
/// `losses` is aligned with `selected`.
void update_likelihood(std::span<double> likelihood, std::span<const std::size_t> selected,
                       std::span<const double> losses, double kappa, double zeta);

/// max over classes c of own validation set of loss_c(candidate) - loss_c(own).
/// Classes missing from `candidate` are skipped.
double robustness_G(const std::map<int, double>& candidate, const std::map<int, double>& own);
double robustness_G(const LogisticModel& model, const VecRef<double>& theta, const VecRef<double>& theta_own,
                    const Dataset& validation);

/// What a benign agent sees of a peer: an opaque slot and what it published.
struct Download {
    std::size_t slot;
    const Vector* theta;
    double sample_count;
};

struct AggregationConfig {
    AggregationMode mode = AggregationMode::fedcb2o;
    double alpha = 10.0;
    double lambda1 = 10.0;
    double gamma = 0.004;
    double kappa = 2.0;
    double zeta = 0.5;
    std::size_t T_G = 30;
};

struct AggregationOutcome {
    Vector theta;
    std::vector<double> weights;  // normalized, aligned with the downloads
    std::vector<double> losses;   // validation loss of each download
};

/// Scores the downloads on the agent's validation set, updates its sampling
/// likelihood in place, forms the weighted consensus m and returns
/// theta + lambda1 gamma (m - theta).
AggregationOutcome local_aggregation(const LogisticModel& model, const VecRef<double>& theta_own,
                                     std::vector<double>& likelihood, const Dataset& validation,
                                     std::span<const Download> downloads, std::size_t round,
                                     const AggregationConfig& cfg);

/// Attacker-side view of the population.
struct Roster {
    std::vector<AgentSlot> agents;
};

/// Other attackers of the same cluster first (random order, truncated to M),
/// then uniformly chosen benign agents of that cluster up to M in total.
std::vector<std::size_t> malicious_selection(std::size_t agent, const Roster& roster, std::size_t M,
                                             rng::Stream& rng);

/// Sample-count weighted mean of the own model and the downloads.
Vector malicious_aggregation(const VecRef<double>& theta_own, double own_count, std::span<const Vector* const> models,
                             std::span<const double> counts);

}  // namespace cb2o::fed
