#include "cb2o/fed/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cb2o::fed {

namespace {

/// Uniform k-subset of `pool` by a partial Fisher-Yates pass.
std::vector<std::size_t> uniform_subset(std::vector<std::size_t> pool, std::size_t k, rng::Stream& rng)
{
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace

std::vector<std::size_t> prob_sampling(std::span<const double> likelihood, std::size_t M, rng::Stream& rng)
{
    std::vector<std::size_t> zero_set;
    for (std::size_t i = 0; i < likelihood.size(); ++i) {
        if (!(likelihood[i] >= 0.0)) throw InvalidArgument("sampling likelihoods must be >= 0");
        if (likelihood[i] == 0.0) zero_set.push_back(i);
    }
    std::vector<std::size_t> out;
    if (!zero_set.empty()) {
        out = uniform_subset(std::move(zero_set), M, rng);
    } else {
        std::vector<double> mass(likelihood.begin(), likelihood.end());
        const std::size_t k = std::min(M, mass.size());
        for (std::size_t draw = 0; draw < k; ++draw) {
            const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
            const double u = rng.uniform() * total;
            double cum = 0.0;
            std::size_t pick = mass.size();
            for (std::size_t i = 0; i < mass.size(); ++i) {
                if (mass[i] <= 0.0) continue;
                cum += mass[i];
                pick = i;
                if (u < cum) break;
            }
            out.push_back(pick);
            mass[pick] = 0.0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void update_likelihood(std::span<double> likelihood, std::span<const std::size_t> selected,
                       std::span<const double> losses, double kappa, double zeta)
{
    if (selected.size() != losses.size()) throw InvalidArgument("one loss per selected slot required");
    for (std::size_t k = 0; k < selected.size(); ++k) {
        if (!std::isfinite(losses[k])) throw InvalidArgument("likelihood update needs finite losses");
        auto& p = likelihood[selected[k]];
        p = (1.0 - zeta) * p + zeta * std::exp(-kappa * std::max(0.0, losses[k]));
    }
}

double robustness_G(const std::map<int, double>& candidate, const std::map<int, double>& own)
{
    if (own.empty()) throw InvalidArgument("robustness criterion needs a nonempty validation set");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [c, own_loss] : own) {
        const auto it = candidate.find(c);
        if (it == candidate.end()) continue;
        worst = std::max(worst, it->second - own_loss);
    }
    return worst;
}

double robustness_G(const LogisticModel& model, const VecRef<double>& theta, const VecRef<double>& theta_own,
                    const Dataset& validation)
{
    if (validation.size() == 0) throw InvalidArgument("robustness criterion needs a nonempty validation set");
    return robustness_G(model.per_class_loss(theta, validation), model.per_class_loss(theta_own, validation));
}

AggregationOutcome local_aggregation(const LogisticModel& model, const VecRef<double>& theta_own,
                                     std::vector<double>& likelihood, const Dataset& validation,
                                     std::span<const Download> downloads, std::size_t round,
                                     const AggregationConfig& cfg)
{
    if (downloads.empty()) throw InvalidArgument("local aggregation needs at least one download");
    AggregationOutcome out;
    const std::size_t n = downloads.size();
    out.losses.resize(n);
    std::vector<std::size_t> slots(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.losses[k] = model.loss(*downloads[k].theta, validation);
        slots[k] = downloads[k].slot;
    }
    update_likelihood(likelihood, slots, out.losses, cfg.kappa, cfg.zeta);

    // Weights as log-weights first so the largest becomes exp(0) = 1.
    std::vector<double> log_w(n);
    if (cfg.mode == AggregationMode::uniform) {
        for (std::size_t k = 0; k < n; ++k) log_w[k] = std::log(downloads[k].sample_count);
    } else if (cfg.mode == AggregationMode::fedcb2o && round >= cfg.T_G) {
        const auto own = model.per_class_loss(theta_own, validation);
        for (std::size_t k = 0; k < n; ++k)
            log_w[k] = -cfg.alpha * robustness_G(model.per_class_loss(*downloads[k].theta, validation), own);
    } else {
        for (std::size_t k = 0; k < n; ++k) log_w[k] = -cfg.alpha * out.losses[k];
    }
    const double top = *std::max_element(log_w.begin(), log_w.end());
    out.weights.resize(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += out.weights[k] = std::exp(log_w[k] - top);

    Vector m = Vector::Zero(theta_own.size());
    for (std::size_t k = 0; k < n; ++k) {
        out.weights[k] /= total;
        m.noalias() += out.weights[k] * *downloads[k].theta;
    }
    const double h = cfg.lambda1 * cfg.gamma;
    out.theta.resize(theta_own.size());
    for (Index i = 0; i < m.size(); ++i) out.theta(i) = std::lerp(theta_own(i), m(i), h);
    return out;
}

std::vector<std::size_t> malicious_selection(std::size_t agent, const Roster& roster, std::size_t M,
                                             rng::Stream& rng)
{
    const auto& me = roster.agents.at(agent);
    std::vector<std::size_t> attackers, benign;
    for (std::size_t i = 0; i < roster.agents.size(); ++i) {
        if (i == agent || roster.agents[i].cluster != me.cluster) continue;
        (roster.agents[i].role == Role::malicious ? attackers : benign).push_back(i);
    }
    auto out = uniform_subset(std::move(attackers), M, rng);
    const auto rest = uniform_subset(std::move(benign), M - out.size(), rng);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

Vector malicious_aggregation(const VecRef<double>& theta_own, double own_count, std::span<const Vector* const> models,
                             std::span<const double> counts)
{
    if (models.size() != counts.size()) throw InvalidArgument("one sample count per model required");
    if (!(own_count > 0.0)) throw InvalidArgument("sample counts must be positive");
    Vector acc = own_count * theta_own;
    double total = own_count;
    for (std::size_t k = 0; k < models.size(); ++k) {
        if (!(counts[k] > 0.0)) throw InvalidArgument("sample counts must be positive");
        acc.noalias() += counts[k] * *models[k];
        total += counts[k];
    }
    return acc / total;
}

}  // namespace cb2o::fed
