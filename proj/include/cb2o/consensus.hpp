#pragma once

#include "cb2o/quantile.hpp"
#include "cb2o/types.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace cb2o {

struct ConsensusConfig {
    double alpha = 30.0;
    double beta = 0.2;
    double delta_q = 0.0;
    double radius = std::numeric_limits<double>::infinity();
    QuantileMode mode = QuantileMode::practical;

    /// Ball radius and slack actually applied. Practical mode ignores both.
    double effective_radius() const
    {
        return mode == QuantileMode::practical ? std::numeric_limits<double>::infinity() : radius;
    }
    double effective_delta_q() const { return mode == QuantileMode::practical ? 0.0 : delta_q; }

    void validate() const
    {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
        if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
        if (!(delta_q >= 0.0)) throw InvalidArgument("delta_q must be >= 0");
        if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
    }
};

template <typename Scalar>
Scalar sublevel_threshold(std::span<const Scalar> losses, const ConsensusConfig& cfg)
{
    return quantile_threshold(losses, cfg.beta, cfg.effective_delta_q(), cfg.mode);
}

/// Indices i with L_i <= threshold and |theta_i| <= R (ties included).
template <typename Scalar>
std::vector<Index> sublevel_indices(std::span<const Scalar> losses, const MatRef<Scalar>& positions,
                                    const ConsensusConfig& cfg)
{
    if (static_cast<Index>(losses.size()) != positions.rows())
        throw InvalidArgument("losses and positions are misaligned");
    const Scalar threshold = sublevel_threshold(losses, cfg);
    const double radius = cfg.effective_radius();
    std::vector<Index> out;
    for (Index i = 0; i < positions.rows(); ++i) {
        if (losses[static_cast<std::size_t>(i)] > threshold) continue;
        if (std::isfinite(radius) && positions.row(i).norm() > radius) continue;
        out.push_back(i);
    }
    if (out.empty()) throw EmptySublevelSet();
    return out;
}

/// Gibbs-weighted mean of the selected rows with weights exp(-alpha * g_i).
/// The minimum over the selection is subtracted before exponentiating so the
/// largest weight is exactly 1.
template <typename Scalar>
Vec<Scalar> weighted_mean(const MatRef<Scalar>& positions, std::span<const Scalar> weight_objective,
                          std::span<const Index> selected, double alpha)
{
    if (selected.empty()) throw EmptySublevelSet();
    Scalar g_min = std::numeric_limits<Scalar>::infinity();
    for (const Index i : selected) g_min = std::min(g_min, weight_objective[static_cast<std::size_t>(i)]);

    Vec<Scalar> numerator = Vec<Scalar>::Zero(positions.cols());
    Scalar denominator = 0;
    for (const Index i : selected) {
        const Scalar w = std::exp(-static_cast<Scalar>(alpha) *
                                  (weight_objective[static_cast<std::size_t>(i)] - g_min));
        numerator.noalias() += w * positions.row(i).transpose();
        denominator += w;
    }
    return numerator / denominator;
}

/// Consensus point restricted to the sublevel set of L.
template <typename Scalar>
Vec<Scalar> consensus_point(const MatRef<Scalar>& positions, std::span<const Scalar> losses,
                            std::span<const Scalar> upper_values, const ConsensusConfig& cfg)
{
    if (static_cast<Index>(upper_values.size()) != positions.rows())
        throw InvalidArgument("upper-level values and positions are misaligned");
    const auto selected = sublevel_indices(losses, positions, cfg);
    return weighted_mean<Scalar>(positions, upper_values, selected, cfg.alpha);
}

}  // namespace cb2o
