#pragma once

#include "cb2o/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace cb2o {

enum class QuantileMode { theoretical, practical };

namespace detail {

template <typename Scalar>
std::vector<Scalar> sorted_finite_copy(std::span<const Scalar> values)
{
    if (values.empty()) throw InvalidArgument("quantile of an empty loss vector");
    std::vector<Scalar> sorted(values.begin(), values.end());
    for (const auto v : sorted) {
        if (!std::isfinite(v)) throw InvalidArgument("quantile input contains a non-finite loss");
    }
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

/// Smallest k in [1, n] with a <= k/n, i.e. the rank selected by the
/// infimum definition of the a-quantile on n equally weighted atoms.
inline std::size_t quantile_rank(double a, std::size_t n)
{
    const double dn = static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(a * dn));
    k = std::clamp<std::size_t>(k, 1, n);
    // a * n can round up past an exact ratio, e.g. 0.3 * 10.
    while (k > 1 && a <= static_cast<double>(k - 1) / dn) --k;
    while (k < n && a > static_cast<double>(k) / dn) ++k;
    return k;
}

}  // namespace detail

/// The a-quantile of the empirical loss distribution: the ceil(a*N)-th
/// smallest value.
template <typename Scalar>
Scalar empirical_quantile(std::span<const Scalar> losses, double a)
{
    if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("quantile fraction must lie in (0, 1]");
    auto sorted = detail::sorted_finite_copy(losses);
    return sorted[detail::quantile_rank(a, sorted.size()) - 1];
}

/// Exact value of (1 / (hi - lo)) * integral_lo^hi q_a da for the empirical
/// quantile function. q_a equals the k-th order statistic on ((k-1)/N, k/N],
/// so each step is integrated in closed form.
template <typename Scalar>
Scalar mean_quantile_between(std::span<const Scalar> losses, double lo, double hi)
{
    auto sorted = detail::sorted_finite_copy(losses);
    const double n = static_cast<double>(sorted.size());
    Scalar acc = 0;
    Scalar step_min = std::numeric_limits<Scalar>::infinity();
    Scalar step_max = -std::numeric_limits<Scalar>::infinity();
    for (std::size_t k = 1; k <= sorted.size(); ++k) {
        const double left = std::max(lo, static_cast<double>(k - 1) / n);
        const double right = std::min(hi, static_cast<double>(k) / n);
        if (right > left) {
            acc += sorted[k - 1] * static_cast<Scalar>(right - left);
            step_min = std::min(step_min, sorted[k - 1]);
            step_max = std::max(step_max, sorted[k - 1]);
        }
    }
    // Keeps a single-step integral equal to that step's value despite rounding.
    return std::clamp(acc / static_cast<Scalar>(hi - lo), step_min, step_max);
}

/// Sublevel threshold on L. Theoretical mode:
/// (2/beta) * integral_{beta/2}^{beta} q_a da + delta_q. Practical mode: q_beta.
template <typename Scalar>
Scalar quantile_threshold(std::span<const Scalar> losses, double beta, double delta_q,
                          QuantileMode mode)
{
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
    if (mode == QuantileMode::practical) return empirical_quantile(losses, beta);
    return mean_quantile_between(losses, beta / 2.0, beta) + static_cast<Scalar>(delta_q);
}

}  // namespace cb2o
