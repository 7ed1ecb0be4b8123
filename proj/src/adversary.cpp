#include "cb2o/adversary.hpp"

#include <cmath>

namespace cb2o {

void validate(const AdversaryPolicy& pol, Index dimension)
{
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, policy::RandomNoise>) {
                if (!(p.scale >= 0.0)) throw InvalidArgument("adversary noise scale must be >= 0");
            } else if constexpr (std::is_same_v<T, policy::FixedDecoy>) {
                if (p.point.size() != dimension || !p.point.allFinite())
                    throw InvalidArgument("decoy point must be finite with the problem dimension");
            } else if constexpr (std::is_same_v<T, policy::DriftToDecoy>) {
                if (p.point.size() != dimension || !p.point.allFinite())
                    throw InvalidArgument("decoy point must be finite with the problem dimension");
                if (!(p.rate >= 0.0)) throw InvalidArgument("adversary drift rate must be >= 0");
            } else if constexpr (std::is_same_v<T, policy::MimicOffset>) {
                if (p.offset.size() != dimension || !p.offset.allFinite())
                    throw InvalidArgument("mimic offset must be finite with the problem dimension");
            }
        },
        pol);
}

std::string policy_name(const AdversaryPolicy& pol)
{
    switch (pol.index()) {
    case 0: return "none";
    case 1: return "random_noise";
    case 2: return "fixed_decoy";
    case 3: return "drift_to_decoy";
    default: return "mimic_offset";
    }
}

void adversary_step(Ensemble& ensemble, const AdversaryContext& ctx, const AdversaryPolicy& pol)
{
    const double sqrt_gamma = std::sqrt(ctx.gamma);
    for (Index i = 0; i < ensemble.count(); ++i) {
        if (ensemble.roles[static_cast<std::size_t>(i)] != Role::malicious) continue;
        auto row = ensemble.positions.row(i);
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, policy::RandomNoise>) {
                    auto stream = rng::make_stream(ctx.seed, {rng::adversary, static_cast<std::uint64_t>(i), ctx.iteration});
                    for (Index k = 0; k < row.size(); ++k) row(k) += p.scale * sqrt_gamma * stream.normal();
                } else if constexpr (std::is_same_v<T, policy::FixedDecoy>) {
                    row = p.point.transpose();
                } else if constexpr (std::is_same_v<T, policy::DriftToDecoy>) {
                    const double h = p.rate * ctx.gamma;
                    for (Index k = 0; k < row.size(); ++k) row(k) = std::lerp(row(k), p.point(k), h);
                } else if constexpr (std::is_same_v<T, policy::MimicOffset>) {
                    row = (ctx.consensus + p.offset).transpose();
                }
            },
            pol);
    }
}

}  // namespace cb2o
