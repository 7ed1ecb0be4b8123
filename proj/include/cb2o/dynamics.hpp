#pragma once

#include "cb2o/ensemble.hpp"
#include "cb2o/parallel.hpp"
#include "cb2o/rng.hpp"
#include "cb2o/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cb2o {

struct StepConfig {
    double lambda = 1.0;
    double sigma = 0.5;
    double gamma = 0.01;

    void validate() const
    {
        if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
        if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
        if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    }

    /// Non-fatal observations about the parameter regime.
    std::vector<std::string> warnings(Index dimension) const
    {
        std::vector<std::string> out;
        if (!(2.0 * lambda > static_cast<double>(dimension) * sigma * sigma))
            out.emplace_back("2*lambda <= d*sigma^2: drift does not dominate diffusion");
        if (lambda * gamma > 1.0) out.emplace_back("lambda*gamma > 1: drift step overshoots the consensus point");
        return out;
    }
};

/// One Euler-Maruyama step with isotropic diffusion |theta - m| * Id for every
/// benign particle. Noise for particle i at `iteration` comes from its own
/// stream, so the result does not depend on `threads`. Malicious rows are
/// left untouched.
template <typename Scalar>
void cb2o_step(ParticleEnsemble<Scalar>& ensemble, const VecRef<Scalar>& consensus, const StepConfig& step,
               std::uint64_t seed, std::uint64_t iteration, unsigned threads = 1)
{
    if (!consensus.allFinite()) throw InvalidArgument("consensus point must be finite");
    const Index d = ensemble.dimension();
    const Scalar drift = static_cast<Scalar>(step.lambda * step.gamma);
    const Scalar noise_scale = static_cast<Scalar>(step.sigma * std::sqrt(step.gamma));
    parallel_for(static_cast<std::size_t>(ensemble.count()), threads, [&](std::size_t i) {
        if (ensemble.roles[i] != Role::benign) return;
        auto row = ensemble.positions.row(static_cast<Index>(i));
        const Scalar spread = (row.transpose() - consensus).norm();
        auto stream = rng::make_stream(seed, {rng::diffusion, i, iteration});
        for (Index k = 0; k < d; ++k) {
            // std::lerp is exact at both ends: drift == 1 lands on m, theta == m stays put.
            const Scalar moved = std::lerp(row(k), consensus(k), drift);
            const Scalar xi = static_cast<Scalar>(stream.normal());
            row(k) = moved + noise_scale * spread * xi;
        }
    });
}

}  // namespace cb2o
