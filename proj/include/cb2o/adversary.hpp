#pragma once

#include "cb2o/ensemble.hpp"
#include "cb2o/rng.hpp"
#include "cb2o/types.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace cb2o {

namespace policy {
struct None {};
struct RandomNoise {
    double scale;
};
struct FixedDecoy {
    Vector point;
};
struct DriftToDecoy {
    Vector point;
    double rate;
};
struct MimicOffset {
    Vector offset;
};
}  // namespace policy

/// Behavior of malicious particles: arbitrary drift and diffusion chosen by
/// the attacker, never following the consensus protocol.
using AdversaryPolicy =
    std::variant<policy::None, policy::RandomNoise, policy::FixedDecoy, policy::DriftToDecoy, policy::MimicOffset>;

void validate(const AdversaryPolicy& policy, Index dimension);
std::string policy_name(const AdversaryPolicy& policy);

/// Public information available to attackers in a round.
struct AdversaryContext {
    Vector consensus;  // published consensus point
    double gamma = 0.01;
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
};

/// Moves the malicious rows of `ensemble` according to `policy`. Benign rows
/// are neither read nor written.
void adversary_step(Ensemble& ensemble, const AdversaryContext& context, const AdversaryPolicy& policy);

/// Positions for the malicious particles at initialization: decoy-style
/// policies start on their decoy, others draw from `fallback_init`.
template <typename Init>
void initialize_malicious(Ensemble& ensemble, const AdversaryPolicy& policy, Init&& fallback_init)
{
    for (Index i = 0; i < ensemble.count(); ++i) {
        if (ensemble.roles[static_cast<std::size_t>(i)] != Role::malicious) continue;
        if (const auto* decoy = std::get_if<policy::FixedDecoy>(&policy)) {
            ensemble.positions.row(i) = decoy->point.transpose();
        } else {
            ensemble.positions.row(i) = fallback_init(i).transpose();
        }
    }
}

}  // namespace cb2o
