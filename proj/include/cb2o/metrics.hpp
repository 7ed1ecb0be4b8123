#pragma once

#include "cb2o/consensus.hpp"
#include "cb2o/ensemble.hpp"
#include "cb2o/problems.hpp"
#include "cb2o/types.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cb2o {

/// Per-round record. Federated runs fill the `fl` block; particle runs leave
/// it empty.
struct RoundMetrics {
    struct Federated {
        double overall_acc_mean = 0.0;
        double source_acc_mean = 0.0;
        double asr_mean = 0.0;
        std::vector<double> overall_acc;
        std::vector<double> source_acc;
        std::vector<double> asr;
        // same/other cluster x benign/malicious, averaged over benign selectors
        std::array<double, 4> selection{};
        std::array<double, 4> weight_mass{};
    };

    std::size_t round = 0;
    double V_benign = 0.0;
    double dist_mean = 0.0;
    double consensus_dist = 0.0;
    double sublevel_size = 0.0;
    std::optional<Federated> fl;
};

/// W2 distance between the empirical measure of `positions` and a Dirac.
template <typename Scalar>
Scalar w2_to_dirac(const MatRef<Scalar>& positions, const VecRef<Scalar>& target)
{
    if (positions.rows() == 0) throw InvalidArgument("w2_to_dirac of an empty set");
    const Scalar mean_sq = (positions.rowwise() - target.transpose()).rowwise().squaredNorm().mean();
    return std::sqrt(mean_sq);
}

/// Half the mean squared distance to `target`.
template <typename Scalar>
Scalar lyapunov_value(const MatRef<Scalar>& positions, const VecRef<Scalar>& target)
{
    return Scalar(0.5) * (positions.rowwise() - target.transpose()).rowwise().squaredNorm().mean();
}

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of log V against time (index * dt) after `burn_in`.
/// The series is cut at its first nonpositive value.
DecayFit fit_decay_rate(std::span<const double> values, std::size_t burn_in, double dt = 1.0);

struct LaplaceBoundParams {
    double r = 0.05;
    double r_G = 0.3;
    double u = 0.01;
    /// Radius limit r_R on r. Defaults to the consensus ball radius.
    std::optional<double> r_R;
};

struct LaplaceBoundResult {
    bool applicable = false;
    std::string reason;  // why the check was skipped
    double lhs = 0.0;
    double rhs = 0.0;
    std::array<double, 4> terms{};
    double benign_mass_in_ball = 0.0;
    double G_r = 0.0;
    bool holds = false;
};

/// Evaluates both sides of the robust quantiled Laplace bound
///   |m - theta_good| <= (u + G_r + H_G r_G^h_G)^nu_G / eta_G
///       + e^{-alpha u} / rho_b(B_r) * int_Q |theta - theta_good| d rho_b
///       + w_m e^{-alpha u} / (w_b rho_b(B_r)) * int_{Q cap B_RK} |.| d rho_m
///       + w_m e^{alpha G_r} / (w_b rho_b(B_r)) * int_{Q \ B_RK} |.| e^{-alpha K_G |.|^k_G} d rho_m
/// with integrals taken exactly over the atoms. Returns an inapplicable
/// result when the admissibility conditions fail.
LaplaceBoundResult laplace_bound_check(const Ensemble& ensemble, const BiLevelProblem& problem,
                                       const ConsensusConfig& cfg, const LaplaceBoundParams& params);

/// sup over B_r(theta_good) of G - G(theta_good): closed form when the
/// problem provides one, otherwise dense sampling.
double upper_ball_sup(const BiLevelProblem& problem, double r, std::size_t samples = 10000);

}  // namespace cb2o
