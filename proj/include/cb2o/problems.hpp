#pragma once

#include "cb2o/rng.hpp"
#include "cb2o/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cb2o {

/// Regularity constants of the lower (L) and upper (G) objectives.
struct AssumptionConstants {
    // Hoelder continuity of L near the target.
    double H_L = 1, h_L = 1, R_H_L = 1;
    // Inverse continuity of L and its far-field gap.
    double eta_L = 1, nu_L = 1, R_L = 1, L_inf = 1;
    // Hoelder continuity of G near the target.
    double H_G = 1, h_G = 1, R_H_G = 1;
    // Inverse continuity of G and its far-field gap.
    double eta_G = 1, nu_G = 1, R_G = 1, G_inf = 1;
    // Growth of G away from the target inside a neighborhood of the minimizers.
    double K_G = 1, k_G = 1, R_K_G = 1;

    void validate() const;
};

struct Singleton {
    Vector point;
};
struct Sphere {
    Vector center;
    double radius;
};
struct Hyperplane {
    Vector normal;
    double offset;
};
using MinimizerSet = std::variant<Singleton, Sphere, Hyperplane>;

double distance_to(const VecRef<double>& theta, const MinimizerSet& set);

using Objective = std::function<double(const VecRef<double>&)>;

struct BiLevelProblem {
    std::string name;
    Index dimension = 0;
    Objective lower;
    Objective upper;
    Vector theta_good;
    MinimizerSet minimizers;
    AssumptionConstants constants;
    double L_bar = 0.0;

    /// Another analytically known point of the minimizer set (uniqueness probe).
    Vector second_minimizer;
    /// A point of the minimizer set with maximal upper-level value; the
    /// natural decoy for attacks.
    Vector worst_minimizer;

    /// True when the inverse-continuity statement for G holds around
    /// theta_good itself for every radius (no shifted reference point needed).
    bool reference_is_target = false;
    /// Exact sup of G - G(theta_good) over the closed ball B_r(theta_good).
    std::function<double(double r)> upper_ball_sup;
    /// Exact inf of G - G(theta_good) over N_{r_G}(minimizers) \ B_{r_G}(theta_good).
    std::function<double(double r_G)> upper_gap_outside;

    double lower_gap(const VecRef<double>& theta) const { return lower(theta) - L_bar; }
    double upper_gap(const VecRef<double>& theta) const { return upper(theta) - upper(theta_good); }
    double distance_to_minimizers(const VecRef<double>& theta) const { return distance_to(theta, minimizers); }
};

/// L = (|theta|^2 - 1)^2 with minimizers on the unit sphere, G = |theta - p|^2.
BiLevelProblem ring_problem(Index dimension, const VecRef<double>& p);
BiLevelProblem ring_problem(Index dimension);

/// L = theta_1^2 with minimizers {theta_1 = 0}, G = |theta - p|^2 (p_1 = 0).
BiLevelProblem hyperplane_problem(Index dimension, const VecRef<double>& p);
BiLevelProblem hyperplane_problem(Index dimension);

/// Looks a problem up by name ("ring" or "hyperplane"). An empty point picks
/// the default target.
BiLevelProblem make_problem(const std::string& name, Index dimension, const std::vector<double>& point);

struct ProbeResult {
    std::string assumption;
    std::size_t samples = 0;
    std::size_t violations = 0;
    /// min over samples of (allowed - observed); negative means violated.
    double worst_margin = 0.0;
};

struct ProbeReport {
    std::vector<ProbeResult> results;
    std::size_t total_violations() const;
    const ProbeResult& at(const std::string& assumption) const;
};

/// Samples each assumption's region and checks the stored constants.
/// `radius` bounds the sampling region around theta_good for the far-field
/// checks.
ProbeReport probe_assumptions(const BiLevelProblem& problem, std::size_t n_samples, double radius,
                              rng::Stream& rng);

/// Uniform sample from the closed ball B_r(center).
Vector sample_ball(const VecRef<double>& center, double r, rng::Stream& rng);

/// Uniform direction on the unit sphere.
Vector sample_direction(Index dimension, rng::Stream& rng);

}  // namespace cb2o
