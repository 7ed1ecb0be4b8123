#include "cb2o/problems.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cb2o {

void AssumptionConstants::validate() const
{
    for (double c : {H_L, h_L, R_H_L, eta_L, nu_L, R_L, L_inf, H_G, h_G, R_H_G, eta_G, nu_G, R_G, G_inf, K_G, k_G,
                     R_K_G}) {
        if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("assumption constants must be positive and finite");
    }
}

double distance_to(const VecRef<double>& theta, const MinimizerSet& set)
{
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Singleton>) {
                return (theta - s.point).norm();
            } else if constexpr (std::is_same_v<T, Sphere>) {
                return std::abs((theta - s.center).norm() - s.radius);
            } else {
                return std::abs(s.normal.dot(theta) - s.offset) / s.normal.norm();
            }
        },
        set);
}

namespace {

Vector unit(Index d, Index k)
{
    Vector v = Vector::Zero(d);
    v(k) = 1.0;
    return v;
}

double squared_distance(const VecRef<double>& a, const Vector& b) { return (a - b).squaredNorm(); }

}  // namespace

BiLevelProblem ring_problem(Index dimension, const VecRef<double>& p)
{
    if (dimension < 2) throw InvalidArgument("ring problem needs dimension >= 2");
    if (p.size() != dimension) throw InvalidArgument("ring target has the wrong dimension");
    if (std::abs(p.norm() - 1.0) > 1e-12) throw InvalidArgument("ring target must lie on the unit sphere");

    BiLevelProblem prob;
    prob.name = "ring";
    prob.dimension = dimension;
    prob.theta_good = p;
    prob.lower = [](const VecRef<double>& t) {
        const double s = t.squaredNorm() - 1.0;
        return s * s;
    };
    const Vector target = p;
    prob.upper = [target](const VecRef<double>& t) { return squared_distance(t, target); };
    prob.minimizers = Sphere{Vector::Zero(dimension), 1.0};
    prob.L_bar = 0.0;
    prob.second_minimizer = -p;
    prob.worst_minimizer = -p;

    // With s = |theta|, t = |theta - p|: |s - 1| <= t and s + 1 <= 3 on B_1(p),
    // so L = (s-1)^2 (s+1)^2 <= 9 t^2.
    // dist(theta, sphere) = |s - 1| <= |s - 1|(s + 1) = sqrt(L).
    // Outside N_{1/2}(sphere), L >= (1 - 1/4)^2 = 0.5625.
    // G - G(p) = t^2, so G is its own Hoelder bound, inverse-continuous with
    // exponent 1/2, and grows quadratically everywhere.
    AssumptionConstants c;
    c.H_L = 9.0;  c.h_L = 2.0;  c.R_H_L = 1.0;
    c.eta_L = 1.0; c.nu_L = 0.5; c.R_L = 0.5; c.L_inf = 0.56;
    c.H_G = 1.0;  c.h_G = 2.0;  c.R_H_G = 1.0;
    c.eta_G = 1.0; c.nu_G = 0.5; c.R_G = 0.5; c.G_inf = 0.24;
    c.K_G = 1.0;  c.k_G = 2.0;  c.R_K_G = 2.0;
    prob.constants = c;

    prob.reference_is_target = true;
    prob.upper_ball_sup = [](double r) { return r * r; };
    prob.upper_gap_outside = [](double r_G) { return r_G * r_G; };
    return prob;
}

BiLevelProblem ring_problem(Index dimension) { return ring_problem(dimension, unit(dimension, 0)); }

BiLevelProblem hyperplane_problem(Index dimension, const VecRef<double>& p)
{
    if (dimension < 1) throw InvalidArgument("hyperplane problem needs dimension >= 1");
    if (p.size() != dimension) throw InvalidArgument("hyperplane target has the wrong dimension");
    if (p(0) != 0.0) throw InvalidArgument("hyperplane target must have a zero first coordinate");

    BiLevelProblem prob;
    prob.name = "hyperplane";
    prob.dimension = dimension;
    prob.theta_good = p;
    prob.lower = [](const VecRef<double>& t) { return t(0) * t(0); };
    const Vector target = p;
    prob.upper = [target](const VecRef<double>& t) { return squared_distance(t, target); };
    prob.minimizers = Hyperplane{unit(dimension, 0), 0.0};
    prob.L_bar = 0.0;
    if (dimension >= 2) {
        prob.second_minimizer = p + unit(dimension, 1);
        prob.worst_minimizer = p + 2.0 * unit(dimension, 1);
    } else {
        prob.second_minimizer = p;
        prob.worst_minimizer = p;
    }

    // dist(theta, plane) = |theta_1| = L^(1/2) and L <= |theta - p|^2.
    AssumptionConstants c;
    c.H_L = 1.0;  c.h_L = 2.0;  c.R_H_L = 1.0;
    c.eta_L = 1.0; c.nu_L = 0.5; c.R_L = 1.0; c.L_inf = 0.99;
    c.H_G = 1.0;  c.h_G = 2.0;  c.R_H_G = 1.0;
    c.eta_G = 1.0; c.nu_G = 0.5; c.R_G = 0.5; c.G_inf = 0.24;
    c.K_G = 1.0;  c.k_G = 2.0;  c.R_K_G = 2.0;
    prob.constants = c;

    prob.reference_is_target = true;
    prob.upper_ball_sup = [](double r) { return r * r; };
    prob.upper_gap_outside = [](double r_G) { return r_G * r_G; };
    return prob;
}

BiLevelProblem hyperplane_problem(Index dimension)
{
    if (dimension < 2) return hyperplane_problem(dimension, Vector::Zero(dimension));
    return hyperplane_problem(dimension, unit(dimension, dimension - 1));
}

BiLevelProblem make_problem(const std::string& name, Index dimension, const std::vector<double>& point)
{
    const bool use_default = point.empty();
    Vector p;
    if (!use_default) {
        if (static_cast<Index>(point.size()) != dimension)
            throw InvalidArgument("problem.point has " + std::to_string(point.size()) + " entries, expected " +
                                  std::to_string(dimension));
        p = Eigen::Map<const Vector>(point.data(), dimension);
    }
    if (name == "ring") return use_default ? ring_problem(dimension) : ring_problem(dimension, p);
    if (name == "hyperplane") return use_default ? hyperplane_problem(dimension) : hyperplane_problem(dimension, p);
    throw InvalidArgument("unknown problem '" + name + "'");
}

Vector sample_direction(Index dimension, rng::Stream& rng)
{
    Vector v(dimension);
    do {
        for (Index k = 0; k < dimension; ++k) v(k) = rng.normal();
    } while (v.norm() == 0.0);
    return v / v.norm();
}

Vector sample_ball(const VecRef<double>& center, double r, rng::Stream& rng)
{
    const Index d = center.size();
    const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    return center + radius * sample_direction(d, rng);
}

namespace {

/// Uniform-ish sample of the tube {dist(theta, minimizers) < width} localized
/// within `reach` of `anchor`.
Vector sample_tube(const BiLevelProblem& prob, double width, double reach, rng::Stream& rng)
{
    const Index d = prob.dimension;
    return std::visit(
        [&](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Singleton>) {
                return sample_ball(s.point, width, rng);
            } else if constexpr (std::is_same_v<T, Sphere>) {
                const double radial = std::max(0.0, s.radius + rng.uniform(-width, width));
                return s.center + radial * sample_direction(d, rng);
            } else {
                const Vector n = s.normal / s.normal.norm();
                Vector base = sample_ball(prob.theta_good, reach, rng);
                base -= (n.dot(base) - s.offset / s.normal.norm()) * n;
                return base + rng.uniform(-width, width) * n;
            }
        },
        prob.minimizers);
}

constexpr double kRelTol = 1e-12;

class Tally {
public:
    explicit Tally(std::string name) { result_.assumption = std::move(name); result_.worst_margin = std::numeric_limits<double>::infinity(); }

    /// Records observed <= allowed (or observed < allowed when strict).
    void check(double observed, double allowed, bool strict = false)
    {
        ++result_.samples;
        const double margin = allowed - observed;
        result_.worst_margin = std::min(result_.worst_margin, margin);
        const double tol = kRelTol * (1.0 + std::abs(observed) + std::abs(allowed));
        const bool ok = strict ? margin > 0.0 : margin >= -tol;
        if (!ok) ++result_.violations;
    }

    ProbeResult finish()
    {
        if (result_.samples == 0) result_.worst_margin = 0.0;
        return result_;
    }

private:
    ProbeResult result_;
};

}  // namespace

std::size_t ProbeReport::total_violations() const
{
    std::size_t n = 0;
    for (const auto& r : results) n += r.violations;
    return n;
}

const ProbeResult& ProbeReport::at(const std::string& assumption) const
{
    for (const auto& r : results)
        if (r.assumption == assumption) return r;
    throw InvalidArgument("no probe named " + assumption);
}

ProbeReport probe_assumptions(const BiLevelProblem& prob, std::size_t n_samples, double radius, rng::Stream& rng)
{
    const auto& c = prob.constants;
    const Vector& target = prob.theta_good;
    const std::size_t max_attempts = 200 * std::max<std::size_t>(n_samples, 1);
    ProbeReport report;

    // Draws until `n_samples` points satisfy `accept` or attempts run out.
    auto sweep = [&](Tally& tally, auto&& draw, auto&& accept, auto&& check) {
        std::size_t accepted = 0;
        for (std::size_t attempt = 0; attempt < max_attempts && accepted < n_samples; ++attempt) {
            const Vector theta = draw();
            if (!accept(theta)) continue;
            ++accepted;
            check(tally, theta);
        }
    };
    auto dist_target = [&](const Vector& t) { return (t - target).norm(); };

    {
        Tally t("A2");
        sweep(
            t, [&] { return sample_ball(target, c.R_H_L, rng); }, [](const Vector&) { return true; },
            [&](Tally& tl, const Vector& th) {
                tl.check(prob.lower_gap(th), c.H_L * std::pow(dist_target(th), c.h_L));
            });
        report.results.push_back(t.finish());
    }
    {
        Tally t("A3.inverse");
        sweep(
            t, [&] { return sample_tube(prob, c.R_L, radius, rng); },
            [&](const Vector& th) { return prob.distance_to_minimizers(th) < c.R_L; },
            [&](Tally& tl, const Vector& th) {
                tl.check(prob.distance_to_minimizers(th), std::pow(prob.lower_gap(th), c.nu_L) / c.eta_L);
            });
        report.results.push_back(t.finish());
    }
    {
        Tally t("A3.farfield");
        sweep(
            t, [&] { return sample_ball(target, radius, rng); },
            [&](const Vector& th) { return prob.distance_to_minimizers(th) >= c.R_L; },
            [&](Tally& tl, const Vector& th) {
                // L - L_bar > L_inf, recorded as L_inf < L - L_bar.
                tl.check(c.L_inf, prob.lower_gap(th), true);
            });
        report.results.push_back(t.finish());
    }
    {
        Tally t("A4");
        sweep(
            t, [&] { return sample_ball(target, c.R_H_G, rng); }, [](const Vector&) { return true; },
            [&](Tally& tl, const Vector& th) {
                tl.check(prob.upper_gap(th), c.H_G * std::pow(dist_target(th), c.h_G));
            });
        report.results.push_back(t.finish());
    }
    {
        Tally t("A5.inverse");
        sweep(
            t, [&] { return sample_ball(target, c.R_G, rng); }, [](const Vector&) { return true; },
            [&](Tally& tl, const Vector& th) {
                tl.check(dist_target(th), std::pow(prob.upper_gap(th), c.nu_G) / c.eta_G);
            });
        report.results.push_back(t.finish());
    }
    {
        Tally t("A5.farfield");
        sweep(
            t, [&] { return sample_tube(prob, c.R_G, radius, rng); },
            [&](const Vector& th) {
                return prob.distance_to_minimizers(th) < c.R_G && dist_target(th) >= c.R_G;
            },
            [&](Tally& tl, const Vector& th) { tl.check(c.G_inf, prob.upper_gap(th), true); });
        report.results.push_back(t.finish());
    }
    {
        Tally t("A6");
        sweep(
            t, [&] { return sample_tube(prob, c.R_G, radius, rng); },
            [&](const Vector& th) {
                return prob.distance_to_minimizers(th) < c.R_G && dist_target(th) >= c.R_K_G;
            },
            [&](Tally& tl, const Vector& th) {
                tl.check(c.K_G * std::pow(dist_target(th), c.k_G), prob.upper_gap(th));
            });
        report.results.push_back(t.finish());
    }
    return report;
}

}  // namespace cb2o
