#include "cb2o/metrics.hpp"

#include "cb2o/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cb2o {

DecayFit fit_decay_rate(std::span<const double> values, std::size_t burn_in, double dt)
{
    std::vector<double> t, y;
    for (std::size_t i = burn_in; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) break;
        t.push_back(static_cast<double>(i) * dt);
        y.push_back(std::log(values[i]));
    }
    if (t.size() < 10) throw InvalidArgument("decay fit needs at least 10 positive points after burn-in");

    const double n = static_cast<double>(t.size());
    const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - t_mean) * (t[i] - t_mean);
        sty += (t[i] - t_mean) * (y[i] - y_mean);
        syy += (y[i] - y_mean) * (y[i] - y_mean);
    }
    DecayFit fit;
    fit.points = t.size();
    fit.slope = sty / stt;
    fit.intercept = y_mean - fit.slope * t_mean;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * t[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

double upper_ball_sup(const BiLevelProblem& problem, double r, std::size_t samples)
{
    if (problem.upper_ball_sup) return problem.upper_ball_sup(r);
    auto stream = rng::make_stream(0x5eed, {rng::probe, static_cast<std::uint64_t>(samples)});
    double sup = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        // Half the samples on the boundary sphere, where a sup is typically attained.
        const Vector theta = k % 2 == 0 ? Vector(problem.theta_good + r * sample_direction(problem.dimension, stream))
                                        : sample_ball(problem.theta_good, r, stream);
        sup = std::max(sup, problem.upper_gap(theta));
    }
    return sup;
}

namespace {

LaplaceBoundResult inapplicable(std::string why)
{
    LaplaceBoundResult out;
    out.applicable = false;
    out.reason = std::move(why);
    return out;
}

}  // namespace

LaplaceBoundResult laplace_bound_check(const Ensemble& ensemble, const BiLevelProblem& problem,
                                       const ConsensusConfig& cfg, const LaplaceBoundParams& params)
{
    const auto& c = problem.constants;
    const Vector& target = problem.theta_good;
    const double r = params.r;
    const double r_G = params.r_G;
    const double u = params.u;
    const double delta_q = cfg.effective_delta_q();

    if (cfg.mode != QuantileMode::theoretical) return inapplicable("requires the theoretical quantile mode");
    if (!(delta_q > 0.0)) return inapplicable("requires delta_q > 0");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) return inapplicable("requires beta in (0,1)");
    if (ensemble.benign_count() == 0) return inapplicable("no benign particles");

    // G(tilde_theta) - G(theta_good); bounded by H_G r_G^h_G in general and
    // zero when the reference point is the target itself.
    const double reference_slack = problem.reference_is_target ? 0.0 : c.H_G * std::pow(r_G, c.h_G);
    const double gap_far = problem.upper_gap_outside ? problem.upper_gap_outside(r_G) : c.G_inf;
    const double upper_cap = std::min(gap_far, std::pow(c.eta_G * c.R_K_G, 1.0 / c.nu_G));

    if (!(r_G > 0.0) || r_G > std::min({c.R_G, c.R_H_G, c.R_K_G}))
        return inapplicable("r_G outside (0, min{R_G, R_H_G, R_K_G}]");
    if (2.0 * reference_slack > upper_cap) return inapplicable("r_G too large for the Hoelder slack of G");
    const double lower_cap = std::min(c.L_inf, std::pow(c.eta_L * r_G, 1.0 / c.nu_L));
    if (delta_q > lower_cap / 2.0) return inapplicable("delta_q exceeds min{L_inf, (eta_L r_G)^(1/nu_L)}/2");

    const double r_R = params.r_R.value_or(cfg.effective_radius());
    const double r_max = std::min({r_R, r_G, c.R_H_L, std::pow(delta_q / c.H_L, 1.0 / c.h_L)});
    if (!(r > 0.0) || r > r_max) return inapplicable("r outside (0, min{r_R, r_G, R_H_L, (delta_q/H_L)^(1/h_L)}]");

    const double G_r = upper_ball_sup(problem, r);
    if (!(u > 0.0) || u + G_r + reference_slack > upper_cap)
        return inapplicable("u + G_r exceeds the admissible upper-level gap");

    const Index n = ensemble.count();
    std::vector<double> losses(static_cast<std::size_t>(n)), uppers(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const auto row = ensemble.positions.row(i).transpose();
        losses[static_cast<std::size_t>(i)] = problem.lower(row);
        uppers[static_cast<std::size_t>(i)] = problem.upper(row);
    }
    const double q_beta = empirical_quantile<double>(losses, cfg.beta);
    if (q_beta + delta_q > problem.L_bar + lower_cap)
        return inapplicable("beta too large: q_beta + delta_q exceeds L_bar + min{L_inf, (eta_L r_G)^(1/nu_L)}");

    const double n_b = static_cast<double>(ensemble.benign_count());
    const double n_m = static_cast<double>(ensemble.malicious_count());
    double in_ball = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (ensemble.roles[static_cast<std::size_t>(i)] != Role::benign) continue;
        if ((ensemble.positions.row(i).transpose() - target).norm() <= r) in_ball += 1.0;
    }
    const double mass = in_ball / n_b;
    if (mass == 0.0) return inapplicable("no benign mass in B_r(theta_good)");

    std::vector<Index> selected;
    try {
        selected = sublevel_indices<double>(losses, ensemble.positions, cfg);
    } catch (const EmptySublevelSet&) {
        return inapplicable("empty sublevel set");
    }
    const Vector m = weighted_mean<double>(ensemble.positions, uppers, selected, cfg.alpha);

    const double w_b = ensemble.benign_weight();
    const double w_m = ensemble.malicious_weight();
    const double alpha = cfg.alpha;
    double benign_int = 0.0, inner_int = 0.0, outer_int = 0.0;
    for (const Index i : selected) {
        const double dist = (ensemble.positions.row(i).transpose() - target).norm();
        if (ensemble.roles[static_cast<std::size_t>(i)] == Role::benign) {
            benign_int += dist / n_b;
        } else if (dist < c.R_K_G) {
            inner_int += dist / n_m;
        } else {
            // e^{alpha G_r} folded into the exponent to avoid overflow.
            outer_int += dist * std::exp(alpha * G_r - alpha * c.K_G * std::pow(dist, c.k_G)) / n_m;
        }
    }

    LaplaceBoundResult out;
    out.applicable = true;
    out.G_r = G_r;
    out.benign_mass_in_ball = mass;
    out.lhs = (m - target).norm();
    out.terms[0] = std::pow(u + G_r + c.H_G * std::pow(r_G, c.h_G), c.nu_G) / c.eta_G;
    out.terms[1] = std::exp(-alpha * u) / mass * benign_int;
    out.terms[2] = w_m > 0.0 ? w_m * std::exp(-alpha * u) / (w_b * mass) * inner_int : 0.0;
    out.terms[3] = w_m > 0.0 ? w_m / (w_b * mass) * outer_int : 0.0;
    out.rhs = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
    out.holds = out.lhs <= out.rhs;
    return out;
}

}  // namespace cb2o
