#include "cb2o/oracles.hpp"

#include "cb2o/fed/aggregation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace cb2o::oracle {

double brute_quantile(std::span<const double> losses, double a)
{
    if (losses.empty()) throw InvalidArgument("quantile of an empty loss vector");
    const double n = static_cast<double>(losses.size());
    double best = std::numeric_limits<double>::infinity();
    for (const double q : losses) {
        std::size_t below = 0;
        for (const double l : losses) below += l <= q;
        if (a <= static_cast<double>(below) / n) best = std::min(best, q);
    }
    return best;
}

double riemann_mean_quantile(std::span<const double> losses, double lo, double hi, std::size_t cells)
{
    std::vector<double> grid;
    for (std::size_t k = 0; k <= cells; ++k)
        grid.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells));
    const auto n = losses.size();
    for (std::size_t k = 1; k < n; ++k) {
        const double jump = static_cast<double>(k) / static_cast<double>(n);
        if (jump > lo && jump < hi) grid.push_back(jump);
    }
    std::sort(grid.begin(), grid.end());
    double acc = 0.0;
    double lowest = std::numeric_limits<double>::infinity(), highest = -lowest;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double width = grid[k + 1] - grid[k];
        if (width <= 0.0) continue;
        const double q = brute_quantile(losses, 0.5 * (grid[k] + grid[k + 1]));
        acc += q * width;
        lowest = std::min(lowest, q);
        highest = std::max(highest, q);
    }
    // An average never leaves the range of the averaged values.
    return std::clamp(acc / (hi - lo), lowest, highest);
}

double parts_mean_quantile(std::span<const double> losses, double lo, double hi)
{
    const double q_lo = brute_quantile(losses, lo);
    const double q_hi = brute_quantile(losses, hi);
    std::vector<double> xs(losses.begin(), losses.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    // F is constant between consecutive sorted values.
    double cdf_integral = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const double left = std::max(q_lo, xs[k]);
        const double right = std::min(q_hi, xs[k + 1]);
        if (right > left) cdf_integral += static_cast<double>(k + 1) / n * (right - left);
    }
    return (hi * q_hi - lo * q_lo - cdf_integral) / (hi - lo);
}

double brute_threshold(std::span<const double> losses, const ConsensusConfig& cfg)
{
    if (cfg.mode == QuantileMode::practical) return brute_quantile(losses, cfg.beta);
    return riemann_mean_quantile(losses, cfg.beta / 2.0, cfg.beta) + cfg.delta_q;
}

Vector naive_consensus(const Matrix& positions, std::span<const double> losses, std::span<const double> uppers,
                       const ConsensusConfig& cfg)
{
    const double threshold = brute_threshold(losses, cfg);
    const double radius = cfg.effective_radius();
    std::vector<Index> q;
    for (Index i = 0; i < positions.rows(); ++i) {
        double sq = 0.0;
        for (Index k = 0; k < positions.cols(); ++k) sq += positions(i, k) * positions(i, k);
        if (losses[static_cast<std::size_t>(i)] <= threshold && std::sqrt(sq) <= radius) q.push_back(i);
    }
    if (q.empty()) throw EmptySublevelSet();
    Vector m = Vector::Zero(positions.cols());
    for (const Index i : q) {
        double denom = 0.0;
        for (const Index j : q)
            denom += std::exp(-cfg.alpha * (uppers[static_cast<std::size_t>(j)] - uppers[static_cast<std::size_t>(i)]));
        const double w = 1.0 / denom;
        for (Index k = 0; k < positions.cols(); ++k) m(k) += w * positions(i, k);
    }
    return m;
}

Vector fd_gradient(const fed::LogisticModel& model, const VecRef<double>& theta, const fed::Dataset& data, double h)
{
    Vector g(theta.size());
    Vector probe = theta;
    for (Index k = 0; k < theta.size(); ++k) {
        probe(k) = theta(k) + h;
        const double up = model.loss(probe, data);
        probe(k) = theta(k) - h;
        const double down = model.loss(probe, data);
        probe(k) = theta(k);
        g(k) = (up - down) / (2.0 * h);
    }
    return g;
}

ConsensusFn production_consensus()
{
    return [](const Matrix& positions, std::span<const double> losses, std::span<const double> uppers,
              const ConsensusConfig& cfg) { return consensus_point<double>(positions, losses, uppers, cfg); };
}

namespace {

class Timer {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Check finish(std::string name, bool passed, const std::ostringstream& detail, const Timer& timer)
{
    return {std::move(name), passed, detail.str(), timer.seconds()};
}

double relative_gap(double value, double reference)
{
    return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

}  // namespace

Check consensus_check(const SuiteConfig& cfg)
{
    Timer timer;
    const auto fn = cfg.consensus ? cfg.consensus : production_consensus();
    auto rng = rng::make_stream(cfg.seed, {rng::probe, 1});
    double worst = 0.0;
    std::size_t mismatches = 0, empty_agree = 0;
    for (std::size_t t = 0; t < cfg.consensus_trials; ++t) {
        const Index n = 1 + static_cast<Index>(rng.below(20));
        const Index d = 1 + static_cast<Index>(rng.below(3));
        Matrix pos(n, d);
        std::vector<double> l(static_cast<std::size_t>(n)), g(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) {
            for (Index k = 0; k < d; ++k) pos(i, k) = rng.uniform(-5.0, 5.0);
            l[static_cast<std::size_t>(i)] = rng.uniform(0.0, 10.0);
            g[static_cast<std::size_t>(i)] = rng.uniform(-5.0, 5.0);
        }
        // Occasional exact ties in L exercise the weak inequality.
        if (n > 2 && rng.uniform() < 0.2) l[1] = l[0];
        ConsensusConfig cc;
        cc.alpha = rng.uniform(0.0, 100.0);
        cc.beta = std::max(1e-6, rng.uniform());
        if (rng.uniform() < 0.5) {
            cc.mode = QuantileMode::theoretical;
            cc.delta_q = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 1.0);
            cc.radius = rng.uniform() < 0.5 ? std::numeric_limits<double>::infinity() : rng.uniform(1.0, 8.0);
        }
        bool oracle_empty = false, prod_empty = false;
        Vector expect, got;
        try {
            expect = naive_consensus(pos, l, g, cc);
        } catch (const EmptySublevelSet&) {
            oracle_empty = true;
        }
        try {
            got = fn(pos, l, g, cc);
        } catch (const EmptySublevelSet&) {
            prod_empty = true;
        }
        if (oracle_empty || prod_empty) {
            if (oracle_empty == prod_empty) ++empty_agree;
            else ++mismatches;
            continue;
        }
        const double scale = std::max(1e-300, pos.cwiseAbs().maxCoeff());
        const double err = (got - expect).cwiseAbs().maxCoeff() / scale;
        worst = std::max(worst, std::isfinite(err) ? err : std::numeric_limits<double>::infinity());
        if (!(err <= 1e-12)) ++mismatches;
    }
    std::ostringstream os;
    os << cfg.consensus_trials << " ensembles, worst relative error " << worst << ", mismatches " << mismatches
       << ", agreeing empty sets " << empty_agree;
    return finish("consensus_oracle", mismatches == 0, os, timer);
}

Check quantile_check(const SuiteConfig& cfg)
{
    Timer timer;
    auto rng = rng::make_stream(cfg.seed, {rng::probe, 2});
    double worst = 0.0;
    std::size_t failures = 0;
    for (std::size_t t = 0; t < cfg.quantile_trials; ++t) {
        const auto n = 1 + static_cast<std::size_t>(rng.below(40));
        std::vector<double> l(n);
        // Integer-valued draws create ties.
        const bool ties = rng.uniform() < 0.3;
        for (auto& v : l) v = ties ? static_cast<double>(rng.below(5)) : rng.uniform(-10.0, 10.0);
        const double a = std::max(1e-9, rng.uniform());
        const double beta = std::max(1e-6, rng.uniform());
        const double dq = rng.uniform(0.0, 1.0);

        const double q = empirical_quantile<double>(l, a);
        const double q_ref = brute_quantile(l, a);
        const double q_err = relative_gap(q, q_ref);
        const double th = quantile_threshold<double>(l, beta, dq, QuantileMode::theoretical);
        const double th_grid = riemann_mean_quantile(l, beta / 2.0, beta, 256) + dq;
        const double th_parts = parts_mean_quantile(l, beta / 2.0, beta) + dq;
        const double err = std::max({q_err, relative_gap(th, th_grid), relative_gap(th, th_parts)});
        worst = std::max(worst, err);
        if (!(err <= 1e-10) || quantile_threshold<double>(l, beta, dq, QuantileMode::practical) != brute_quantile(l, beta))
            ++failures;
    }
    std::ostringstream os;
    os << cfg.quantile_trials << " loss vectors, worst relative error " << worst << ", failures " << failures;
    return finish("quantile_oracle", failures == 0, os, timer);
}

LaplaceCase random_laplace_case(rng::Stream& rng)
{
    const Index d = 2 + static_cast<Index>(rng.below(2));
    const Vector p = sample_direction(d, rng);
    LaplaceCase c{ring_problem(d, p), {}, {}, {}, {}};
    const auto& prob = c.problem;

    auto& lp = c.params;
    lp.r_G = rng.uniform(0.1, 0.5);
    auto& cc = c.consensus;
    cc.mode = QuantileMode::theoretical;
    cc.delta_q = rng.uniform(0.1, 1.0) * std::min(prob.constants.L_inf, lp.r_G * lp.r_G) / 2.0;
    cc.radius = rng.uniform() < 0.5 ? std::numeric_limits<double>::infinity() : rng.uniform(4.0, 10.0);
    cc.alpha = std::pow(10.0, rng.uniform(0.0, 3.0));
    lp.r = rng.uniform(0.2, 1.0) * std::min(lp.r_G, std::sqrt(cc.delta_q / prob.constants.H_L));
    lp.u = rng.uniform(0.05, 1.0) * (lp.r_G * lp.r_G - lp.r * lp.r);

    const Index n = 20 + static_cast<Index>(rng.below(181));
    const double w_m = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 0.3);
    const Index n_m = static_cast<Index>(std::floor(w_m * static_cast<double>(n)));
    const Index n_b = n - n_m;
    const Index n_in = std::max<Index>(1, static_cast<Index>(rng.uniform(0.05, 0.5) * static_cast<double>(n_b)));

    auto& ens = c.ensemble;
    ens.positions.resize(n, d);
    ens.roles.assign(static_cast<std::size_t>(n), Role::benign);
    auto near_ring = [&](double spread) {
        const Vector dir = sample_direction(d, rng);
        return Vector(dir * (1.0 + spread * rng.normal()));
    };
    auto in_box = [&] {
        Vector x(d);
        for (Index k = 0; k < d; ++k) x(k) = rng.uniform(-2.0, 2.0);
        return x;
    };
    for (Index i = 0; i < n_b; ++i) {
        Vector x;
        if (i < n_in) x = sample_ball(p, 0.999 * lp.r, rng);
        else if (rng.uniform() < 0.5) x = near_ring(0.05);
        else x = in_box();
        ens.positions.row(i) = x.transpose();
    }
    const int attack = static_cast<int>(rng.below(4));
    for (Index i = n_b; i < n; ++i) {
        ens.roles[static_cast<std::size_t>(i)] = Role::malicious;
        Vector x;
        switch (attack) {
        case 0: x = prob.worst_minimizer; break;
        case 1: x = sample_direction(d, rng); break;
        case 2: x = in_box(); break;
        default: x = sample_ball(p, 0.5, rng); break;
        }
        ens.positions.row(i) = x.transpose();
    }

    // Largest admissible beta: q_beta + delta_q must stay below L_bar + min{L_inf, r_G^2}.
    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) losses[static_cast<std::size_t>(i)] = prob.lower(ens.positions.row(i).transpose());
    const double limit = prob.L_bar + std::min(prob.constants.L_inf, lp.r_G * lp.r_G) - cc.delta_q;
    const auto admissible = std::count_if(losses.begin(), losses.end(), [&](double l) { return l <= limit; });
    cc.beta = std::min(0.999, rng.uniform(0.2, 1.0) * static_cast<double>(admissible) / static_cast<double>(n));

    c.result = laplace_bound_check(ens, prob, cc, lp);
    return c;
}

Check laplace_sweep_check(const SuiteConfig& cfg)
{
    Timer timer;
    auto rng = rng::make_stream(cfg.seed, {rng::probe, 3});
    std::size_t violations = 0, inapplicable = 0, attacked = 0;
    double max_ratio = 0.0, max_wm = 0.0;
    std::string first_reason;
    for (std::size_t t = 0; t < cfg.laplace_configs; ++t) {
        const auto c = random_laplace_case(rng);
        if (!c.result.applicable) {
            ++inapplicable;
            if (first_reason.empty()) first_reason = c.result.reason;
            continue;
        }
        if (c.ensemble.malicious_count() > 0) ++attacked;
        max_wm = std::max(max_wm, c.ensemble.malicious_weight());
        max_ratio = std::max(max_ratio, c.result.lhs / c.result.rhs);
        if (!c.result.holds) ++violations;
    }
    std::ostringstream os;
    os << cfg.laplace_configs << " configurations (" << attacked << " attacked, max w_m " << max_wm
       << "), violations " << violations << ", inapplicable " << inapplicable << ", max lhs/rhs " << max_ratio;
    if (!first_reason.empty()) os << ", first skip: " << first_reason;
    return finish("laplace_bound_sweep", violations == 0 && inapplicable == 0, os, timer);
}

Check coverage_check(const SuiteConfig& cfg)
{
    Timer timer;
    std::size_t failures = 0;
    for (std::size_t s = 0; s < cfg.coverage_seeds; ++s) {
        auto rng = rng::make_stream(cfg.seed + s, {rng::probe, 4});
        const std::size_t n_agents = 2 + static_cast<std::size_t>(rng.below(60));
        const std::size_t M = 1 + static_cast<std::size_t>(rng.below(n_agents - 1));
        const std::size_t rounds = (n_agents - 1 + M - 1) / M;
        std::vector<double> P(n_agents - 1, 0.0);
        std::set<std::size_t> seen;
        for (std::size_t r = 0; r < rounds; ++r) {
            const auto picks = fed::prob_sampling(P, M, rng);
            std::vector<double> losses;
            for (std::size_t k = 0; k < picks.size(); ++k) losses.push_back(rng.uniform(0.0, 5.0));
            fed::update_likelihood(P, picks, losses, 2.0, 0.5);
            seen.insert(picks.begin(), picks.end());
        }
        if (seen.size() != n_agents - 1) ++failures;
    }
    std::ostringstream os;
    os << cfg.coverage_seeds << " seeds, incomplete coverage in " << failures;
    return finish("prob_sampling_coverage", failures == 0, os, timer);
}

Check sampling_frequency_check(const SuiteConfig& cfg)
{
    Timer timer;
    auto rng = rng::make_stream(cfg.seed, {rng::probe, 5});
    const std::vector<double> P{3.0, 1.0};
    std::size_t hits = 0;
    for (std::size_t t = 0; t < cfg.sampling_trials; ++t) hits += fed::prob_sampling(P, 1, rng).front() == 0;
    const double freq = static_cast<double>(hits) / static_cast<double>(cfg.sampling_trials);
    std::ostringstream os;
    os << "P=[3,1], M=1: frequency of slot 0 = " << freq << " (expected 0.75 +- 0.01)";
    return finish("prob_sampling_frequency", std::abs(freq - 0.75) <= 0.01, os, timer);
}

Check gradient_check(const SuiteConfig& cfg)
{
    Timer timer;
    auto rng = rng::make_stream(cfg.seed, {rng::probe, 6});
    double worst = 0.0;
    std::size_t failures = 0;
    for (std::size_t t = 0; t < cfg.gradient_trials; ++t) {
        const fed::LogisticModel model{2 + static_cast<int>(rng.below(5)), 1 + static_cast<Index>(rng.below(6))};
        const Index batch = 1 + static_cast<Index>(rng.below(32));
        fed::Dataset data;
        data.features.resize(batch, model.feature_dim);
        data.labels.resize(static_cast<std::size_t>(batch));
        for (Index i = 0; i < batch; ++i) {
            for (Index k = 0; k < model.feature_dim; ++k) data.features(i, k) = 2.0 * rng.normal();
            data.labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(model.n_classes)));
        }
        Vector theta(model.parameter_count());
        for (Index k = 0; k < theta.size(); ++k) theta(k) = rng.normal();
        const Vector g = model.gradient(theta, data);
        const Vector fd = fd_gradient(model, theta, data);
        const double err = (g - fd).norm() / std::max(fd.norm(), 1e-12);
        worst = std::max(worst, err);
        if (!(err <= 1e-6)) ++failures;
    }
    std::ostringstream os;
    os << cfg.gradient_trials << " (theta, batch) pairs, worst relative error " << worst << ", failures " << failures;
    return finish("gradient_fd_oracle", failures == 0, os, timer);
}

Check probe_check(const SuiteConfig& cfg)
{
    Timer timer;
    std::size_t violations = 0;
    std::ostringstream os;
    for (const auto& [name, d] : std::vector<std::pair<std::string, Index>>{
             {"ring", 2}, {"ring", 3}, {"hyperplane", 2}, {"hyperplane", 3}}) {
        const auto prob = make_problem(name, d, {});
        auto rng = rng::make_stream(cfg.seed, {rng::probe, 7, static_cast<std::uint64_t>(d)});
        const auto report = probe_assumptions(prob, cfg.probe_samples, 3.0, rng);
        violations += report.total_violations();
        os << name << d << ":" << report.total_violations() << " ";
    }
    os << "violations at " << cfg.probe_samples << " samples per assumption";
    return finish("assumption_probes", violations == 0, os, timer);
}

std::vector<Check> run_suite(const SuiteConfig& cfg)
{
    return {consensus_check(cfg), quantile_check(cfg),   laplace_sweep_check(cfg),      coverage_check(cfg),
            sampling_frequency_check(cfg), gradient_check(cfg), probe_check(cfg)};
}

}  // namespace cb2o::oracle
