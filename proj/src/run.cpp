#include "cb2o/run.hpp"

#include "cb2o/parallel.hpp"
#include "cb2o/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cb2o {

void Cb2oRunConfig::validate(Index dimension) const
{
    consensus.validate();
    step.validate();
    if (n_particles < 1) throw InvalidArgument("n_particles must be >= 1");
    if (n_malicious < 0 || n_malicious >= n_particles) throw InvalidArgument("n_malicious must lie in [0, n_particles)");
    if (!(init_half_width > 0.0) || !std::isfinite(init_half_width))
        throw InvalidArgument("init half width must be positive and finite");
    if (init_center.size() != 0 && init_center.size() != dimension)
        throw InvalidArgument("init center must match the problem dimension");
    if (robust && !(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

RobustHyperparams robust_hyperparams(double base_alpha, double base_beta, double w_b, double w_m, double epsilon,
                                     double R_K_G)
{
    if (!(w_b > 0.0)) throw InvalidArgument("benign weight w_b must be positive");
    if (!(w_m >= 0.0)) throw InvalidArgument("malicious weight w_m must be >= 0");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (!(R_K_G > 0.0)) throw InvalidArgument("R_K_G must be positive");
    double increment = 0.0;
    if (w_m > 0.0) increment = std::max(0.0, std::log(w_m / w_b * R_K_G / std::sqrt(epsilon)));
    return {base_alpha + increment, base_beta * w_b};
}

RoundMetrics particle_metrics(const Ensemble& ensemble, const BiLevelProblem& problem, const VecRef<double>& consensus,
                              std::size_t round, std::size_t sublevel_size)
{
    const Matrix benign = ensemble.rows_of(Role::benign);
    RoundMetrics out;
    out.round = round;
    out.V_benign = lyapunov_value<double>(benign, problem.theta_good);
    out.dist_mean = (benign.colwise().mean().transpose() - problem.theta_good).norm();
    out.consensus_dist = (consensus - problem.theta_good).norm();
    out.sublevel_size = static_cast<double>(sublevel_size);
    return out;
}

Ensemble initialize_ensemble(const BiLevelProblem& problem, const AdversaryPolicy& adversary,
                             const Cb2oRunConfig& cfg)
{
    const Index d = problem.dimension;
    const Vector center = cfg.init_center.size() == 0 ? Vector::Zero(d) : cfg.init_center;
    const Index n = cfg.n_particles;
    const Index n_b = n - cfg.n_malicious;

    Ensemble ens;
    ens.positions.resize(n, d);
    ens.roles.assign(static_cast<std::size_t>(n), Role::benign);
    auto draw_box = [&](rng::Stream& stream) {
        Vector x(d);
        for (Index k = 0; k < d; ++k) x(k) = center(k) + stream.uniform(-cfg.init_half_width, cfg.init_half_width);
        return x;
    };
    for (Index i = 0; i < n; ++i) {
        if (i >= n_b) {
            ens.roles[static_cast<std::size_t>(i)] = Role::malicious;
            continue;
        }
        auto stream = rng::make_stream(cfg.seed, {rng::init_benign, static_cast<std::uint64_t>(i)});
        ens.positions.row(i) = draw_box(stream).transpose();
    }
    initialize_malicious(ens, adversary, [&](Index i) {
        auto stream = rng::make_stream(cfg.seed, {rng::init_malicious, static_cast<std::uint64_t>(i)});
        return draw_box(stream);
    });
    ens.validate();
    return ens;
}

namespace {

/// Best-loss particle inside B_R(0); used when the sublevel set is empty.
std::vector<Index> fallback_selection(const std::vector<double>& losses, const Matrix& positions, double radius)
{
    Index best = -1;
    for (Index i = 0; i < positions.rows(); ++i) {
        if (positions.row(i).norm() > radius) continue;
        if (best < 0 || losses[static_cast<std::size_t>(i)] < losses[static_cast<std::size_t>(best)]) best = i;
    }
    if (best < 0) throw EmptySublevelSet();
    return {best};
}

}  // namespace

Trajectory run_cb2o(const BiLevelProblem& problem, const AdversaryPolicy& adversary, const Cb2oRunConfig& cfg)
{
    const Index d = problem.dimension;
    cfg.validate(d);
    validate(adversary, d);

    Trajectory traj;
    traj.consensus = cfg.consensus;
    const double w_m = static_cast<double>(cfg.n_malicious) / static_cast<double>(cfg.n_particles);
    if (cfg.robust) {
        const auto adj =
            robust_hyperparams(cfg.consensus.alpha, cfg.consensus.beta, 1.0 - w_m, w_m, cfg.epsilon,
                               problem.constants.R_K_G);
        traj.consensus.alpha = adj.alpha;
        traj.consensus.beta = adj.beta;
    }
    const ConsensusConfig& ccfg = traj.consensus;
    traj.warnings = cfg.step.warnings(d);

    Ensemble ens = initialize_ensemble(problem, adversary, cfg);
    const auto n = static_cast<std::size_t>(ens.count());
    std::vector<double> losses(n), uppers(n);
    const std::vector<double>& weight_values = cfg.weights == WeightSource::upper ? uppers : losses;
    traj.rounds.reserve(cfg.n_iters + 1);

    Vector m;
    for (std::size_t t = 0;; ++t) {
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            const auto row = ens.positions.row(static_cast<Index>(i)).transpose();
            losses[i] = problem.lower(row);
            uppers[i] = problem.upper(row);
        });
        std::vector<Index> selected;
        try {
            selected = sublevel_indices<double>(losses, ens.positions, ccfg);
        } catch (const EmptySublevelSet&) {
            selected = fallback_selection(losses, ens.positions, ccfg.effective_radius());
            traj.fallback_rounds.push_back(t);
        }
        m = weighted_mean<double>(ens.positions, weight_values, selected, ccfg.alpha);
        if (!m.allFinite()) throw std::runtime_error("consensus point is not finite at round " + std::to_string(t));
        traj.rounds.push_back(particle_metrics(ens, problem, m, t, selected.size()));
        if (t == cfg.n_iters) break;

        cb2o_step<double>(ens, m, cfg.step, cfg.seed, t, cfg.threads);
        if (cfg.n_malicious > 0)
            adversary_step(ens, AdversaryContext{m, cfg.step.gamma, cfg.seed, t}, adversary);
    }
    traj.last_consensus = m;
    traj.final_ensemble = std::move(ens);
    return traj;
}

}  // namespace cb2o
