#include "cb2o/fed/federation.hpp"

#include "cb2o/parallel.hpp"
#include "cb2o/rng.hpp"

#include <cmath>
#include <limits>

namespace cb2o::fed {

void FedConfig::validate() const
{
    if (clusters < 1) throw InvalidArgument("fed.clusters must be >= 1");
    if (benign_per_cluster < 1) throw InvalidArgument("fed.benign_per_cluster must be >= 1");
    if (malicious_per_cluster < 0) throw InvalidArgument("fed.malicious_per_cluster must be >= 0");
    if (agents() < 2) throw InvalidArgument("federation needs at least two agents");
    if (M < 1 || M >= agents()) throw InvalidArgument("fed.M must lie in [1, N)");
    if (tau < 0) throw InvalidArgument("fed.tau must be >= 0");
    if (!(zeta >= 0.0 && zeta <= 1.0)) throw InvalidArgument("fed.zeta must lie in [0, 1]");
    if (T_G > T) throw InvalidArgument("fed.T_G must lie in [0, T]");
    if (!(gamma > 0.0)) throw InvalidArgument("fed.gamma must be positive");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw InvalidArgument("fed.lambda1 and fed.lambda2 must be >= 0");
    if (!(alpha >= 0.0) || !(kappa >= 0.0)) throw InvalidArgument("fed.alpha and fed.kappa must be >= 0");
    if (batch_size < 1) throw InvalidArgument("fed.batch_size must be >= 1");
    if (!(init_scale >= 0.0)) throw InvalidArgument("fed.init_scale must be >= 0");
}

Roster make_roster(const FedConfig& cfg)
{
    Roster r;
    for (int k = 0; k < cfg.clusters; ++k) {
        for (int i = 0; i < cfg.benign_per_cluster; ++i) r.agents.push_back({k, Role::benign});
        for (int i = 0; i < cfg.malicious_per_cluster; ++i) r.agents.push_back({k, Role::malicious});
    }
    return r;
}

Evaluation evaluate(const LogisticModel& model, const VecRef<double>& theta, const Dataset& test, int c_source,
                    int c_target)
{
    if (test.size() == 0) throw InvalidArgument("evaluation on an empty test set");
    const auto pred = model.predict(theta, test.features);
    std::size_t correct = 0, source = 0, source_correct = 0, flipped = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int y = test.labels[i];
        correct += pred[i] == y;
        if (y != c_source) continue;
        ++source;
        source_correct += pred[i] == y;
        flipped += pred[i] == c_target;
    }
    Evaluation e;
    e.overall = 100.0 * static_cast<double>(correct) / static_cast<double>(pred.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    e.source = source ? 100.0 * static_cast<double>(source_correct) / static_cast<double>(source) : nan;
    e.asr = source ? 100.0 * static_cast<double>(flipped) / static_cast<double>(source) : nan;
    return e;
}

namespace {

struct AgentState {
    Vector theta;
    std::vector<double> likelihood;  // over the other agents, in id order
    Dataset train;
    const Dataset* validation = nullptr;
    double sample_count = 0.0;
};

/// Maps agent j's opaque slot to a peer id: peers in id order, self skipped.
std::size_t peer_of(std::size_t j, std::size_t slot) { return slot < j ? slot : slot + 1; }

int category(const AgentSlot& me, const AgentSlot& peer)
{
    const bool same = me.cluster == peer.cluster;
    const bool bad = peer.role == Role::malicious;
    return same ? (bad ? same_malicious : same_benign) : (bad ? other_malicious : other_benign);
}

}  // namespace

FedResult run_federation(const FedConfig& cfg, const SyntheticDatasetSpec& spec, std::uint64_t seed)
{
    cfg.validate();
    spec.validate();
    if (spec.n_clusters() != cfg.clusters) throw InvalidArgument("one rotation per cluster required");

    FedResult res;
    res.roster = make_roster(cfg);
    const auto& roster = res.roster.agents;
    const std::size_t N = roster.size();
    const ClusteredData data = generate_clustered_data(spec, roster, seed);
    const LogisticModel model{spec.n_classes, spec.feature_dim};
    const Index P = model.parameter_count();
    const auto agg_cfg = cfg.aggregation();
    const auto local_cfg = cfg.local();

    std::vector<AgentState> agents(N);
    std::vector<std::size_t> benign_ids;
    for (std::size_t j = 0; j < N; ++j) {
        auto& a = agents[j];
        auto stream = rng::make_stream(seed, {rng::fed_init, j});
        a.theta.resize(P);
        for (Index k = 0; k < P; ++k) a.theta(k) = cfg.init_scale * stream.normal();
        a.likelihood.assign(N - 1, 0.0);
        if (roster[j].role == Role::benign) {
            a.train = data.agents[j].train;
            a.validation = &data.agents[j].validation;
            benign_ids.push_back(j);
        } else {
            a.train = poison_labels(data.agents[j].train, spec.source_class, spec.target_class);
        }
        a.sample_count = static_cast<double>(a.train.size());
    }

    res.selection_counts = Matrix::Zero(static_cast<Index>(N), static_cast<Index>(N));
    res.weight_mass = Matrix::Zero(static_cast<Index>(N), static_cast<Index>(N));
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::array<double, 4>> round_selection(N), round_weight(N);
    std::vector<std::size_t> round_downloads(N, 0);

    auto record = [&](std::size_t round) {
        RoundMetrics rm;
        rm.round = round;
        RoundMetrics::Federated fl;
        const double nb = static_cast<double>(benign_ids.size());
        std::vector<Vector> cluster_mean(static_cast<std::size_t>(cfg.clusters), Vector::Zero(P));
        for (const auto j : benign_ids) {
            const auto& slot = roster[j];
            const auto e = evaluate(model, agents[j].theta, data.test[static_cast<std::size_t>(slot.cluster)],
                                    spec.source_class, spec.target_class);
            fl.overall_acc.push_back(e.overall);
            fl.source_acc.push_back(e.source);
            fl.asr.push_back(e.asr);
            fl.overall_acc_mean += e.overall / nb;
            fl.source_acc_mean += e.source / nb;
            fl.asr_mean += e.asr / nb;
            for (int c = 0; c < 4; ++c) {
                fl.selection[c] += round_selection[j][c] / nb;
                fl.weight_mass[c] += round_weight[j][c] / nb;
            }
            cluster_mean[static_cast<std::size_t>(slot.cluster)] += agents[j].theta / cfg.benign_per_cluster;
        }
        // Particle columns: spread of benign models around their cluster mean.
        double spread = 0.0;
        std::size_t downloads = 0;
        for (const auto j : benign_ids) {
            spread += 0.5 * (agents[j].theta - cluster_mean[static_cast<std::size_t>(roster[j].cluster)]).squaredNorm() / nb;
            downloads += round_downloads[j];
        }
        rm.V_benign = spread;
        rm.dist_mean = nan;
        rm.consensus_dist = nan;
        rm.sublevel_size = static_cast<double>(downloads) / nb;
        rm.fl = std::move(fl);
        res.rounds.push_back(std::move(rm));
    };

    res.rounds.reserve(cfg.T + 1);
    record(0);
    std::vector<Vector> published(N);
    for (std::size_t n = 0; n < cfg.T; ++n) {
        parallel_for(N, cfg.threads, [&](std::size_t j) {
            auto stream = rng::make_stream(seed, {rng::fed_local, j, n});
            published[j] = local_update(model, agents[j].theta, agents[j].train, local_cfg, stream);
        });

        parallel_for(N, cfg.threads, [&](std::size_t j) {
            auto& a = agents[j];
            round_selection[j] = {};
            round_weight[j] = {};
            if (roster[j].role == Role::benign) {
                auto stream = rng::make_stream(seed, {rng::fed_sampling, j, n});
                const auto slots = prob_sampling(a.likelihood, cfg.M, stream);
                std::vector<Download> downloads;
                downloads.reserve(slots.size());
                for (const auto s : slots) {
                    const auto peer = peer_of(j, s);
                    downloads.push_back({s, &published[peer], agents[peer].sample_count});
                }
                const auto out = local_aggregation(model, published[j], a.likelihood, *a.validation, downloads, n,
                                                   agg_cfg);
                a.theta = out.theta;
                // Bookkeeping for the metrics only; aggregation above saw opaque slots.
                for (std::size_t k = 0; k < slots.size(); ++k) {
                    const auto peer = peer_of(j, slots[k]);
                    const int c = category(roster[j], roster[peer]);
                    round_selection[j][c] += 1.0;
                    round_weight[j][c] += out.weights[k];
                    res.selection_counts(static_cast<Index>(j), static_cast<Index>(peer)) += 1.0;
                    res.weight_mass(static_cast<Index>(j), static_cast<Index>(peer)) += out.weights[k];
                }
                round_downloads[j] = slots.size();
            } else {
                auto stream = rng::make_stream(seed, {rng::fed_malicious, j, n});
                const auto picks = malicious_selection(j, res.roster, cfg.M, stream);
                std::vector<const Vector*> models;
                std::vector<double> counts;
                for (const auto i : picks) {
                    models.push_back(&published[i]);
                    counts.push_back(agents[i].sample_count);
                    res.selection_counts(static_cast<Index>(j), static_cast<Index>(i)) += 1.0;
                }
                a.theta = malicious_aggregation(published[j], a.sample_count, models, counts);
                round_downloads[j] = picks.size();
            }
        });
        record(n + 1);
    }
    res.final_models.reserve(N);
    for (auto& a : agents) res.final_models.push_back(std::move(a.theta));
    return res;
}

}  // namespace cb2o::fed
