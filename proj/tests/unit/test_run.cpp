#include "cb2o/run.hpp"

#include <doctest.h>

#include <cmath>

using namespace cb2o;

namespace {

Cb2oRunConfig short_run(std::size_t iters)
{
    Cb2oRunConfig c;
    c.n_particles = 50;
    c.n_iters = iters;
    return c;
}

}  // namespace

TEST_CASE("robust hyperparameters")
{
    const auto same = robust_hyperparams(30, 0.2, 1.0, 0.0, 0.01, 2.0);
    CHECK(same.alpha == 30.0);
    CHECK(same.beta == 0.2);

    const auto five = robust_hyperparams(30, 0.5, 0.8, 0.2, 0.01, 2.0);
    CHECK(five.alpha == doctest::Approx(30.0 + std::log(5.0)).epsilon(1e-14));
    CHECK(five.beta == doctest::Approx(0.4));

    // Ratio below one: only beta changes.
    const auto small = robust_hyperparams(30, 0.5, 0.99, 0.01, 1.0, 2.0);
    CHECK(small.alpha == 30.0);
    CHECK(small.beta == doctest::Approx(0.495));

    for (const double wb : {0.1, 0.3, 0.7, 1.0})
        CHECK(robust_hyperparams(1, 0.6, wb, 1 - wb, 0.01, 2).beta == doctest::Approx(0.6 * wb).epsilon(1e-15));

    CHECK_THROWS_AS(robust_hyperparams(30, 0.2, 0.0, 1.0, 0.01, 2.0), InvalidArgument);
    CHECK_THROWS_AS(robust_hyperparams(30, 0.2, 0.5, 0.5, 0.0, 2.0), InvalidArgument);
}

TEST_CASE("zero iterations yields only the initial record")
{
    const auto t = run_cb2o(ring_problem(2), policy::None{}, short_run(0));
    REQUIRE(t.rounds.size() == 1);
    CHECK(t.rounds[0].round == 0);
}

TEST_CASE("trajectory has one record per iteration plus the initial one")
{
    const auto t = run_cb2o(ring_problem(2), policy::None{}, short_run(10));
    REQUIRE(t.rounds.size() == 11);
    for (std::size_t k = 0; k < t.rounds.size(); ++k) CHECK(t.rounds[k].round == k);
}

TEST_CASE("same seed gives bit-identical trajectories at any thread count")
{
    auto cfg = short_run(100);
    cfg.n_malicious = 10;
    const auto prob = ring_problem(3);
    const policy::RandomNoise noise{0.5};
    const auto a = run_cb2o(prob, noise, cfg);
    cfg.threads = 8;
    const auto b = run_cb2o(prob, noise, cfg);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t k = 0; k < a.rounds.size(); ++k) {
        CHECK(a.rounds[k].V_benign == b.rounds[k].V_benign);
        CHECK(a.rounds[k].consensus_dist == b.rounds[k].consensus_dist);
    }
    CHECK(a.final_ensemble.positions == b.final_ensemble.positions);

    cfg.seed = 2;
    const auto c = run_cb2o(prob, noise, cfg);
    CHECK(c.final_ensemble.positions != a.final_ensemble.positions);
}

TEST_CASE("attack-free run on the ring converges to the target")
{
    Cb2oRunConfig cfg;
    const auto t = run_cb2o(ring_problem(2), policy::None{}, cfg);
    CHECK(t.rounds.back().dist_mean < 0.05);
    CHECK(t.rounds.back().V_benign < t.rounds.front().V_benign);
}

TEST_CASE("robust mode rescales beta by the benign fraction")
{
    auto cfg = short_run(1);
    cfg.n_malicious = 10;
    cfg.robust = true;
    const auto prob = ring_problem(2);
    const auto t = run_cb2o(prob, policy::FixedDecoy{prob.worst_minimizer}, cfg);
    CHECK(t.consensus.beta == doctest::Approx(0.2 * 0.8));
    CHECK(t.consensus.alpha >= cfg.consensus.alpha);
}

TEST_CASE("malicious rows are tagged last and decoys start on the decoy")
{
    auto cfg = short_run(0);
    cfg.n_malicious = 5;
    const auto prob = ring_problem(2);
    const auto e = initialize_ensemble(prob, policy::FixedDecoy{prob.worst_minimizer}, cfg);
    CHECK(e.malicious_count() == 5);
    CHECK(e.roles.back() == Role::malicious);
    CHECK(e.roles.front() == Role::benign);
    CHECK(e.positions.row(49).transpose() == prob.worst_minimizer);
    CHECK(e.positions.topRows(45).cwiseAbs().maxCoeff() <= cfg.init_half_width);
}

TEST_CASE("empty sublevel set falls back to the best particle inside the ball")
{
    auto cfg = short_run(3);
    cfg.consensus.mode = QuantileMode::theoretical;
    // Low-loss particles sit near the unit circle, outside B_0.5(0).
    cfg.consensus.radius = 0.5;
    cfg.init_half_width = 1.5;
    const auto t = run_cb2o(ring_problem(2), policy::None{}, cfg);
    REQUIRE_FALSE(t.fallback_rounds.empty());
    CHECK(t.fallback_rounds.front() == 0);
    CHECK(t.rounds[0].sublevel_size == 1);

    cfg.init_center = Vector::Constant(2, 5.0);
    cfg.init_half_width = 0.5;
    CHECK_THROWS_AS(run_cb2o(ring_problem(2), policy::None{}, cfg), EmptySublevelSet);
}

TEST_CASE("run config validation")
{
    auto cfg = short_run(1);
    cfg.n_malicious = 50;
    CHECK_THROWS_AS(run_cb2o(ring_problem(2), policy::None{}, cfg), InvalidArgument);
    cfg.n_malicious = 0;
    cfg.init_center = Vector::Zero(3);
    CHECK_THROWS_AS(run_cb2o(ring_problem(2), policy::None{}, cfg), InvalidArgument);
}
