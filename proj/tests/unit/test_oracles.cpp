#include "cb2o/oracles.hpp"

#include <doctest.h>

using namespace cb2o;

TEST_CASE("quantile oracles agree on a hand example")
{
    const std::vector<double> l{3, 1, 4, 2};
    CHECK(oracle::brute_quantile(l, 0.5) == 2.0);
    CHECK(oracle::brute_quantile(l, 1.0) == 4.0);
    CHECK(oracle::riemann_mean_quantile(l, 0.25, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(oracle::parts_mean_quantile(l, 0.25, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("default suite passes")
{
    oracle::SuiteConfig cfg;
    cfg.probe_samples = 20000;
    for (const auto& c : oracle::run_suite(cfg)) CHECK_MESSAGE(c.passed, c.name, ": ", c.detail);
}

TEST_CASE("flipped consensus weights fail the consensus oracle")
{
    oracle::SuiteConfig cfg;
    cfg.consensus_trials = 200;
    cfg.consensus = [](const Matrix& p, std::span<const double> l, std::span<const double> g,
                       const ConsensusConfig& c) {
        const auto sel = sublevel_indices<double>(l, p, c);
        std::vector<double> flipped(g.begin(), g.end());
        for (auto& v : flipped) v = -v;
        return weighted_mean<double>(p, flipped, sel, c.alpha);
    };
    CHECK_FALSE(oracle::consensus_check(cfg).passed);
}

TEST_CASE("random laplace cases are admissible")
{
    rng::Stream s(77);
    for (int k = 0; k < 20; ++k) {
        const auto c = oracle::random_laplace_case(s);
        CHECK_MESSAGE(c.result.applicable, c.result.reason);
        CHECK(c.result.holds);
    }
}
