#include "cb2o/oracles.hpp"
#include "cb2o/quantile.hpp"
#include "cb2o/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace cb2o;

namespace {
std::span<const double> view(const std::vector<double>& v) { return v; }
}

TEST_CASE("empirical quantile picks the ceil(aN)-th order statistic")
{
    const std::vector<double> l{3, 1, 4, 2};
    CHECK(empirical_quantile(view(l), 0.5) == 2.0);
    CHECK(empirical_quantile(view(l), 1.0) == 4.0);
    CHECK(empirical_quantile(view(l), 0.25) == 1.0);
    CHECK(empirical_quantile(view(l), 0.26) == 2.0);
    const std::vector<double> one{7};
    CHECK(empirical_quantile(view(one), 0.3) == 7.0);
}

TEST_CASE("empirical quantile rejects bad input")
{
    const std::vector<double> empty;
    CHECK_THROWS_AS(empirical_quantile(view(empty), 0.5), InvalidArgument);
    const std::vector<double> l{1, 2};
    CHECK_THROWS_AS(empirical_quantile(view(l), 0.0), InvalidArgument);
    CHECK_THROWS_AS(empirical_quantile(view(l), 1.5), InvalidArgument);
    const std::vector<double> bad{1, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(empirical_quantile(view(bad), 0.5), InvalidArgument);
}

TEST_CASE("quantile rank survives fractions that round badly")
{
    // 0.3 * 10 evaluates to 3.0000000000000004 in floating point.
    CHECK(detail::quantile_rank(0.3, 10) == 3);
    CHECK(detail::quantile_rank(0.7, 10) == 7);
    CHECK(detail::quantile_rank(1.0, 3) == 3);
    CHECK(detail::quantile_rank(1e-9, 5) == 1);
}

TEST_CASE("practical threshold equals the empirical quantile")
{
    const std::vector<double> l{3, 1, 4, 2};
    CHECK(quantile_threshold(view(l), 0.5, 0.0, QuantileMode::practical) == 2.0);
    CHECK(quantile_threshold(view(l), 0.5, 0.7, QuantileMode::practical) == 2.0);
}

TEST_CASE("theoretical threshold of a constant loss is the constant plus slack")
{
    const std::vector<double> l{1.5, 1.5, 1.5, 1.5};
    for (const double beta : {0.1, 0.5, 0.9, 1.0})
        CHECK(quantile_threshold(view(l), beta, 0.1, QuantileMode::theoretical) == doctest::Approx(1.6).epsilon(1e-15));
}

TEST_CASE("theoretical threshold matches both integration oracles")
{
    const std::vector<double> l{1, 2, 3, 4};
    const double got = quantile_threshold(view(l), 0.5, 0.0, QuantileMode::theoretical);
    CHECK(got == doctest::Approx(oracle::riemann_mean_quantile(l, 0.25, 0.5)).epsilon(1e-10));
    CHECK(got == doctest::Approx(oracle::parts_mean_quantile(l, 0.25, 0.5)).epsilon(1e-10));
    // q_a = 1 on (0, 1/4] and 2 on (1/4, 1/2]: the mean over [1/4, 1/2] is 2.
    CHECK(got == doctest::Approx(2.0).epsilon(1e-14));

    // Interval spanning three steps: [0.3, 0.9] with N = 5.
    const std::vector<double> m{5, 1, 4, 2, 3};
    const double exact = (0.1 * 2 + 0.2 * 3 + 0.2 * 4 + 0.1 * 5) / 0.6;
    CHECK(mean_quantile_between(view(m), 0.3, 0.9) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("single-step integral never leaves the step value")
{
    rng::Stream s(99);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> l(1 + s.below(7));
        for (auto& v : l) v = s.uniform(-3, 3);
        const double beta = s.uniform(1e-6, 1.0);
        const double t = quantile_threshold(view(l), beta, 0.0, QuantileMode::theoretical);
        CHECK(t <= empirical_quantile(view(l), beta));
        CHECK(t >= empirical_quantile(view(l), beta / 2.0));
    }
}
