#include "cb2o/problems.hpp"

#include <doctest.h>

using namespace cb2o;

namespace {
Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (const double x : v) out(i++) = x;
    return out;
}
}  // namespace

TEST_CASE("ring problem values")
{
    const auto p = vec({0.6, 0.8});
    const auto r = ring_problem(2, p);
    CHECK(r.lower(p) < 1e-30);
    CHECK(r.upper(-p) == doctest::Approx(4.0));
    CHECK(r.lower(Vector::Zero(2)) == 1.0);
    CHECK(r.upper(p) == 0.0);
    CHECK(r.worst_minimizer == -p);
    CHECK(r.distance_to_minimizers(vec({3, 0})) == doctest::Approx(2.0));
    CHECK_THROWS_AS(ring_problem(2, vec({1, 1})), InvalidArgument);
    CHECK_THROWS_AS(ring_problem(1, vec({1})), InvalidArgument);
}

TEST_CASE("hyperplane problem values")
{
    const auto p = vec({0, 1, 0});
    const auto h = hyperplane_problem(3, p);
    CHECK(h.lower(vec({0, 5, -3})) == 0.0);
    CHECK(h.upper(p) == 0.0);
    CHECK(hyperplane_problem(2).lower(vec({2, 0})) == 4.0);
    CHECK(h.distance_to_minimizers(vec({-1.5, 2, 2})) == 1.5);
    CHECK_THROWS_AS(hyperplane_problem(2, vec({0.1, 1})), InvalidArgument);
}

TEST_CASE("problem factory")
{
    CHECK(make_problem("ring", 3, {}).dimension == 3);
    CHECK(make_problem("hyperplane", 2, {0.0, -1.0}).theta_good(1) == -1.0);
    CHECK_THROWS_AS(make_problem("rastrigin", 2, {}), InvalidArgument);
    CHECK_THROWS_AS(make_problem("ring", 2, {1.0}), InvalidArgument);
}

TEST_CASE("stored constants pass their probes")
{
    for (const auto& prob : {ring_problem(2), ring_problem(3), hyperplane_problem(2), hyperplane_problem(3)}) {
        rng::Stream s(5);
        const auto report = probe_assumptions(prob, 5000, 3.0, s);
        CHECK_MESSAGE(report.total_violations() == 0, prob.name, " d=", prob.dimension);
        CHECK(report.at("A6").samples > 0);
    }
}

TEST_CASE("hyperplane inverse continuity is an identity with exponent 1/2")
{
    const auto h = hyperplane_problem(2);
    CHECK(h.constants.eta_L == 1.0);
    CHECK(h.constants.nu_L == 0.5);
    rng::Stream s(11);
    const auto report = probe_assumptions(h, 20000, 3.0, s);
    CHECK(report.at("A3.inverse").violations == 0);
}

TEST_CASE("a wrong constant is caught by its probe")
{
    auto r = ring_problem(2);
    r.constants.H_L = 0.5;
    rng::Stream s(3);
    const auto report = probe_assumptions(r, 5000, 3.0, s);
    CHECK(report.at("A2").violations > 0);
    CHECK(report.at("A2").worst_margin < 0.0);
}

TEST_CASE("ball and sphere samplers stay in range")
{
    rng::Stream s(8);
    const Vector c = vec({1, -1, 2});
    for (int i = 0; i < 1000; ++i) {
        CHECK((sample_ball(c, 0.5, s) - c).norm() <= 0.5 + 1e-12);
        CHECK(sample_direction(3, s).norm() == doctest::Approx(1.0));
    }
}
