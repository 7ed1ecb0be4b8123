#include "cb2o/dynamics.hpp"
#include "cb2o/ensemble.hpp"

#include <doctest.h>

using namespace cb2o;

namespace {

Ensemble line_ensemble(Index n, Index malicious = 0)
{
    Matrix p(n, 2);
    for (Index i = 0; i < n; ++i) p.row(i) << 2.0 + static_cast<double>(i), -static_cast<double>(i);
    std::vector<Role> roles(static_cast<std::size_t>(n), Role::benign);
    for (Index i = n - malicious; i < n; ++i) roles[static_cast<std::size_t>(i)] = Role::malicious;
    return {p, roles};
}

}  // namespace

TEST_CASE("noise-free full step lands on the consensus point")
{
    auto e = line_ensemble(5);
    const Vector m = Vector::Zero(2);
    StepConfig s;
    s.sigma = 0.0;
    s.lambda = 1.0;
    s.gamma = 1.0;
    cb2o_step<double>(e, m, s, 1, 0);
    CHECK(e.positions.isZero(0.0));
}

TEST_CASE("noise-free half step is the midpoint")
{
    Matrix p(1, 2);
    p << 2.0, 0.0;
    Ensemble e(p, {Role::benign});
    StepConfig s;
    s.sigma = 0.0;
    s.lambda = 0.5;
    s.gamma = 1.0;
    cb2o_step<double>(e, Vector::Zero(2), s, 1, 0);
    CHECK(e.positions(0, 0) == 1.0);
    CHECK(e.positions(0, 1) == 0.0);
}

TEST_CASE("particle at the consensus point stays put whatever sigma")
{
    Matrix p(1, 3);
    p << 0.3, -0.2, 1.0;
    Ensemble e(p, {Role::benign});
    StepConfig s;
    s.sigma = 5.0;
    const Vector m = p.row(0).transpose();
    cb2o_step<double>(e, m, s, 7, 3);
    CHECK(e.positions == p);
}

TEST_CASE("malicious rows are not moved by the protocol step")
{
    auto e = line_ensemble(6, 2);
    const Matrix before = e.positions;
    cb2o_step<double>(e, Vector::Zero(2), StepConfig{}, 3, 0);
    CHECK(e.positions.bottomRows(2) == before.bottomRows(2));
    CHECK(e.positions.topRows(4) != before.topRows(4));
}

TEST_CASE("step result does not depend on the thread count")
{
    auto a = line_ensemble(101);
    auto b = a;
    const Vector m = Vector::Constant(2, 0.5);
    for (std::uint64_t t = 0; t < 5; ++t) {
        cb2o_step<double>(a, m, StepConfig{}, 42, t, 1);
        cb2o_step<double>(b, m, StepConfig{}, 42, t, 8);
    }
    CHECK(a.positions == b.positions);
}

TEST_CASE("step config warnings and errors")
{
    StepConfig s;
    CHECK(s.warnings(2).empty());
    s.sigma = 2.0;
    CHECK(s.warnings(2).size() == 1);
    s.sigma = 0.5;
    s.gamma = 2.0;
    CHECK(s.warnings(2).size() == 1);
    CHECK_NOTHROW(s.validate());
    s.lambda = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("ensemble bookkeeping")
{
    auto e = line_ensemble(10, 3);
    CHECK(e.benign_count() == 7);
    CHECK(e.malicious_count() == 3);
    CHECK(e.benign_weight() == doctest::Approx(0.7));
    CHECK(e.indices_of(Role::malicious) == std::vector<Index>{7, 8, 9});
    CHECK(e.rows_of(Role::malicious).rows() == 3);
    Matrix bad(2, 2);
    bad << 1, std::numeric_limits<double>::infinity(), 0, 0;
    CHECK_THROWS_AS(Ensemble(bad, {Role::benign, Role::benign}), InvalidArgument);
    CHECK_THROWS_AS(Ensemble(bad.topRows(1), {Role::benign, Role::benign}), InvalidArgument);
}
