#include "cb2o/adversary.hpp"
#include "cb2o/problems.hpp"

#include <doctest.h>

using namespace cb2o;

namespace {

Ensemble mixed()
{
    Matrix p(4, 2);
    p << 0, 0, 1, 1, 2, 2, 3, 3;
    return {p, {Role::benign, Role::benign, Role::malicious, Role::malicious}};
}

AdversaryContext context()
{
    AdversaryContext c;
    c.consensus = Vector::Constant(2, 0.5);
    c.gamma = 0.1;
    c.seed = 9;
    c.iteration = 4;
    return c;
}

}  // namespace

TEST_CASE("none leaves every row untouched")
{
    auto e = mixed();
    const Matrix before = e.positions;
    adversary_step(e, context(), policy::None{});
    CHECK(e.positions == before);
}

TEST_CASE("fixed decoy pins attackers inside the minimizer set at maximal G")
{
    const auto prob = ring_problem(2);
    auto e = mixed();
    const Matrix before = e.positions;
    adversary_step(e, context(), policy::FixedDecoy{prob.worst_minimizer});
    for (Index i = 2; i < 4; ++i) {
        const Vector row = e.positions.row(i).transpose();
        CHECK(row == -prob.theta_good);
        CHECK(prob.lower(row) == 0.0);
        CHECK(prob.upper(row) == 4.0);
    }
    CHECK(e.positions.topRows(2) == before.topRows(2));
}

TEST_CASE("drift with rate times gamma one lands on the decoy")
{
    auto e = mixed();
    auto ctx = context();
    ctx.gamma = 0.25;
    const Vector z = Vector::Constant(2, -1.0);
    adversary_step(e, ctx, policy::DriftToDecoy{z, 4.0});
    CHECK(e.positions.row(2).transpose() == z);
    CHECK(e.positions.row(3).transpose() == z);
}

TEST_CASE("partial drift moves a fraction of the way")
{
    auto e = mixed();
    auto ctx = context();
    ctx.gamma = 0.5;
    adversary_step(e, ctx, policy::DriftToDecoy{Vector::Zero(2), 1.0});
    CHECK(e.positions(2, 0) == doctest::Approx(1.0));
    CHECK(e.positions(3, 1) == doctest::Approx(1.5));
}

TEST_CASE("mimic offset follows the published consensus point")
{
    auto e = mixed();
    const Vector v = Vector::Constant(2, 0.25);
    adversary_step(e, context(), policy::MimicOffset{v});
    CHECK(e.positions.row(3).transpose() == context().consensus + v);
}

TEST_CASE("random noise is seeded and scaled by sqrt(gamma)")
{
    auto a = mixed();
    auto b = mixed();
    adversary_step(a, context(), policy::RandomNoise{1.0});
    adversary_step(b, context(), policy::RandomNoise{1.0});
    CHECK(a.positions == b.positions);
    CHECK(a.positions.bottomRows(2) != mixed().positions.bottomRows(2));

    auto z = mixed();
    adversary_step(z, context(), policy::RandomNoise{0.0});
    CHECK(z.positions == mixed().positions);
}

TEST_CASE("policy validation and names")
{
    CHECK_THROWS_AS(validate(policy::FixedDecoy{Vector::Zero(3)}, 2), InvalidArgument);
    CHECK_THROWS_AS(validate(policy::RandomNoise{-1.0}, 2), InvalidArgument);
    CHECK_NOTHROW(validate(policy::None{}, 2));
    CHECK(policy_name(policy::FixedDecoy{}) == "fixed_decoy");
    CHECK(policy_name(policy::None{}) == "none");
}

TEST_CASE("decoy attackers start on the decoy")
{
    auto e = mixed();
    const Vector z = Vector::Constant(2, 7.0);
    initialize_malicious(e, policy::FixedDecoy{z}, [](Index) { return Vector::Zero(2); });
    CHECK(e.positions.row(2).transpose() == z);
    initialize_malicious(e, policy::None{}, [](Index) { return Vector::Zero(2); });
    CHECK(e.positions.row(2).isZero(0.0));
    CHECK(e.positions(1, 0) == 1.0);
}
