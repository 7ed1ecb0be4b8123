#include "cb2o/consensus.hpp"
#include "cb2o/oracles.hpp"

#include <doctest.h>

using namespace cb2o;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r)
{
    Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
    Index i = 0;
    for (const auto& row : r) {
        Index j = 0;
        for (const double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("sublevel set in practical mode keeps ties at the threshold")
{
    const Matrix p = rows({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    const std::vector<double> l{3, 1, 4, 2};
    ConsensusConfig cfg;
    cfg.beta = 0.5;
    const auto idx = sublevel_indices<double>(l, p, cfg);
    CHECK(idx == std::vector<Index>{1, 3});

    cfg.beta = 1.0;
    const auto all = sublevel_indices<double>(l, p, cfg);
    CHECK(all.size() == 4);
}

TEST_CASE("finite radius excludes far particles in theoretical mode")
{
    const Matrix p = rows({{5, 0}, {0.5, 0}, {0, 0.5}});
    const std::vector<double> l{0.0, 1.0, 1.0};
    ConsensusConfig cfg;
    cfg.mode = QuantileMode::theoretical;
    cfg.beta = 1.0;
    cfg.delta_q = 0.5;
    cfg.radius = 1.0;
    const auto idx = sublevel_indices<double>(l, p, cfg);
    CHECK(idx == std::vector<Index>{1, 2});

    cfg.radius = 0.1;
    CHECK_THROWS_AS(sublevel_indices<double>(l, p, cfg),
                    EmptySublevelSet);
}

TEST_CASE("practical mode ignores the radius")
{
    ConsensusConfig cfg;
    cfg.radius = 0.1;
    CHECK(std::isinf(cfg.effective_radius()));
    CHECK(cfg.effective_delta_q() == 0.0);
}

TEST_CASE("alpha = 0 gives the plain mean of the sublevel set")
{
    const Matrix p = rows({{0, 0}, {2, 0}, {0, 4}, {9, 9}});
    const std::vector<double> l{0, 0, 0, 10};
    const std::vector<double> g{1, 5, 3, 0};
    ConsensusConfig cfg;
    cfg.alpha = 0.0;
    cfg.beta = 0.75;
    const Vector m = consensus_point<double>(p, l, g, cfg);
    CHECK(m(0) == doctest::Approx(2.0 / 3.0));
    CHECK(m(1) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("single surviving particle is the consensus point")
{
    const Matrix p = rows({{0.25, -1}, {2, 0}, {0, 4}});
    const std::vector<double> l{0, 1, 2};
    const std::vector<double> g{100, 0, 0};
    ConsensusConfig cfg;
    cfg.beta = 0.3;
    const Vector m = consensus_point<double>(p, l, g, cfg);
    CHECK(m(0) == 0.25);
    CHECK(m(1) == -1.0);
}

TEST_CASE("large alpha concentrates on the argmin of G inside the sublevel set")
{
    const Matrix p = rows({{1, 1}, {2, 2}, {3, 3}, {-7, -7}});
    const std::vector<double> l{0, 0, 0, 5};
    const std::vector<double> g{0.3, 0.1, 0.2, -100};  // argmin overall is filtered out
    ConsensusConfig cfg;
    cfg.alpha = 1e6;
    cfg.beta = 0.75;
    const Vector m = consensus_point<double>(p, l, g, cfg);
    CHECK((m - Vector::Constant(2, 2.0)).norm() < 1e-6);
}

TEST_CASE("shifting G by a constant leaves the consensus point unchanged")
{
    const Matrix p = rows({{1, 0}, {0, 1}, {-1, 0.5}});
    const std::vector<double> l{0, 0, 0};
    std::vector<double> g{0.5, 1.0, 2.0};
    ConsensusConfig cfg;
    cfg.beta = 1.0;
    cfg.alpha = 3.0;
    const Vector a = consensus_point<double>(p, l, g, cfg);
    for (auto& v : g) v += 1e3;
    const Vector b = consensus_point<double>(p, l, g, cfg);
    CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("huge alpha times G does not underflow")
{
    const Matrix p = rows({{1, 0}, {0, 1}});
    const std::vector<double> l{0, 0};
    const std::vector<double> g{1e6, 1e6 + 1};
    ConsensusConfig cfg;
    cfg.beta = 1.0;
    cfg.alpha = 100.0;
    const Vector m = consensus_point<double>(p, l, g, cfg);
    CHECK(m.allFinite());
    CHECK(m(0) == doctest::Approx(1.0));
}

TEST_CASE("new consensus agrees with the naive double loop")
{
    const Matrix p = rows({{0.1, 0.2, 0.3}, {1, -1, 0}, {0, 2, 1}, {-0.3, 0.4, 2}, {3, 3, 3}});
    const std::vector<double> l{0.5, 0.1, 0.3, 0.2, 0.9};
    const std::vector<double> g{1, 2, 0.5, 1.5, 0};
    ConsensusConfig cfg;
    cfg.alpha = 7.0;
    cfg.beta = 0.8;
    const Vector a = consensus_point<double>(p, l, g, cfg);
    const Vector b = oracle::naive_consensus(p, l, g, cfg);
    CHECK((a - b).norm() < 1e-13);
}

TEST_CASE("consensus works in single precision")
{
    Eigen::MatrixXf p(2, 1);
    p << 0.0f, 1.0f;
    const std::vector<float> l{0.0f, 0.0f};
    const std::vector<float> g{0.0f, 0.0f};
    ConsensusConfig cfg;
    cfg.beta = 1.0;
    const Eigen::VectorXf m = consensus_point<float>(p, l, g, cfg);
    CHECK(m(0) == doctest::Approx(0.5f));
}

TEST_CASE("config validation")
{
    ConsensusConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg.beta = 0.5;
    cfg.alpha = -1;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg.alpha = 1;
    cfg.radius = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
