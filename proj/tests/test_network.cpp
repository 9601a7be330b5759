#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "evadopt/errors.hpp"
#include "evadopt/network.hpp"
#include "support.hpp"

using namespace evadopt;

namespace {

std::vector<OpinionProfile> profiles_1d(const std::vector<double>& values) {
    std::vector<OpinionProfile> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out.push_back({CommunityIndex::from_flat(static_cast<int>(i)), Vector::Constant(1, values[i])});
    return out;
}

}  // namespace

TEST_CASE("median bandwidth") {
    CHECK(median_bandwidth(profiles_1d({0.0, 1.0})) == doctest::Approx(1.0));
    CHECK(median_bandwidth(profiles_1d({0.0, 1.0, 3.0})) == doctest::Approx(2.0));
    CHECK(median_bandwidth(profiles_1d({0.0, 1.0, 3.0, 6.0})) == doctest::Approx(3.0));  // {1,2,3,3,5,6}
    CHECK_THROWS_AS(median_bandwidth(profiles_1d({0.5})), DegenerateProfiles);
    CHECK_THROWS_AS(median_bandwidth(profiles_1d({0.5, 0.5, 0.5})), DegenerateProfiles);

    testing::Rng rng(3);
    std::vector<OpinionProfile> ps;
    for (int i = 0; i < 25; ++i) ps.push_back({CommunityIndex::from_flat(i), rng.vector(4, 0.0, 1.0)});
    std::vector<double> pairs;
    for (int i = 0; i < 25; ++i)
        for (int j = i + 1; j < 25; ++j) {
            double s = 0.0;
            for (int q = 0; q < 4; ++q) s += std::pow(ps[i].values[q] - ps[j].values[q], 2);
            pairs.push_back(std::sqrt(s));
        }
    REQUIRE(pairs.size() == 300);
    std::sort(pairs.begin(), pairs.end());
    CHECK(median_bandwidth(ps) == doctest::Approx(0.5 * (pairs[149] + pairs[150])).epsilon(1e-15));
}

TEST_CASE("kernel values and cutoff") {
    const auto g = build_similarity(profiles_1d({0.0, 0.5, 0.5}), 0.5);
    CHECK(g.kernel(0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(g.kernel(1, 2) == 1.0);
    CHECK(g.kernel(0, 0) == 0.0);

    const auto at = build_similarity(profiles_1d({0.0, 0.9}), 0.5);
    CHECK(at.kernel(0, 1) > 0.0);
    const auto beyond = build_similarity(profiles_1d({0.0, 0.9 + 1e-9}), 0.5);
    CHECK(beyond.kernel(0, 1) == 0.0);
    CHECK(beyond.isolated == std::vector<int>{0, 1});
    CHECK(beyond.W == Matrix::Identity(2, 2));
    CHECK_THROWS_AS(build_similarity(profiles_1d({0.0, 1.0}), 0.0), InvalidModel);
}

TEST_CASE("in-degree centrality") {
    const Matrix uniform = Matrix::Constant(4, 4, 0.25);
    const Centrality cu = in_degree_centrality(uniform);
    CHECK((cu.normalized - Vector::Constant(4, 0.25)).cwiseAbs().maxCoeff() < 1e-15);

    Matrix star = Matrix::Zero(4, 4);
    star.col(0).setOnes();
    star(0, 0) = 0.0;
    star(0, 1) = 1.0;
    const Centrality cs = in_degree_centrality(star);
    CHECK(cs.raw[0] == 3.0);
    CHECK(cs.raw[1] == 1.0);

    testing::Rng rng(9);
    const Matrix W = testing::random_stochastic(rng, 5);
    const Centrality c = in_degree_centrality(W);
    for (int j = 0; j < 5; ++j) {
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += W(i, j);
        CHECK(c.raw[j] == doctest::Approx(s).epsilon(1e-15));
    }
    CHECK(c.normalized.sum() == doctest::Approx(1.0));
}

TEST_CASE("pagerank") {
    const Vector u = pagerank(Matrix::Constant(5, 5, 0.2));
    CHECK((u - Vector::Constant(5, 0.2)).cwiseAbs().maxCoeff() < 1e-12);
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK((pagerank(swap) - Vector::Constant(2, 0.5)).cwiseAbs().maxCoeff() < 1e-12);

    Matrix chain = Matrix::Zero(3, 3);
    chain(0, 1) = 1.0;
    chain(1, 0) = chain(1, 2) = 0.5;
    chain(2, 1) = 1.0;
    const double d = 0.85;
    const Vector oracle =
        (Matrix::Identity(3, 3) - d * chain.transpose()).fullPivLu().solve(Vector::Constant(3, (1 - d) / 3));
    CHECK((pagerank(chain, d) - oracle / oracle.sum()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(pagerank(chain, 1.0), InvalidModel);
}
