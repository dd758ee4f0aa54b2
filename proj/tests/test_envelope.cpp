#include <catch_amalgamated.hpp>

#include "hcap/envelope.hpp"
#include "hcap/errors.hpp"

using namespace hcap;

TEST_CASE("envelope keeps a vertex that sits above the chord") {
    // chord (0,0)-(2,1.5) passes 0.75 at r = 1, below the middle point
    const Envelope env = concave_envelope({{0, 0}, {1, 1}, {2, 1.5}}, 1.0);
    CHECK(env.value_at == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(env.support.size() == 1);
    CHECK(env.support[0].r == 1.0);
    CHECK(env.support[0].weight == 1.0);
}

TEST_CASE("envelope bridges over a sagging middle point") {
    // hand hull: chord (0,0)-(1,1) dominates (0.5, 0.1)
    const Envelope env = concave_envelope({{0, 0}, {0.5, 0.1}, {1, 1}}, 0.5);
    CHECK(env.value_at == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(env.support.size() == 2);
    CHECK(env.support[0].r == 0.0);
    CHECK(env.support[1].r == 1.0);
    CHECK(env.support[0].weight == Catch::Approx(0.5).margin(1e-12));
    CHECK(env.support[1].weight == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("envelope of a single point is that point") {
    const Envelope env = concave_envelope({{0.3, 0.8}}, 0.3);
    CHECK(env.value_at == 0.8);
    REQUIRE(env.support.size() == 1);
    CHECK(env.support[0].point_index == 0);
}

TEST_CASE("envelope rejects out-of-range queries") {
    try {
        concave_envelope({{0, 0}, {1, 1}}, 1.5);
        FAIL("expected QueryOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::QueryOutOfRange);
    }
}

TEST_CASE("envelope support mixes to the query and stays small") {
    const std::vector<std::pair<double, double>> pts = {
        {0.0, 0.1}, {0.2, 0.5}, {0.4, 0.55}, {0.6, 0.9}, {0.8, 0.91}, {1.0, 1.0}};
    for (double q : {0.0, 0.1, 0.3, 0.45, 0.77, 1.0}) {
        const Envelope env = concave_envelope(pts, q);
        REQUIRE(env.support.size() >= 1);
        REQUIRE(env.support.size() <= 3);
        double wsum = 0, r_mean = 0, gmix = 0;
        for (const auto& sp : env.support) {
            wsum += sp.weight;
            r_mean += sp.weight * sp.r;
            gmix += sp.weight * sp.g;
        }
        CHECK(wsum == Catch::Approx(1.0).margin(1e-12));
        CHECK(r_mean == Catch::Approx(q).margin(1e-9));
        CHECK(gmix == Catch::Approx(env.value_at).margin(1e-12));
        // the envelope dominates every sampled point at its own abscissa
        for (const auto& [r, g] : pts)
            if (r == q) CHECK(env.value_at >= g - 1e-12);
    }
}
