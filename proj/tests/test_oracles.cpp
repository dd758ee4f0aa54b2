#include <catch_amalgamated.hpp>

#include <random>

#include "hcap/hcap.hpp"
#include "helpers.hpp"

using namespace hcap;

TEST_CASE("useless detection") {
    CHECK(detect_useless(testutil::random_useless_channel(2, 2, 3, 1)));
    CHECK(!detect_useless(testutil::noiseless_channel()));
    CHECK(!detect_useless(testutil::mod_additive_channel(2, {0.5, 0.5})));
}

TEST_CASE("useless capacity is the helper rate") {
    CHECK(useless_capacity(0.0).value == 0.0);
    CHECK(useless_capacity(0.7).value == 0.7);
    CHECK(useless_capacity(2.0).value == 2.0);
    CHECK_THROWS_AS(useless_capacity(-1.0), Error);
}

TEST_CASE("modulo-additive detection") {
    CHECK(detect_mod_additive(testutil::mod_additive_channel(2, {0.3, 0.7})).detected);
    CHECK(detect_mod_additive(testutil::mod_additive_channel(3, {0.2, 0.3, 0.5})).detected);

    // smoothing breaks the exact point-mass structure
    RawChannel raw;
    raw.x_size = raw.s_size = raw.y_size = 2;
    raw.q_s = {0.5, 0.5};
    raw.w = {{{0.99, 0.01}, {0.01, 0.99}}, {{0.01, 0.99}, {0.99, 0.01}}};
    CHECK(!detect_mod_additive(Channel(std::move(raw))).detected);

    CHECK(!detect_mod_additive(testutil::random_channel(2, 3, 2, 5)).detected);
}

TEST_CASE("modulo-additive capacity values") {
    const Channel m2u = testutil::mod_additive_channel(2, {0.5, 0.5});
    CHECK(mod_additive_capacity(m2u, 0.2).value == Catch::Approx(0.2).margin(1e-12));
    const Channel m2s = testutil::mod_additive_channel(2, {0.89, 0.11});
    CHECK(mod_additive_capacity(m2s, 0.3).value ==
          Catch::Approx(0.8000840418354720).margin(1e-12));
    const Channel m4 = testutil::mod_additive_channel(4, {0.25, 0.25, 0.25, 0.25});
    CHECK(mod_additive_capacity(m4, 0.0).value == Catch::Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(mod_additive_capacity(testutil::noiseless_channel(), 0.1), Error);
}

TEST_CASE("modulo-additive value minus the budget is budget-independent") {
    const Channel ch = testutil::mod_additive_channel(2, {0.89, 0.11});
    const double d1 = mod_additive_capacity(ch, 0.3).value - 0.3;
    const double d2 = mod_additive_capacity(ch, 0.9).value - 0.9;
    CHECK(std::abs(d1 - d2) <= 1e-15);
}

TEST_CASE("joint information decomposes by the chain rule pointwise") {
    std::mt19937_64 rng(314);
    for (int k = 0; k < 50; ++k) {
        const Channel ch = testutil::random_channel(2, 2, 2, rng());
        std::vector<std::vector<double>> q(ch.s_size());
        for (auto& row : q) row = random_simplex(rng, ch.x_size());
        const auto dec = xsy_information(ch, q);
        CHECK(dec.i_xsy == Catch::Approx(dec.i_xy_given_s + dec.i_sy).margin(1e-10));
    }
}

TEST_CASE("large-help bound on the noiseless binary channel") {
    const Channel ch = testutil::noiseless_channel();
    const auto lh = large_help_lower_bound(ch, 1.0);
    CHECK(lh.bound.value == Catch::Approx(1.0).margin(1e-6));
    CHECK(lh.bound.rate_ok);
}

TEST_CASE("large-help bound matches the modulo closed form at rh = H(S)") {
    const Channel ch = testutil::mod_additive_channel(2, {0.5, 0.5});
    const auto lh = large_help_lower_bound(ch, 1.0);
    CHECK(lh.bound.value == Catch::Approx(1.0).margin(1e-6));
    CHECK(lh.bound.value == Catch::Approx(mod_additive_capacity(ch, 1.0).value).margin(1e-6));
}

TEST_CASE("large-help bound dominates the weak bound") {
    for (std::uint64_t seed = 200; seed < 208; ++seed) {
        const Channel ch = testutil::random_channel(2, 2, 2, seed);
        const double rh = ch.state_entropy() + 0.3;
        const auto lh = large_help_lower_bound(ch, rh);
        CHECK(lh.bound.value >= lh.weak_bound - 1e-9);
    }
}

TEST_CASE("large-help bound requires enough helper rate") {
    const Channel ch = testutil::mod_additive_channel(2, {0.5, 0.5});
    try {
        large_help_lower_bound(ch, 0.5);
        FAIL("expected RhTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RhTooSmall);
    }
}

TEST_CASE("optimizer agrees with detected oracles") {
    OptimOptions opts;
    opts.jobs = 2;
    const Channel useless = testutil::random_useless_channel(2, 2, 2, 9);
    CHECK(capacity(useless, 0.25, opts).c ==
          Catch::Approx(useless_capacity(0.25).value).margin(1e-3));
    const Channel mod2 = testutil::mod_additive_channel(2, {0.89, 0.11});
    CHECK(capacity(mod2, 0.4, opts).c ==
          Catch::Approx(mod_additive_capacity(mod2, 0.4).value).margin(1e-2));
}
