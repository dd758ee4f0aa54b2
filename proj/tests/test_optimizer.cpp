#include <catch_amalgamated.hpp>

#include <random>

#include "hcap/hcap.hpp"
#include "helpers.hpp"

using namespace hcap;

namespace {

constexpr double kSkewStateEntropy = 0.4999159581645280;  // H2(0.11)

OptimOptions quick_opts(std::uint64_t seed = 0) {
    OptimOptions o;
    o.seed = seed;
    o.jobs = 2;
    return o;
}

}  // namespace

TEST_CASE("inner_g is zero on useless channels at any budget") {
    const Channel ch = testutil::random_useless_channel(2, 2, 2, 3);
    for (double r : {0.0, 0.4, 1.5}) {
        const GPoint pt = inner_g(ch, 3, r, quick_opts());
        CHECK(pt.g == Catch::Approx(0.0).margin(1e-9));
        CHECK(pt.g >= -1e-9);
        CHECK(pt.slack >= -1e-9);
    }
}

TEST_CASE("inner_g at zero budget on the skewed modulo channel") {
    const Channel ch = testutil::mod_additive_channel(2, {0.89, 0.11});
    const GPoint pt = inner_g(ch, 5, 0.0, quick_opts());
    CHECK(pt.g == Catch::Approx(1.0 - kSkewStateEntropy).margin(1e-6));
    CHECK(pt.i_us <= 1e-9);
}

TEST_CASE("inner_g saturates once the budget covers the state entropy") {
    const Channel ch = testutil::random_channel(2, 2, 2, 77);
    const double hs = ch.state_entropy();
    const GPoint at_hs = inner_g(ch, 5, hs, quick_opts(4));
    const GPoint beyond = inner_g(ch, 5, hs + 0.5, quick_opts(4));
    CHECK(at_hs.g == Catch::Approx(beyond.g).margin(1e-6));
}

TEST_CASE("analytic kernel gradients match central finite differences") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick_dim(2, 3);
    int checked = 0;
    while (checked < 20) {
        const int x = pick_dim(rng), s = pick_dim(rng), y = pick_dim(rng);
        const Channel ch = testutil::random_channel(x, s, y, rng());
        const int u = 3;
        std::vector<int> phi(u);
        std::uniform_int_distribution<int> pick_x(0, x - 1);
        for (int i = 0; i < u; ++i) phi[i] = pick_x(rng);
        // interior point: random simplex blended with uniform
        std::vector<double> t(static_cast<std::size_t>(s) * u);
        for (int si = 0; si < s; ++si) {
            auto row = random_simplex(rng, u);
            for (int ui = 0; ui < u; ++ui)
                t[si * u + ui] = 0.7 * row[ui] + 0.3 / u;
        }
        std::vector<double> g_uy, g_us;
        kernel_mi_grads(ch, u, t, phi, g_uy, g_us);
        const double h = 1e-5;
        double num_uy = 0, num_us = 0, den_uy = 0, den_us = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            auto tp = t, tm = t;
            tp[i] += h;
            tm[i] -= h;
            const auto fp = kernel_mi(ch, u, tp, phi);
            const auto fm = kernel_mi(ch, u, tm, phi);
            const double fd_uy = (fp.i_uy - fm.i_uy) / (2 * h);
            const double fd_us = (fp.i_us - fm.i_us) / (2 * h);
            num_uy += (g_uy[i] - fd_uy) * (g_uy[i] - fd_uy);
            num_us += (g_us[i] - fd_us) * (g_us[i] - fd_us);
            den_uy += fd_uy * fd_uy;
            den_us += fd_us * fd_us;
        }
        CHECK(std::sqrt(num_uy) <= 1e-5 * std::max(1.0, std::sqrt(den_uy)));
        CHECK(std::sqrt(num_us) <= 1e-5 * std::max(1.0, std::sqrt(den_us)));
        ++checked;
    }
}

TEST_CASE("capacity matches the helper-rate value on useless channels") {
    const Channel ch = testutil::random_useless_channel(3, 2, 3, 11);
    const auto res = capacity(ch, 0.4, quick_opts());
    CHECK(res.c == Catch::Approx(0.4).margin(1e-3));
    CHECK(res.diagnostics.slack >= -1e-9);
}

TEST_CASE("capacity matches the closed form on the skewed modulo channel") {
    const Channel ch = testutil::mod_additive_channel(2, {0.89, 0.11});
    const auto res = capacity(ch, 0.3, quick_opts());
    CHECK(res.c == Catch::Approx(1.0 - kSkewStateEntropy + 0.3).margin(1e-2));
}

TEST_CASE("capacity adds direct bits on a noiseless state-independent channel") {
    const Channel ch = testutil::noiseless_channel();
    const auto res = capacity(ch, 0.25, quick_opts());
    CHECK(res.c == Catch::Approx(1.25).margin(1e-6));
    const auto bf = brute_force_capacity(ch, 0.25, 7);
    CHECK(bf.c == Catch::Approx(1.25).margin(1e-6));
}

TEST_CASE("rate-split path agrees on structured channels") {
    const Channel useless = testutil::random_useless_channel(2, 2, 2, 21);
    CHECK(capacity_rate_split(useless, 0.4, quick_opts()).c ==
          Catch::Approx(0.4).margin(1e-3));

    const Channel mod2 = testutil::mod_additive_channel(2, {0.89, 0.11});
    const auto env = capacity(mod2, 0.3, quick_opts());
    const auto rs = capacity_rate_split(mod2, 0.3, quick_opts());
    CHECK(std::abs(env.c - rs.c) <= 2e-2);

    // rh = 0 forces the single grid point at the boundary
    const auto rs0 = capacity_rate_split(mod2, 0.0, quick_opts());
    CHECK(rs0.c == Catch::Approx(1.0 - kSkewStateEntropy).margin(1e-6));
    CHECK(rs0.rh == 0.0);
}

TEST_CASE("brute force handles the tiny oracle cases") {
    const Channel useless = testutil::random_useless_channel(2, 2, 2, 31);
    CHECK(brute_force_capacity(useless, 0.5, 7).c == Catch::Approx(0.5).margin(1e-9));
    const Channel mod2 = testutil::mod_additive_channel(2, {0.5, 0.5});
    CHECK(brute_force_capacity(mod2, 0.2, 7).c == Catch::Approx(0.2).margin(1e-9));
}

TEST_CASE("brute force rejects oversized instances") {
    const Channel big = testutil::random_channel(3, 2, 2, 1);
    try {
        brute_force_capacity(big, 0.2, 7);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooLarge);
    }
}

TEST_CASE("capacity stays within its structural bounds") {
    for (std::uint64_t seed = 50; seed < 54; ++seed) {
        const Channel ch = testutil::random_channel(2, 2, 2, seed);
        OptimOptions opts = quick_opts(seed);
        const double rh = 0.35;
        const auto res = capacity(ch, rh, opts);
        CHECK(res.c >= rh - 1e-9);
        CHECK(res.c <= std::log2(ch.y_size()) + rh + 1e-9);
        // feasible no-mixing point at budget 0 is a floor
        const GPoint g0 = inner_g(ch, opts.effective_u_size(ch), 0.0,
                                  [&] {
                                      OptimOptions o = opts;
                                      o.seed = derive_seed(opts.seed, 0);
                                      return o;
                                  }());
        CHECK(res.c >= rh + g0.g - 1e-9);
    }
}

TEST_CASE("returned policies replay to the reported value") {
    for (std::uint64_t seed = 60; seed < 64; ++seed) {
        const Channel ch = testutil::random_channel(2, 2, 2, seed);
        const auto res = capacity(ch, 0.3, quick_opts(seed));
        const auto mi = mi_pair(build_joint(ch, res.policy));
        CHECK(mi.i_uy_given_v - mi.i_us_given_v + res.rh ==
              Catch::Approx(res.c).margin(1e-9));
        CHECK(res.rh - mi.i_us_given_v >= -1e-9);
    }
}

TEST_CASE("sweep reuses the grid and produces a clean curve") {
    const Channel ch = testutil::mod_additive_channel(2, {0.89, 0.11});
    std::vector<double> rhs;
    for (int i = 0; i <= 10; ++i) rhs.push_back(1.5 * i / 10.0);
    const auto curve = sweep(ch, rhs, quick_opts());
    REQUIRE(curve.size() == rhs.size());
    for (std::size_t i = 1; i < curve.size(); ++i)
        CHECK(curve[i].c >= curve[i - 1].c - 1e-7);
    for (std::size_t i = 1; i + 1 < curve.size(); ++i)
        CHECK(curve[i + 1].c - 2 * curve[i].c + curve[i - 1].c <= 1e-6);
    // description surplus is flat in the budget on modulo channels
    for (const auto& res : curve)
        CHECK(res.c - res.rh == Catch::Approx(1.0 - kSkewStateEntropy).margin(1e-2));
}

TEST_CASE("sweep is the identity on useless channels") {
    const Channel ch = testutil::random_useless_channel(2, 2, 2, 41);
    const auto curve = sweep(ch, {0.0, 0.5, 1.0}, quick_opts());
    for (const auto& res : curve) CHECK(res.c == Catch::Approx(res.rh).margin(1e-3));
}

TEST_CASE("optimizer runs are deterministic across worker counts") {
    const Channel ch = testutil::random_channel(2, 2, 2, 99);
    OptimOptions serial = quick_opts(7);
    serial.jobs = 1;
    OptimOptions wide = quick_opts(7);
    wide.jobs = 4;
    const auto a = capacity(ch, 0.3, serial);
    const auto b = capacity(ch, 0.3, wide);
    CHECK(a.c == b.c);
    CHECK(a.policy.q_v == b.policy.q_v);
    CHECK(a.policy.phi == b.policy.phi);
}

TEST_CASE("invalid arguments are rejected") {
    const Channel ch = testutil::random_channel(2, 2, 2, 1);
    CHECK_THROWS_AS(capacity(ch, -0.1, quick_opts()), Error);
    OptimOptions bad;
    bad.restarts = 0;
    CHECK_THROWS_AS(capacity(ch, 0.1, bad), Error);
    CHECK_THROWS_AS(sweep(ch, {0.5, 0.2}, quick_opts()), Error);
}
