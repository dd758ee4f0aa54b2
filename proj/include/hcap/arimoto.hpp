#pragma once

#include <cmath>
#include <vector>

#include "hcap/channel.hpp"
#include "hcap/errors.hpp"
#include "hcap/prob.hpp"

namespace hcap {

struct BaResult {
    double capacity = 0.0;             // exact I(X;Y) at input_dist, bits
    std::vector<double> input_dist;
    int iterations = 0;
};

/// Capacity of a plain DMC by alternating maximization. Runs until the
/// standard upper/lower capacity bounds are within `tol` and returns the
/// mutual information achieved by the final input distribution.
inline BaResult dmc_capacity(const std::vector<std::vector<double>>& w, double tol = 1e-9,
                             int max_iters = 10000) {
    const int nx = static_cast<int>(w.size());
    const int ny = static_cast<int>(w[0].size());
    std::vector<double> p(nx, 1.0 / nx), q(ny), d(nx);
    int it = 0;
    for (; it < max_iters; ++it) {
        for (int y = 0; y < ny; ++y) {
            q[y] = 0.0;
            for (int x = 0; x < nx; ++x) q[y] += p[x] * w[x][y];
        }
        // d[x] = D(W(.|x) || q), in bits
        double ub = -1e300, lb_arg = 0.0;
        for (int x = 0; x < nx; ++x) {
            double dx = 0.0;
            for (int y = 0; y < ny; ++y)
                if (w[x][y] > 0.0) dx += w[x][y] * std::log2(w[x][y] / q[y]);
            d[x] = dx;
            ub = std::max(ub, dx);
            lb_arg += p[x] * std::exp2(dx);
        }
        const double lb = std::log2(lb_arg);
        if (ub - lb <= tol) break;
        double norm = 0.0;
        for (int x = 0; x < nx; ++x) {
            p[x] *= std::exp2(d[x]);
            norm += p[x];
        }
        for (int x = 0; x < nx; ++x) p[x] /= norm;
    }
    if (it >= max_iters)
        fail(ErrorCode::ConvergenceFailure, "alternating maximization did not converge");

    BaResult res;
    double mi = 0.0;
    for (int x = 0; x < nx; ++x) mi += p[x] * d[x];
    res.capacity = std::max(0.0, mi);
    res.input_dist = std::move(p);
    res.iterations = it;
    return res;
}

struct ObliviousBaseline {
    double value = 0.0;                              // sum_s q_s(s) C_s, bits
    std::vector<double> per_state;                   // C_s
    std::vector<std::vector<double>> q_x_given_s;    // achieving inputs, [s][x]
};

/// Capacity with the state known to encoder and decoder but no
/// message-dependent help: max over Q_{X|S} of I(X;Y|S). The problem is
/// concave per state, so the per-state decomposition is exact.
inline ObliviousBaseline oblivious_baseline(const Channel& ch, double tol = 1e-9,
                                            int max_iters = 10000) {
    ObliviousBaseline out;
    out.per_state.resize(ch.s_size());
    out.q_x_given_s.resize(ch.s_size());
    for (int s = 0; s < ch.s_size(); ++s) {
        std::vector<std::vector<double>> w_s(ch.x_size());
        for (int x = 0; x < ch.x_size(); ++x) w_s[x] = ch.row(x, s);
        BaResult ba = dmc_capacity(w_s, tol, max_iters);
        out.per_state[s] = ba.capacity;
        out.q_x_given_s[s] = std::move(ba.input_dist);
        out.value += ch.q_s()[s] * out.per_state[s];
    }
    return out;
}

}  // namespace hcap
