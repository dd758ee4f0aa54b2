#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hcap/arimoto.hpp"
#include "hcap/channel.hpp"
#include "hcap/errors.hpp"
#include "hcap/prob.hpp"
#include "hcap/rng.hpp"

namespace hcap {

enum class OracleCase { useless, mod_additive, large_help_lb, oblivious };

inline const char* oracle_case_name(OracleCase c) {
    switch (c) {
        case OracleCase::useless: return "useless";
        case OracleCase::mod_additive: return "mod_additive";
        case OracleCase::large_help_lb: return "large_help_lb";
        case OracleCase::oblivious: return "oblivious";
    }
    return "unknown";
}

struct OracleValue {
    double value = 0.0;
    OracleCase case_name = OracleCase::useless;
    bool structure_ok = false;  // structural premise verified on the channel
    bool rate_ok = false;       // rh precondition held
};

/// True iff the output law never depends on the input.
inline bool detect_useless(const Channel& ch) {
    for (int s = 0; s < ch.s_size(); ++s)
        for (int x = 1; x < ch.x_size(); ++x)
            for (int y = 0; y < ch.y_size(); ++y)
                if (std::abs(ch.trans(x, s, y) - ch.trans(0, s, y)) > kValidationTol)
                    return false;
    return true;
}

/// On a useless channel the helper's best move is to spend its whole rate on
/// message bits, so the capacity equals rh exactly.
inline OracleValue useless_capacity(double rh) {
    if (rh < 0) fail(ErrorCode::InvalidArgument, "rh must be >= 0");
    return {rh, OracleCase::useless, true, true};
}

struct ModAdditiveCheck {
    bool detected = false;
    int modulus = 0;
    std::vector<std::vector<int>> add_table;  // [x][s] -> y, the matched permutation
};

/// Detects y = (x + s) mod A exactly (point-mass rows, matching table).
inline ModAdditiveCheck detect_mod_additive(const Channel& ch) {
    ModAdditiveCheck out;
    const int a = ch.x_size();
    if (ch.s_size() != a || ch.y_size() != a) return out;
    out.add_table.assign(a, std::vector<int>(a, 0));
    for (int x = 0; x < a; ++x)
        for (int s = 0; s < a; ++s) {
            const int target = (x + s) % a;
            out.add_table[x][s] = target;
            for (int y = 0; y < a; ++y) {
                const double expect = (y == target) ? 1.0 : 0.0;
                if (std::abs(ch.trans(x, s, y) - expect) > kValidationTol) return out;
            }
        }
    out.detected = true;
    out.modulus = a;
    return out;
}

inline OracleValue mod_additive_capacity(const Channel& ch, double rh) {
    if (rh < 0) fail(ErrorCode::InvalidArgument, "rh must be >= 0");
    const auto check = detect_mod_additive(ch);
    if (!check.detected)
        fail(ErrorCode::NotModAdditive, "channel is not a modulo-additive table");
    const double value = std::log2(static_cast<double>(check.modulus)) -
                         ch.state_entropy() + rh;
    return {value, OracleCase::mod_additive, true, true};
}

/// Exact I(X,S;Y) for a given conditional input law, plus its chain-rule
/// decomposition I(X;Y|S) + I(S;Y).
struct XsyDecomposition {
    double i_xsy = 0.0;
    double i_xy_given_s = 0.0;
    double i_sy = 0.0;
};

inline XsyDecomposition xsy_information(const Channel& ch,
                                        const std::vector<std::vector<double>>& q_x_given_s) {
    const int X = ch.x_size(), S = ch.s_size(), Y = ch.y_size();
    std::vector<double> p_y(Y, 0.0);
    std::vector<double> p_sy(static_cast<std::size_t>(S) * Y, 0.0);
    double h_y_given_xs = 0.0;
    for (int s = 0; s < S; ++s)
        for (int x = 0; x < X; ++x) {
            const double mass = ch.q_s()[s] * q_x_given_s[s][x];
            if (mass == 0.0) continue;
            double h_row = 0.0;
            for (int y = 0; y < Y; ++y) {
                const double w = ch.trans(x, s, y);
                p_y[y] += mass * w;
                p_sy[s * Y + y] += mass * w;
                h_row -= plog2p(w);
            }
            h_y_given_xs += mass * h_row;
        }
    XsyDecomposition out;
    const double h_y = entropy_unchecked(p_y);
    out.i_xsy = h_y - h_y_given_xs;
    double h_y_given_s = 0.0;
    for (int s = 0; s < S; ++s) {
        const double ps = ch.q_s()[s];
        if (ps == 0.0) continue;
        double h = 0.0;
        for (int y = 0; y < Y; ++y) {
            const double cond = p_sy[s * Y + y] / ps;
            h -= plog2p(cond);
        }
        h_y_given_s += ps * h;
    }
    out.i_xy_given_s = h_y_given_s - h_y_given_xs;
    out.i_sy = h_y - h_y_given_s;
    return out;
}

struct LargeHelpBound {
    OracleValue bound;        // max I(X,S;Y) - H(S) + rh
    double strong_term = 0.0; // max I(X,S;Y) found
    double weak_bound = 0.0;  // oblivious baseline + (rh - H(S))
    std::vector<std::vector<double>> q_x_given_s;
};

/// Lower bound on the large-rate capacity obtained by revealing the state:
/// max over Q_{X|S} of I(X,S;Y) - H(S) + rh, valid whenever rh >= H(S).
/// Reported as a bound, never as the capacity.
inline LargeHelpBound large_help_lower_bound(const Channel& ch, double rh, int restarts = 16,
                                             int max_iters = 2000, std::uint64_t seed = 0) {
    const double hs = ch.state_entropy();
    if (rh < hs - kValidationTol)
        fail(ErrorCode::RhTooSmall, "requires rh >= H(S)");
    const int X = ch.x_size(), S = ch.s_size(), Y = ch.y_size();
    const auto baseline = oblivious_baseline(ch, 1e-9, 500000);

    auto objective = [&](const std::vector<std::vector<double>>& q) {
        return xsy_information(ch, q).i_xsy;
    };
    // Gradient of I(X,S;Y) in q(x|s), bits.
    auto gradient = [&](const std::vector<std::vector<double>>& q,
                        std::vector<std::vector<double>>& grad) {
        std::vector<double> p_y(Y, 0.0);
        for (int s = 0; s < S; ++s)
            for (int x = 0; x < X; ++x) {
                const double mass = ch.q_s()[s] * q[s][x];
                if (mass == 0.0) continue;
                for (int y = 0; y < Y; ++y) p_y[y] += mass * ch.trans(x, s, y);
            }
        constexpr double inv_ln2 = 1.4426950408889634;
        for (int s = 0; s < S; ++s)
            for (int x = 0; x < X; ++x) {
                double acc = 0.0, h_row = 0.0;
                for (int y = 0; y < Y; ++y) {
                    const double w = ch.trans(x, s, y);
                    if (w == 0.0) continue;
                    const double py = std::max(p_y[y], 1e-300);
                    acc -= w * std::log2(py);
                    h_row -= plog2p(w);
                }
                grad[s][x] = ch.q_s()[s] * (acc - inv_ln2 - h_row);
            }
    };

    std::vector<std::vector<double>> best_q = baseline.q_x_given_s;
    double best_val = objective(best_q);
    for (int start = 0; start < restarts; ++start) {
        std::vector<std::vector<double>> q(S, std::vector<double>(X, 1.0 / X));
        if (start == 0) {
            q = baseline.q_x_given_s;  // per-state capacity inputs
        } else if (start > 1) {
            std::mt19937_64 rng(derive_seed(seed, start));
            for (int s = 0; s < S; ++s) q[s] = random_simplex(rng, X);
        }
        std::vector<std::vector<double>> grad(S, std::vector<double>(X, 0.0));
        double step = 0.1, f = objective(q);
        for (int it = 0; it < max_iters; ++it) {
            gradient(q, grad);
            bool improved = false;
            while (step >= 1e-11) {
                auto trial = q;
                for (int s = 0; s < S; ++s) {
                    for (int x = 0; x < X; ++x) trial[s][x] += step * grad[s][x];
                    project_to_simplex(trial[s]);
                }
                const double f_try = objective(trial);
                if (f_try > f + 1e-14) {
                    q = std::move(trial);
                    f = f_try;
                    step = std::min(step * 1.3, 2.0);
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        if (f > best_val) {
            best_val = f;
            best_q = q;
        }
    }

    LargeHelpBound out;
    out.strong_term = best_val;
    out.weak_bound = baseline.value + (rh - hs);
    out.q_x_given_s = std::move(best_q);
    out.bound.value = best_val - hs + rh;
    out.bound.case_name = OracleCase::large_help_lb;
    out.bound.structure_ok = true;
    out.bound.rate_ok = rh >= hs - kValidationTol;
    return out;
}

}  // namespace hcap
