#pragma once

#include <array>
#include <vector>

#include "hcap/channel.hpp"
#include "hcap/errors.hpp"
#include "hcap/prob.hpp"

namespace hcap {

/// One candidate solution of the helper-assisted capacity problem: a
/// time-sharing law q_v, per-branch auxiliary kernels q_{U|S,V}, and a
/// per-branch deterministic input map phi: U -> X.
struct AuxiliaryPolicy {
    int v_size = 1;
    int u_size = 1;
    std::vector<double> q_v;                                // [v]
    std::vector<std::vector<std::vector<double>>> q_u_given_sv;  // [v][s][u]
    std::vector<std::vector<int>> phi;                      // [v][u] -> x
};

inline void validate_policy(const AuxiliaryPolicy& pol, const Channel& ch) {
    if (pol.v_size < 1 || pol.v_size > 3)
        fail(ErrorCode::SizeOutOfRange, "v_size must be in {1,2,3}");
    const int u_max = ch.x_size() * ch.s_size() + 1;
    if (pol.u_size < 1 || pol.u_size > u_max)
        fail(ErrorCode::SizeOutOfRange, "u_size must be in [1, |X||S|+1]");
    if (static_cast<int>(pol.q_v.size()) != pol.v_size ||
        static_cast<int>(pol.q_u_given_sv.size()) != pol.v_size ||
        static_cast<int>(pol.phi.size()) != pol.v_size)
        fail(ErrorCode::DimensionMismatch, "policy arrays must have v_size entries");
    if (!is_prob_vector(pol.q_v)) fail(ErrorCode::NotADistribution, "q_v");
    for (int v = 0; v < pol.v_size; ++v) {
        if (static_cast<int>(pol.q_u_given_sv[v].size()) != ch.s_size())
            fail(ErrorCode::DimensionMismatch, "q_u_given_sv[v] must have s_size rows");
        for (int s = 0; s < ch.s_size(); ++s) {
            const auto& row = pol.q_u_given_sv[v][s];
            if (static_cast<int>(row.size()) != pol.u_size)
                fail(ErrorCode::DimensionMismatch, "q_u_given_sv rows must have u_size entries");
            if (!is_prob_vector(row)) fail(ErrorCode::NotADistribution, "q_u_given_sv row");
        }
        if (static_cast<int>(pol.phi[v].size()) != pol.u_size)
            fail(ErrorCode::DimensionMismatch, "phi[v] must have u_size entries");
        for (int u = 0; u < pol.u_size; ++u)
            if (pol.phi[v][u] < 0 || pol.phi[v][u] >= ch.x_size())
                fail(ErrorCode::DimensionMismatch, "phi value outside the input alphabet");
    }
}

/// Dense joint law on V x U x S x X x Y.
struct JointDistribution {
    std::array<int, 5> dims{};  // v, u, s, x, y
    std::vector<double> p;

    double& at(int v, int u, int s, int x, int y) { return p[index(v, u, s, x, y)]; }
    double at(int v, int u, int s, int x, int y) const { return p[index(v, u, s, x, y)]; }

    std::size_t index(int v, int u, int s, int x, int y) const {
        return (((static_cast<std::size_t>(v) * dims[1] + u) * dims[2] + s) * dims[3] + x) *
                   dims[4] + y;
    }

    double total() const {
        double sum = 0.0;
        for (double v : p) sum += v;
        return sum;
    }

    /// Marginal over the axes flagged in `keep` (axis order v,u,s,x,y preserved).
    std::vector<double> marginal(const std::array<bool, 5>& keep) const {
        std::size_t out_size = 1;
        for (int a = 0; a < 5; ++a)
            if (keep[a]) out_size *= dims[a];
        std::vector<double> out(out_size, 0.0);
        std::array<int, 5> idx{};
        for (std::size_t flat = 0; flat < p.size(); ++flat) {
            std::size_t rem = flat;
            for (int a = 4; a >= 0; --a) {
                idx[a] = static_cast<int>(rem % dims[a]);
                rem /= dims[a];
            }
            std::size_t o = 0;
            for (int a = 0; a < 5; ++a)
                if (keep[a]) o = o * dims[a] + idx[a];
            out[o] += p[flat];
        }
        return out;
    }
};

/// The two mutual-information terms of the assisted-capacity objective.
struct MiPair {
    double i_uy_given_v = 0.0;
    double i_us_given_v = 0.0;
};

/// Expands q_v(v) q_s(s) q_{U|S,V}(u|s,v) [x = phi(v,u)] w(y|x,s) into a
/// dense joint distribution.
inline JointDistribution build_joint(const Channel& ch, const AuxiliaryPolicy& pol) {
    validate_policy(pol, ch);
    JointDistribution j;
    j.dims = {pol.v_size, pol.u_size, ch.s_size(), ch.x_size(), ch.y_size()};
    j.p.assign(static_cast<std::size_t>(pol.v_size) * pol.u_size * ch.s_size() *
                   ch.x_size() * ch.y_size(),
               0.0);
    for (int v = 0; v < pol.v_size; ++v)
        for (int u = 0; u < pol.u_size; ++u) {
            const int x = pol.phi[v][u];
            for (int s = 0; s < ch.s_size(); ++s) {
                const double base = pol.q_v[v] * ch.q_s()[s] * pol.q_u_given_sv[v][s][u];
                if (base == 0.0) continue;
                for (int y = 0; y < ch.y_size(); ++y)
                    j.at(v, u, s, x, y) = base * ch.trans(x, s, y);
            }
        }
    return j;
}

/// Conditional mutual informations I(U;Y|V) and I(U;S|V), computed as
/// differences of marginal entropies with the 0 log 0 convention.
inline MiPair mi_pair(const JointDistribution& j) {
    const double h_v = entropy_unchecked(j.marginal({true, false, false, false, false}));
    const double h_uv = entropy_unchecked(j.marginal({true, true, false, false, false}));
    const double h_sv = entropy_unchecked(j.marginal({true, false, true, false, false}));
    const double h_yv = entropy_unchecked(j.marginal({true, false, false, false, true}));
    const double h_usv = entropy_unchecked(j.marginal({true, true, true, false, false}));
    const double h_uyv = entropy_unchecked(j.marginal({true, true, false, false, true}));
    MiPair mi;
    mi.i_uy_given_v = h_uv + h_yv - h_uyv - h_v;
    mi.i_us_given_v = h_uv + h_sv - h_usv - h_v;
    return mi;
}

}  // namespace hcap
