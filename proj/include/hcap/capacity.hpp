#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hcap/channel.hpp"
#include "hcap/envelope.hpp"
#include "hcap/errors.hpp"
#include "hcap/inner.hpp"
#include "hcap/policy.hpp"

namespace hcap {

enum class Method { envelope, rate_split, brute_force };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::envelope: return "envelope";
        case Method::rate_split: return "rate_split";
        case Method::brute_force: return "brute_force";
    }
    return "unknown";
}

struct CapacityDiagnostics {
    int restarts_used = 0;
    double slack = 0.0;  // rh - I(U;S|V) on the returned policy
    std::vector<EnvelopeSupport> support;
};

struct CapacityResult {
    double rh = 0.0;
    double c = 0.0;
    AuxiliaryPolicy policy;
    double r0 = 0.0;  // implied direct-information rate rh - I(U;S|V)
    Method method = Method::envelope;
    CapacityDiagnostics diagnostics;
};

namespace detail {

inline std::vector<double> budget_grid(double hs, int size, std::vector<double> extras) {
    std::vector<double> grid;
    if (hs <= 0.0) {
        grid.push_back(0.0);
        return grid;
    }
    if (size < 2) size = 2;
    for (int i = 0; i < size; ++i) grid.push_back(hs * i / (size - 1));
    for (double e : extras)
        if (e > 0.0 && e < hs) grid.push_back(e);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

struct GridSolve {
    std::vector<GPoint> points;
    int starts_used = 0;
};

// Solves the inner problem at every budget on the grid. Larger budgets can
// only enlarge the feasible set, so any achiever found at a smaller budget is
// carried forward when the local solve came out worse.
inline GridSolve solve_grid(const Channel& ch, int u_size, const std::vector<double>& grid,
                            InnerObjective kind, const OptimOptions& opts) {
    GridSolve out;
    out.points.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        auto res = inner_solve(ch, u_size, grid[j], kind, opts, derive_seed(opts.seed, j));
        GPoint pt;
        pt.r = grid[j];
        pt.g = res.best.value;
        pt.i_uy = res.best.i_uy;
        pt.i_us = res.best.i_us;
        pt.slack = grid[j] - res.best.i_us;
        pt.phi = res.best.phi;
        pt.q_u_given_s.resize(ch.s_size());
        for (int s = 0; s < ch.s_size(); ++s)
            pt.q_u_given_s[s].assign(
                res.best.t.begin() + static_cast<std::size_t>(s) * u_size,
                res.best.t.begin() + static_cast<std::size_t>(s + 1) * u_size);
        out.points[j] = std::move(pt);
        out.starts_used += res.starts_used;
    }
    for (std::size_t j = 1; j < grid.size(); ++j) {
        if (out.points[j - 1].g > out.points[j].g) {
            GPoint carried = out.points[j - 1];
            carried.r = grid[j];
            carried.slack = grid[j] - carried.i_us;
            out.points[j] = std::move(carried);
        }
    }
    return out;
}

// Assembles the time-sharing policy named by the envelope support and
// evaluates the exact objective on it; the reported value is always the value
// of the returned policy, never bare hull arithmetic.
inline CapacityResult assemble_result(const Channel& ch, double rh, int u_size,
                                      const std::vector<GPoint>& points, const Envelope& env,
                                      Method method, int starts_used) {
    CapacityResult res;
    res.method = method;
    res.rh = rh;
    res.diagnostics.restarts_used = starts_used;
    res.diagnostics.support = env.support;

    AuxiliaryPolicy pol;
    pol.v_size = static_cast<int>(env.support.size());
    pol.u_size = u_size;
    for (const auto& sp : env.support) {
        const GPoint& pt = points[sp.point_index];
        pol.q_v.push_back(sp.weight);
        pol.q_u_given_sv.push_back(pt.q_u_given_s);
        pol.phi.push_back(pt.phi);
    }
    const JointDistribution joint = build_joint(ch, pol);
    const MiPair mi = mi_pair(joint);
    res.c = mi.i_uy_given_v - mi.i_us_given_v + rh;
    res.r0 = std::clamp(rh - mi.i_us_given_v, 0.0, rh);
    res.diagnostics.slack = rh - mi.i_us_given_v;
    res.policy = std::move(pol);
    return res;
}

}  // namespace detail

/// C(rh): best assisted rate via the inner maximization plus the time-sharing
/// envelope. Returns the value achieved by the assembled policy, a certified
/// feasible lower bound of the true maximum.
inline CapacityResult capacity(const Channel& ch, double rh, const OptimOptions& opts = {}) {
    opts.validate();
    if (rh < 0 || !std::isfinite(rh)) fail(ErrorCode::InvalidArgument, "rh must be >= 0");
    const int u_size = opts.effective_u_size(ch);
    const double hs = ch.state_entropy();
    const auto grid = detail::budget_grid(hs, opts.r_grid_size, {rh});
    auto solved = detail::solve_grid(ch, u_size, grid, detail::InnerObjective::surplus, opts);

    std::vector<std::pair<double, double>> samples;
    for (const auto& pt : solved.points) samples.emplace_back(pt.r, pt.g);
    const Envelope env = concave_envelope(samples, std::min(rh, hs));
    return detail::assemble_result(ch, rh, u_size, solved.points, env, Method::envelope,
                                   solved.starts_used);
}

/// Independent computation path: split the helper rate into a direct part R0
/// and a state-description part, maximize I(U;Y) under the reduced budget,
/// and take the best split. Must agree with capacity() up to solver tolerance.
inline CapacityResult capacity_rate_split(const Channel& ch, double rh,
                                          const OptimOptions& opts = {}) {
    opts.validate();
    if (rh < 0 || !std::isfinite(rh)) fail(ErrorCode::InvalidArgument, "rh must be >= 0");
    const int u_size = opts.effective_u_size(ch);
    const double hs = ch.state_entropy();

    std::vector<double> r0_grid;
    const int n0 = std::max(2, opts.r_grid_size);
    if (rh == 0.0) {
        r0_grid.push_back(0.0);
    } else {
        for (int i = 0; i < n0; ++i) r0_grid.push_back(rh * i / (n0 - 1));
    }
    std::vector<double> queries;
    for (double r0 : r0_grid) queries.push_back(std::clamp(rh - r0, 0.0, hs));

    const auto grid = detail::budget_grid(hs, opts.r_grid_size, queries);
    auto solved = detail::solve_grid(ch, u_size, grid, detail::InnerObjective::throughput, opts);

    std::vector<std::pair<double, double>> samples;
    for (const auto& pt : solved.points) samples.emplace_back(pt.r, pt.g);

    double best_total = -1e300;
    std::size_t best_idx = 0;
    Envelope best_env;
    for (std::size_t i = 0; i < r0_grid.size(); ++i) {
        Envelope env = concave_envelope(samples, queries[i]);
        const double total = env.value_at + r0_grid[i];
        if (total > best_total) {
            best_total = total;
            best_idx = i;
            best_env = std::move(env);
        }
    }
    (void)best_idx;
    CapacityResult res = detail::assemble_result(ch, rh, u_size, solved.points, best_env,
                                                 Method::rate_split, solved.starts_used);
    res.method = Method::rate_split;
    return res;
}

/// Exhaustive lattice search over the auxiliary kernel and every map, with the
/// same envelope step. A certified lower bound at known lattice resolution;
/// usable as an oracle on tiny instances only.
inline CapacityResult brute_force_capacity(const Channel& ch, double rh, int grid_levels,
                                           int u_size = 3) {
    if (rh < 0 || !std::isfinite(rh)) fail(ErrorCode::InvalidArgument, "rh must be >= 0");
    if (ch.x_size() > 2 || ch.s_size() > 2 || ch.y_size() > 2)
        fail(ErrorCode::TooLarge, "brute force handles |X|,|S|,|Y| <= 2");
    if (u_size < 1 || u_size > 3) fail(ErrorCode::TooLarge, "brute force handles u_size <= 3");
    if (grid_levels < 2 || grid_levels > 9)
        fail(ErrorCode::TooLarge, "grid_levels must be in [2, 9]");

    const int S = ch.s_size(), X = ch.x_size(), U = u_size;
    const double hs = ch.state_entropy();
    const auto grid = detail::budget_grid(hs, 33, {rh});

    // Every deterministic map.
    std::vector<std::vector<int>> phis;
    {
        std::vector<int> phi(U, 0);
        while (true) {
            phis.push_back(phi);
            int pos = U - 1;
            while (pos >= 0 && ++phi[pos] == X) phi[pos--] = 0;
            if (pos < 0) break;
        }
    }
    const auto rows = detail::lattice_rows(U, grid_levels);
    const int n_rows = static_cast<int>(rows.size());

    std::vector<detail::InnerCandidate> slots(grid.size());
    detail::KernelWork work;
    std::vector<double> t(static_cast<std::size_t>(S) * U);
    int order = 0;
    for (const auto& phi : phis) {
        std::vector<int> combo(S, 0);
        while (true) {
            for (int s = 0; s < S; ++s)
                std::copy(rows[combo[s]].begin(), rows[combo[s]].end(),
                          t.begin() + static_cast<std::size_t>(s) * U);
            const KernelMi mi = kernel_mi(ch, U, t, phi, &work);
            detail::InnerCandidate cand;
            cand.value = mi.i_uy - mi.i_us;
            cand.i_uy = mi.i_uy;
            cand.i_us = mi.i_us;
            cand.phi = phi;
            cand.order = order++;
            cand.valid = true;
            for (std::size_t j = 0; j < grid.size(); ++j) {
                if (mi.i_us <= grid[j] && detail::candidate_better(cand, slots[j])) {
                    if (cand.t.empty()) cand.t = t;
                    slots[j] = cand;
                }
            }
            int pos = S - 1;
            while (pos >= 0 && ++combo[pos] == n_rows) combo[pos--] = 0;
            if (pos < 0) break;
        }
    }

    std::vector<GPoint> points(grid.size());
    std::vector<std::pair<double, double>> samples;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!slots[j].valid)
            fail(ErrorCode::NumericalFailure, "no feasible lattice candidate at a grid budget");
        GPoint pt;
        pt.r = grid[j];
        pt.g = slots[j].value;
        pt.i_uy = slots[j].i_uy;
        pt.i_us = slots[j].i_us;
        pt.slack = grid[j] - slots[j].i_us;
        pt.phi = slots[j].phi;
        pt.q_u_given_s.resize(S);
        for (int s = 0; s < S; ++s)
            pt.q_u_given_s[s].assign(slots[j].t.begin() + static_cast<std::size_t>(s) * U,
                                     slots[j].t.begin() + static_cast<std::size_t>(s + 1) * U);
        samples.emplace_back(pt.r, pt.g);
        points[j] = std::move(pt);
    }
    const Envelope env = concave_envelope(samples, std::min(rh, hs));
    const int evaluated = static_cast<int>(phis.size()) * static_cast<int>(std::pow(n_rows, S));
    return detail::assemble_result(ch, rh, u_size, points, env, Method::brute_force, evaluated);
}

/// Capacity at several budgets with the inner grid solved once and reused.
inline std::vector<CapacityResult> sweep(const Channel& ch, const std::vector<double>& rh_values,
                                         const OptimOptions& opts = {}) {
    opts.validate();
    if (rh_values.empty()) fail(ErrorCode::InvalidArgument, "empty rh list");
    for (std::size_t i = 0; i < rh_values.size(); ++i) {
        if (rh_values[i] < 0 || !std::isfinite(rh_values[i]))
            fail(ErrorCode::InvalidArgument, "rh values must be >= 0");
        if (i > 0 && rh_values[i] < rh_values[i - 1])
            fail(ErrorCode::InvalidArgument, "rh values must be sorted ascending");
    }
    const int u_size = opts.effective_u_size(ch);
    const double hs = ch.state_entropy();
    const auto grid = detail::budget_grid(hs, opts.r_grid_size, rh_values);
    auto solved = detail::solve_grid(ch, u_size, grid, detail::InnerObjective::surplus, opts);

    std::vector<std::pair<double, double>> samples;
    for (const auto& pt : solved.points) samples.emplace_back(pt.r, pt.g);

    std::vector<CapacityResult> out;
    out.reserve(rh_values.size());
    for (double rh : rh_values) {
        const Envelope env = concave_envelope(samples, std::min(rh, hs));
        out.push_back(detail::assemble_result(ch, rh, u_size, solved.points, env,
                                              Method::envelope, solved.starts_used));
    }
    return out;
}

}  // namespace hcap
