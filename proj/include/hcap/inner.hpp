#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "hcap/arimoto.hpp"
#include "hcap/channel.hpp"
#include "hcap/errors.hpp"
#include "hcap/parallel.hpp"
#include "hcap/prob.hpp"
#include "hcap/rng.hpp"

namespace hcap {

inline constexpr double kFeasTol = 1e-9;

struct OptimOptions {
    int r_grid_size = 33;
    int restarts = 64;
    int max_iters = 5000;
    double step_init = 0.1;
    std::vector<double> penalty_schedule{1.0, 10.0, 100.0, 1000.0};
    int phi_enum_cap = 4096;
    std::uint64_t seed = 0;
    // Plumbing beyond the core knobs.
    int u_size = 0;          // 0 means |X||S|+1
    int lattice_levels = 7;  // resolution of the coarse seeding lattice
    int jobs = 1;

    void validate() const {
        if (r_grid_size < 1 || restarts < 1 || max_iters < 1 || step_init <= 0 ||
            penalty_schedule.empty() || phi_enum_cap < 1 || u_size < 0 ||
            lattice_levels < 2 || jobs < 1)
            fail(ErrorCode::InvalidArgument, "optimizer options must be positive");
        for (double p : penalty_schedule)
            if (p <= 0) fail(ErrorCode::InvalidArgument, "penalty multipliers must be positive");
    }

    int effective_u_size(const Channel& ch) const {
        const int u_max = ch.x_size() * ch.s_size() + 1;
        const int u = (u_size == 0) ? u_max : u_size;
        if (u < 1 || u > u_max)
            fail(ErrorCode::InvalidArgument, "u_size must be in [1, |X||S|+1]");
        return u;
    }
};

/// One sample of the inner value function: the best I(U;Y) - I(U;S) found at
/// state-description budget r, together with the achieving kernel and map.
struct GPoint {
    double r = 0.0;
    double g = 0.0;
    std::vector<std::vector<double>> q_u_given_s;  // [s][u]
    std::vector<int> phi;                          // [u] -> x
    double slack = 0.0;                            // r - I(U;S) at the optimum
    double i_uy = 0.0;
    double i_us = 0.0;
};

struct KernelMi {
    double i_uy = 0.0;
    double i_us = 0.0;
};

namespace detail {

// log2 with clamping; keeps boundary gradients finite.
inline double clamped_log2_ratio(double num, double den) {
    if (num <= 0.0 || den <= 0.0) return num <= 0.0 ? -40.0 : 40.0;
    return std::clamp(std::log2(num / den), -40.0, 40.0);
}

struct KernelWork {
    std::vector<double> m_u;    // marginal of U
    std::vector<double> p_uy;   // joint of (U, Y), row-major [u][y]
    std::vector<double> q_y;    // marginal of Y
};

}  // namespace detail

/// I(U;Y) and I(U;S) for the single-branch joint
/// q_s(s) t(u|s) [x = phi(u)] w(y|x,s), as algebraic functionals of the
/// kernel entries t[s*u_size + u]. Rows of t need not be normalized, which
/// makes the expressions differentiable coordinate-wise.
inline KernelMi kernel_mi(const Channel& ch, int u_size, const std::vector<double>& t,
                          const std::vector<int>& phi, detail::KernelWork* work = nullptr) {
    const int S = ch.s_size(), U = u_size, Y = ch.y_size();
    detail::KernelWork local;
    detail::KernelWork& w = work ? *work : local;
    w.m_u.assign(U, 0.0);
    w.p_uy.assign(static_cast<std::size_t>(U) * Y, 0.0);
    w.q_y.assign(Y, 0.0);
    const auto& qs = ch.q_s();

    for (int s = 0; s < S; ++s) {
        if (qs[s] == 0.0) continue;
        for (int u = 0; u < U; ++u) {
            const double mass = qs[s] * t[s * U + u];
            if (mass == 0.0) continue;
            w.m_u[u] += mass;
            const auto& row = ch.row(phi[u], s);
            for (int y = 0; y < Y; ++y) w.p_uy[u * Y + y] += mass * row[y];
        }
    }
    for (int u = 0; u < U; ++u)
        for (int y = 0; y < Y; ++y) w.q_y[y] += w.p_uy[u * Y + y];

    KernelMi mi;
    for (int s = 0; s < S; ++s) {
        if (qs[s] == 0.0) continue;
        for (int u = 0; u < U; ++u) {
            const double mass = qs[s] * t[s * U + u];
            if (mass > 0.0) mi.i_us += mass * std::log2(t[s * U + u] / w.m_u[u]);
        }
    }
    for (int u = 0; u < U; ++u)
        for (int y = 0; y < Y; ++y) {
            const double p = w.p_uy[u * Y + y];
            if (p > 0.0) mi.i_uy += p * std::log2(p / (w.m_u[u] * w.q_y[y]));
        }
    if (!std::isfinite(mi.i_uy) || !std::isfinite(mi.i_us))
        fail(ErrorCode::NumericalFailure, "mutual information became non-finite");
    return mi;
}

/// Analytic gradients of the two mutual informations in the kernel entries,
/// in bits, matching central finite differences of kernel_mi.
inline KernelMi kernel_mi_grads(const Channel& ch, int u_size, const std::vector<double>& t,
                                const std::vector<int>& phi, std::vector<double>& grad_uy,
                                std::vector<double>& grad_us,
                                detail::KernelWork* work = nullptr) {
    const int S = ch.s_size(), U = u_size, Y = ch.y_size();
    detail::KernelWork local;
    detail::KernelWork& w = work ? *work : local;
    KernelMi mi = kernel_mi(ch, u_size, t, phi, &w);
    grad_uy.assign(static_cast<std::size_t>(S) * U, 0.0);
    grad_us.assign(static_cast<std::size_t>(S) * U, 0.0);
    const auto& qs = ch.q_s();
    constexpr double inv_ln2 = 1.4426950408889634;  // 1/ln 2

    for (int s = 0; s < S; ++s) {
        if (qs[s] == 0.0) continue;
        for (int u = 0; u < U; ++u) {
            grad_us[s * U + u] = qs[s] * detail::clamped_log2_ratio(t[s * U + u], w.m_u[u]);
            const auto& row = ch.row(phi[u], s);
            double acc = 0.0;
            for (int y = 0; y < Y; ++y) {
                if (row[y] == 0.0) continue;
                acc += row[y] *
                       detail::clamped_log2_ratio(w.p_uy[u * Y + y], w.m_u[u] * w.q_y[y]);
            }
            grad_uy[s * U + u] = qs[s] * (acc - inv_ln2);
        }
    }
    return mi;
}

/// I(U;S) alone; the cheap evaluation used by the feasibility polish.
inline double kernel_i_us(const Channel& ch, int u_size, const std::vector<double>& t) {
    const int S = ch.s_size(), U = u_size;
    const auto& qs = ch.q_s();
    thread_local std::vector<double> m_u;
    m_u.assign(U, 0.0);
    for (int s = 0; s < S; ++s)
        for (int u = 0; u < U; ++u) m_u[u] += qs[s] * t[s * U + u];
    double i = 0.0;
    for (int s = 0; s < S; ++s) {
        if (qs[s] == 0.0) continue;
        for (int u = 0; u < U; ++u) {
            const double mass = qs[s] * t[s * U + u];
            if (mass > 0.0) i += mass * std::log2(t[s * U + u] / m_u[u]);
        }
    }
    return i;
}

namespace detail {

enum class InnerObjective {
    surplus,     // I(U;Y) - I(U;S), the budgeted description-gain problem
    throughput,  // I(U;Y), the rate-split form
};

struct InnerCandidate {
    double value = -1e300;  // objective after the feasibility polish
    double i_uy = 0.0, i_us = 0.0;
    std::vector<double> t;
    std::vector<int> phi;
    int order = 0;  // enumeration order, for deterministic tie-breaks
    bool valid = false;
};

inline bool candidate_better(const InnerCandidate& a, const InnerCandidate& b) {
    if (!b.valid) return a.valid;
    if (!a.valid) return false;
    if (a.value != b.value) return a.value > b.value;
    if (a.phi != b.phi) return a.phi < b.phi;  // lowest map in lexicographic order
    return a.order < b.order;
}

// Scales the kernel toward its own U-marginal (an independent kernel with
// I(U;S) = 0) until I(U;S) <= r. Convexity of I(U;S) along the path makes the
// feasible set an interval ending at 1, so bisection applies.
inline void polish_feasible(const Channel& ch, int U, double r, std::vector<double>& t) {
    if (kernel_i_us(ch, U, t) <= r) return;
    const int S = ch.s_size();
    std::vector<double> m_u(U, 0.0);
    for (int s = 0; s < S; ++s)
        for (int u = 0; u < U; ++u) m_u[u] += ch.q_s()[s] * t[s * U + u];
    std::vector<double> mix(t.size());
    auto blend = [&](double alpha) {
        for (int s = 0; s < S; ++s)
            for (int u = 0; u < U; ++u)
                mix[s * U + u] = (1.0 - alpha) * t[s * U + u] + alpha * m_u[u];
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        blend(mid);
        if (kernel_i_us(ch, U, mix) <= r)
            hi = mid;
        else
            lo = mid;
    }
    blend(hi);
    t = mix;
}

struct PgaScratch {
    KernelWork work;
    std::vector<double> grad_uy, grad_us, dir, trial;
};

// Projected gradient ascent with an escalating quadratic penalty on the
// budget constraint, then a feasibility polish.
inline InnerCandidate run_pga(const Channel& ch, int U, double r, InnerObjective kind,
                              const OptimOptions& opts, const std::vector<int>& phi,
                              std::vector<double> t, int order, PgaScratch& sc) {
    const int S = ch.s_size();
    const std::size_t dim = t.size();
    const int stage_budget =
        std::max(50, opts.max_iters / static_cast<int>(opts.penalty_schedule.size()));

    auto penalized = [&](const KernelMi& mi, double pen) {
        const double viol = std::max(0.0, mi.i_us - r);
        const double base = (kind == InnerObjective::surplus) ? mi.i_uy - mi.i_us : mi.i_uy;
        return base - pen * viol * viol;
    };

    for (double pen : opts.penalty_schedule) {
        double step = opts.step_init;
        KernelMi mi = kernel_mi(ch, U, t, phi, &sc.work);
        double f = penalized(mi, pen);
        int small_gain = 0;
        for (int iter = 0; iter < stage_budget; ++iter) {
            mi = kernel_mi_grads(ch, U, t, phi, sc.grad_uy, sc.grad_us, &sc.work);
            const double viol = std::max(0.0, mi.i_us - r);
            const double us_coeff =
                ((kind == InnerObjective::surplus) ? -1.0 : 0.0) - 2.0 * pen * viol;
            sc.dir.resize(dim);
            for (std::size_t i = 0; i < dim; ++i)
                sc.dir[i] = sc.grad_uy[i] + us_coeff * sc.grad_us[i];

            bool improved = false;
            double f_try = f;
            while (step >= 1e-8) {
                sc.trial.resize(dim);
                for (std::size_t i = 0; i < dim; ++i) sc.trial[i] = t[i] + step * sc.dir[i];
                for (int s = 0; s < S; ++s) project_to_simplex(sc.trial.data() + s * U, U);
                f_try = penalized(kernel_mi(ch, U, sc.trial, phi, &sc.work), pen);
                if (f_try > f + 1e-14) {
                    t = sc.trial;
                    improved = true;
                    step = std::min(step * 1.3, 2.0);
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
            small_gain = (f_try - f < 1e-11 * (1.0 + std::abs(f))) ? small_gain + 1 : 0;
            f = f_try;
            if (small_gain >= 3) break;
        }
    }

    polish_feasible(ch, U, r, t);
    const KernelMi mi = kernel_mi(ch, U, t, phi);
    InnerCandidate cand;
    cand.value = (kind == InnerObjective::surplus) ? mi.i_uy - mi.i_us : mi.i_uy;
    cand.i_uy = mi.i_uy;
    cand.i_us = mi.i_us;
    cand.t = std::move(t);
    cand.phi = phi;
    cand.order = order;
    cand.valid = std::isfinite(cand.value);
    if (!cand.valid) fail(ErrorCode::NumericalFailure, "inner objective became non-finite");
    return cand;
}

// Structured starting kernels shared by every map candidate.
inline std::vector<std::vector<double>> structured_starts(const Channel& ch, int U) {
    const int S = ch.s_size();
    std::vector<std::vector<double>> starts;
    std::vector<double> t(static_cast<std::size_t>(S) * U, 1.0 / U);
    starts.push_back(t);  // uniform, independent of the state
    const int front = std::min(U, ch.x_size());
    std::fill(t.begin(), t.end(), 0.0);
    for (int s = 0; s < S; ++s)
        for (int u = 0; u < front; ++u) t[s * U + u] = 1.0 / front;
    starts.push_back(t);  // uniform on the first |X| symbols, state-independent
    std::fill(t.begin(), t.end(), 0.0);
    for (int s = 0; s < S; ++s) t[s * U + (s % U)] = 1.0;
    starts.push_back(t);  // copy kernel
    return starts;
}

inline std::vector<std::vector<int>> phi_candidates(const Channel& ch, int U,
                                                    const OptimOptions& opts,
                                                    std::uint64_t seed) {
    const int X = ch.x_size();
    std::vector<std::vector<int>> out;
    const double total = std::pow(static_cast<double>(X), U);
    if (total <= static_cast<double>(opts.phi_enum_cap)) {
        std::vector<int> phi(U, 0);
        while (true) {
            out.push_back(phi);
            int pos = U - 1;
            while (pos >= 0 && ++phi[pos] == X) phi[pos--] = 0;
            if (pos < 0) break;
        }
        return out;
    }
    // Too many maps: structured picks plus a deterministic random sample.
    std::set<std::vector<int>> seen;
    std::vector<int> phi(U);
    for (int u = 0; u < U; ++u) phi[u] = u % X;
    seen.insert(phi);
    std::fill(phi.begin(), phi.end(), 0);
    seen.insert(phi);
    const int want = std::clamp(opts.restarts, 16, 64) + static_cast<int>(seen.size());
    std::mt19937_64 rng(derive_seed(seed, 0xf1f1));
    std::uniform_int_distribution<int> pick(0, X - 1);
    while (static_cast<int>(seen.size()) < want) {
        for (int u = 0; u < U; ++u) phi[u] = pick(rng);
        seen.insert(phi);
    }
    out.assign(seen.begin(), seen.end());
    return out;
}

// All lattice rows with `levels` levels per coordinate on the U-simplex.
inline std::vector<std::vector<double>> lattice_rows(int U, int levels) {
    std::vector<std::vector<double>> rows;
    const int quanta = levels - 1;
    std::vector<int> counts(U, 0);
    std::vector<double> row(U);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == U - 1) {
            counts[pos] = remaining;
            for (int u = 0; u < U; ++u) row[u] = static_cast<double>(counts[u]) / quanta;
            rows.push_back(row);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[pos] = c;
            self(self, pos + 1, remaining - c);
        }
    };
    rec(rec, 0, quanta);
    return rows;
}

struct InnerSolveResult {
    InnerCandidate best;
    int starts_used = 0;
};

// Best value of the chosen objective subject to I(U;S) <= r, over the
// auxiliary kernel and the deterministic map. Deterministic given the seed;
// candidate tasks are independent and may run on several threads.
inline InnerSolveResult inner_solve(const Channel& ch, int u_size, double r,
                                    InnerObjective kind, const OptimOptions& opts,
                                    std::uint64_t seed) {
    if (r < 0) fail(ErrorCode::InvalidArgument, "budget must be nonnegative");
    const int S = ch.s_size(), X = ch.x_size(), U = u_size;
    if (U < 1 || U > X * S + 1)
        fail(ErrorCode::InvalidArgument, "u_size must be in [1, |X||S|+1]");

    const auto phis = phi_candidates(ch, U, opts, seed);
    const int n_phi = static_cast<int>(phis.size());
    const auto fixed_starts = structured_starts(ch, U);
    // Budget split: structured starts first, random restarts fill the rest.
    const int per_phi =
        std::clamp((opts.restarts + n_phi - 1) / n_phi, 2, 8);

    // Lattice sweep: exact rescan of a coarse grid, cheap only in tiny
    // spaces. Falls back to a coarser seeding lattice when the requested
    // resolution does not fit the evaluation budget.
    std::vector<std::vector<double>> rows;
    if (std::pow(static_cast<double>(X), U) <= static_cast<double>(opts.phi_enum_cap)) {
        rows = lattice_rows(U, opts.lattice_levels);
        if (std::pow(static_cast<double>(rows.size()), S) * n_phi > 30000.0) {
            rows = lattice_rows(U, 4);
            if (std::pow(static_cast<double>(rows.size()), S) * n_phi > 50000.0) rows.clear();
        }
    }

    struct Task {
        const std::vector<int>* phi;
        int phi_idx;
        int start_idx;  // < fixed: structured; otherwise random
    };
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(n_phi) * per_phi);
    for (int pi = 0; pi < n_phi; ++pi)
        for (int si = 0; si < per_phi; ++si) tasks.push_back({&phis[pi], pi, si});

    std::vector<InnerCandidate> slots(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), opts.jobs, [&](int i) {
        const Task& task = tasks[i];
        PgaScratch sc;
        std::vector<double> t0;
        if (task.start_idx < static_cast<int>(fixed_starts.size())) {
            t0 = fixed_starts[task.start_idx];
        } else {
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
            t0.resize(static_cast<std::size_t>(S) * U);
            for (int s = 0; s < S; ++s) {
                auto row = random_simplex(rng, U);
                std::copy(row.begin(), row.end(), t0.begin() + static_cast<std::size_t>(s) * U);
            }
        }
        slots[i] = run_pga(ch, U, r, kind, opts, *task.phi, std::move(t0), i, sc);
    });

    InnerCandidate best;
    for (const auto& cand : slots)
        if (candidate_better(cand, best)) best = cand;
    int starts_used = static_cast<int>(tasks.size());

    // State-revealing start: reveal s through U = (X, S) with per-state
    // capacity-achieving inputs. Feasible after polish at any budget and tight
    // at r = H(S). Seeding is best-effort, so a stalled baseline is skipped.
    if (U >= X * S) {
        ObliviousBaseline baseline;
        bool have_baseline = true;
        try {
            baseline = oblivious_baseline(ch, 1e-9, 200000);
        } catch (const Error&) {
            have_baseline = false;
        }
        if (have_baseline) {
            std::vector<int> phi_sr(U, 0);
            std::vector<double> t_sr(static_cast<std::size_t>(S) * U, 0.0);
            for (int x = 0; x < X; ++x)
                for (int s = 0; s < S; ++s) phi_sr[x * S + s] = x;
            for (int s = 0; s < S; ++s)
                for (int x = 0; x < X; ++x)
                    t_sr[s * U + (x * S + s)] = baseline.q_x_given_s[s][x];
            PgaScratch sc;
            auto cand = run_pga(ch, U, r, kind, opts, phi_sr, std::move(t_sr),
                                static_cast<int>(tasks.size()), sc);
            ++starts_used;
            if (candidate_better(cand, best)) best = cand;
        }
    }

    if (!rows.empty()) {
        // Raw lattice candidates keep the result comparable with the
        // exhaustive grid oracle; the best one is also polished further.
        detail::KernelWork work;
        std::vector<double> t(static_cast<std::size_t>(S) * U);
        std::vector<int> combo(S, 0);
        const int n_rows = static_cast<int>(rows.size());
        for (int pi = 0; pi < n_phi; ++pi) {
            std::fill(combo.begin(), combo.end(), 0);
            while (true) {
                for (int s = 0; s < S; ++s)
                    std::copy(rows[combo[s]].begin(), rows[combo[s]].end(),
                              t.begin() + static_cast<std::size_t>(s) * U);
                const KernelMi mi = kernel_mi(ch, U, t, phis[pi], &work);
                if (mi.i_us <= r) {
                    InnerCandidate cand;
                    cand.value =
                        (kind == InnerObjective::surplus) ? mi.i_uy - mi.i_us : mi.i_uy;
                    cand.i_uy = mi.i_uy;
                    cand.i_us = mi.i_us;
                    cand.phi = phis[pi];
                    cand.order = static_cast<int>(tasks.size()) + 1;
                    cand.valid = true;
                    if (candidate_better(cand, best)) {
                        cand.t = t;
                        best = std::move(cand);
                    }
                }
                int pos = S - 1;
                while (pos >= 0 && ++combo[pos] == n_rows) combo[pos--] = 0;
                if (pos < 0) break;
            }
        }
        if (best.valid && !best.t.empty()) {
            PgaScratch sc;
            auto cand = run_pga(ch, U, r, kind, opts, best.phi, best.t,
                                static_cast<int>(tasks.size()) + 2, sc);
            ++starts_used;
            if (candidate_better(cand, best)) best = cand;
        }
    } else if (n_phi < static_cast<int>(std::pow(static_cast<double>(X), U))) {
        // Sampled-map mode: greedy single-coordinate improvement of the best map.
        bool improved = true;
        int rounds = 0;
        PgaScratch sc;
        while (improved && rounds++ < 2 && best.valid) {
            improved = false;
            for (int u = 0; u < U; ++u) {
                for (int x = 0; x < X; ++x) {
                    if (x == best.phi[u]) continue;
                    auto phi_try = best.phi;
                    phi_try[u] = x;
                    auto cand = run_pga(ch, U, r, kind, opts, phi_try, best.t,
                                        static_cast<int>(tasks.size()) + 3, sc);
                    ++starts_used;
                    if (candidate_better(cand, best)) {
                        best = std::move(cand);
                        improved = true;
                    }
                }
            }
        }
    }

    if (!best.valid) fail(ErrorCode::NumericalFailure, "no candidate produced a finite value");
    return {std::move(best), starts_used};
}

}  // namespace detail

/// Solves max I(U;Y) - I(U;S) over the auxiliary kernel and deterministic map,
/// subject to I(U;S) <= r. The result is a certified-feasible lower bound on
/// the true value; the reported slack is never hidden.
inline GPoint inner_g(const Channel& ch, int u_size, double r, const OptimOptions& opts) {
    opts.validate();
    auto res = detail::inner_solve(ch, u_size, r, detail::InnerObjective::surplus, opts,
                                   opts.seed);
    GPoint pt;
    pt.r = r;
    pt.g = res.best.value;
    pt.i_uy = res.best.i_uy;
    pt.i_us = res.best.i_us;
    pt.slack = r - res.best.i_us;
    pt.phi = res.best.phi;
    pt.q_u_given_s.resize(ch.s_size());
    for (int s = 0; s < ch.s_size(); ++s)
        pt.q_u_given_s[s].assign(res.best.t.begin() + static_cast<std::size_t>(s) * u_size,
                                 res.best.t.begin() + static_cast<std::size_t>(s + 1) * u_size);
    return pt;
}

}  // namespace hcap
