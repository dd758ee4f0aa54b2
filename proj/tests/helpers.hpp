#pragma once

// Shared builders and independent oracles for the test suites.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hcap/hcap.hpp"

namespace testutil {

inline hcap::Channel random_channel(int x, int s, int y, std::uint64_t seed) {
    std::mt19937_64 rng(hcap::derive_seed(seed, 0xabc));
    hcap::RawChannel raw;
    raw.x_size = x;
    raw.s_size = s;
    raw.y_size = y;
    raw.q_s = hcap::random_simplex(rng, s);
    raw.w.resize(x);
    for (int i = 0; i < x; ++i) {
        raw.w[i].resize(s);
        for (int j = 0; j < s; ++j) raw.w[i][j] = hcap::random_simplex(rng, y);
    }
    return hcap::Channel(std::move(raw));
}

/// Random channel whose output law ignores the input.
inline hcap::Channel random_useless_channel(int x, int s, int y, std::uint64_t seed) {
    std::mt19937_64 rng(hcap::derive_seed(seed, 0xdef));
    hcap::RawChannel raw;
    raw.x_size = x;
    raw.s_size = s;
    raw.y_size = y;
    raw.q_s = hcap::random_simplex(rng, s);
    std::vector<std::vector<double>> rows(s);
    for (int j = 0; j < s; ++j) rows[j] = hcap::random_simplex(rng, y);
    raw.w.assign(x, rows);
    return hcap::Channel(std::move(raw));
}

inline hcap::Channel mod_additive_channel(int a, std::vector<double> q_s) {
    hcap::RawChannel raw;
    raw.x_size = raw.s_size = raw.y_size = a;
    raw.q_s = std::move(q_s);
    raw.w.assign(a, std::vector<std::vector<double>>(a, std::vector<double>(a, 0.0)));
    for (int x = 0; x < a; ++x)
        for (int s = 0; s < a; ++s) raw.w[x][s][(x + s) % a] = 1.0;
    return hcap::Channel(std::move(raw));
}

/// y = x with probability 1, independent of the state.
inline hcap::Channel noiseless_channel(int n_states = 2) {
    hcap::RawChannel raw;
    raw.x_size = raw.y_size = 2;
    raw.s_size = n_states;
    raw.q_s.assign(n_states, 1.0 / n_states);
    raw.w = {std::vector<std::vector<double>>(n_states, {1.0, 0.0}),
             std::vector<std::vector<double>>(n_states, {0.0, 1.0})};
    return hcap::Channel(std::move(raw));
}

/// Per-state binary symmetric channel with crossover p_s.
inline hcap::Channel bsc_state_channel(const std::vector<double>& q_s,
                                       const std::vector<double>& crossovers) {
    hcap::RawChannel raw;
    raw.x_size = raw.y_size = 2;
    raw.s_size = static_cast<int>(q_s.size());
    raw.q_s = q_s;
    raw.w.resize(2);
    for (int x = 0; x < 2; ++x) {
        raw.w[x].resize(raw.s_size);
        for (int s = 0; s < raw.s_size; ++s) {
            const double p = crossovers[s];
            raw.w[x][s] = x == 0 ? std::vector<double>{1 - p, p} : std::vector<double>{p, 1 - p};
        }
    }
    return hcap::Channel(std::move(raw));
}

/// Definition-level conditional mutual informations, straight double loops
/// over the joint; independent of the entropy-difference path in mi_pair.
inline hcap::MiPair naive_mi_pair(const hcap::JointDistribution& j) {
    const auto [V, U, S, X, Y] = j.dims;
    std::vector<double> p_v(V, 0.0), p_vu(V * U, 0.0), p_vs(V * S, 0.0), p_vy(V * Y, 0.0);
    std::vector<double> p_vuy(V * U * Y, 0.0), p_vus(V * U * S, 0.0);
    for (int v = 0; v < V; ++v)
        for (int u = 0; u < U; ++u)
            for (int s = 0; s < S; ++s)
                for (int x = 0; x < X; ++x)
                    for (int y = 0; y < Y; ++y) {
                        const double p = j.at(v, u, s, x, y);
                        p_v[v] += p;
                        p_vu[v * U + u] += p;
                        p_vs[v * S + s] += p;
                        p_vy[v * Y + y] += p;
                        p_vuy[(v * U + u) * Y + y] += p;
                        p_vus[(v * U + u) * S + s] += p;
                    }
    hcap::MiPair mi;
    for (int v = 0; v < V; ++v)
        for (int u = 0; u < U; ++u) {
            for (int y = 0; y < Y; ++y) {
                const double p = p_vuy[(v * U + u) * Y + y];
                if (p > 0)
                    mi.i_uy_given_v +=
                        p * std::log2(p_v[v] * p / (p_vu[v * U + u] * p_vy[v * Y + y]));
            }
            for (int s = 0; s < S; ++s) {
                const double p = p_vus[(v * U + u) * S + s];
                if (p > 0)
                    mi.i_us_given_v +=
                        p * std::log2(p_v[v] * p / (p_vu[v * U + u] * p_vs[v * S + s]));
            }
        }
    return mi;
}

inline hcap::JointDistribution random_joint(const std::array<int, 5>& dims,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(hcap::derive_seed(seed, 0x70e));
    hcap::JointDistribution j;
    j.dims = dims;
    std::size_t total = 1;
    for (int d : dims) total *= d;
    j.p.resize(total);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double sum = 0.0;
    for (auto& v : j.p) {
        v = uni(rng);
        sum += v;
    }
    for (auto& v : j.p) v /= sum;
    return j;
}

inline hcap::AuxiliaryPolicy random_policy(const hcap::Channel& ch, int v_size, int u_size,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(hcap::derive_seed(seed, 0x901));
    hcap::AuxiliaryPolicy pol;
    pol.v_size = v_size;
    pol.u_size = u_size;
    pol.q_v = hcap::random_simplex(rng, v_size);
    pol.q_u_given_sv.resize(v_size);
    pol.phi.resize(v_size);
    std::uniform_int_distribution<int> pick_x(0, ch.x_size() - 1);
    for (int v = 0; v < v_size; ++v) {
        pol.q_u_given_sv[v].resize(ch.s_size());
        for (int s = 0; s < ch.s_size(); ++s)
            pol.q_u_given_sv[v][s] = hcap::random_simplex(rng, u_size);
        pol.phi[v].resize(u_size);
        for (int u = 0; u < u_size; ++u) pol.phi[v][u] = pick_x(rng);
    }
    return pol;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

/// Runs a shell command, capturing combined output and the exit status.
inline CommandResult run_command(const std::string& cmd) {
    CommandResult res;
    const std::string full = cmd + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return res;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

inline std::string getenv_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

inline std::string read_file(const std::string& path) {
    FILE* f = fopen(path.c_str(), "rb");
    if (!f) return {};
    std::string out;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof(buf), f)) out.append(buf, got);
    fclose(f);
    return out;
}

}  // namespace testutil
