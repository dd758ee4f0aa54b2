#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hcap {

/// splitmix64 finalizer; used both as a PRG step and as a mixing function.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-seed for task `index` of a run seeded with `seed`.
/// Results are identical regardless of which worker executes the task.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

inline double u01_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based uniform draw: O(1) random access into a virtual IID stream.
inline double counter_u01(std::uint64_t key, std::uint64_t counter) {
    return u01_from_bits(splitmix64(key ^ splitmix64(counter)));
}

/// Index sampled from the distribution whose cumulative sums are `cum`
/// (cum.back() == 1 up to rounding).
inline int sample_from_cum(const std::vector<double>& cum, double u) {
    int k = static_cast<int>(cum.size());
    for (int i = 0; i < k - 1; ++i)
        if (u < cum[i]) return i;
    return k - 1;
}

inline std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> cum(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cum[i] = acc;
    }
    return cum;
}

/// Random point on the k-simplex (uniform/Dirichlet(1)) from a std engine.
template <class Rng>
std::vector<double> random_simplex(Rng& rng, int k) {
    std::uniform_real_distribution<double> uni(std::numeric_limits<double>::min(), 1.0);
    std::vector<double> p(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        p[i] = -std::log(uni(rng));
        sum += p[i];
    }
    for (int i = 0; i < k; ++i) p[i] /= sum;
    return p;
}

}  // namespace hcap
