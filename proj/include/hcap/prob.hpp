#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hcap/errors.hpp"

namespace hcap {

// Tolerances: strict at validation time, looser after float accumulation.
inline constexpr double kValidationTol = 1e-12;
inline constexpr double kArithmeticTol = 1e-10;

/// x * log2(x) with the 0 log 0 = 0 convention.
inline double plog2p(double x) {
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

inline bool is_prob_vector(const std::vector<double>& p, double tol = kValidationTol) {
    double sum = 0.0;
    for (double v : p) {
        if (v < -tol || !std::isfinite(v)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol * std::max<double>(1, p.size());
}

/// Entropy in bits of a validated probability vector.
inline double entropy(const std::vector<double>& p) {
    if (p.empty()) fail(ErrorCode::NotADistribution, "empty vector");
    double sum = 0.0;
    for (double v : p) {
        if (v < -kValidationTol || !std::isfinite(v))
            fail(ErrorCode::NotADistribution, "negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kValidationTol * std::max<double>(1, p.size()))
        fail(ErrorCode::NotADistribution, "entries do not sum to 1");
    double h = 0.0;
    for (double v : p) h -= plog2p(v);
    return std::max(0.0, h);
}

/// Entropy without normalization checks, for marginals produced by arithmetic.
inline double entropy_unchecked(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) h -= plog2p(v);
    return h;
}

/// Euclidean projection onto the probability simplex.
inline void project_to_simplex(double* v, int k) {
    thread_local std::vector<double> u;
    u.assign(v, v + k);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < k; ++i) {
        css += u[i];
        double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    for (int i = 0; i < k; ++i) v[i] = std::max(0.0, v[i] - theta);
}

inline void project_to_simplex(std::vector<double>& v) {
    project_to_simplex(v.data(), static_cast<int>(v.size()));
}

}  // namespace hcap
