#pragma once

#include <string>
#include <vector>

#include "hcap/errors.hpp"
#include "hcap/prob.hpp"

namespace hcap {

/// Unvalidated channel description, as read from a channel file.
struct RawChannel {
    int x_size = 0;
    int s_size = 0;
    int y_size = 0;
    std::vector<double> q_s;
    // w[x][s] is the output distribution over y given input x and state s.
    std::vector<std::vector<std::vector<double>>> w;
};

/// A finite state-dependent DMC: state law q_s and transition rows w[x][s].
/// Instances are immutable after construction and safe to share across threads.
class Channel {
public:
    static constexpr int kDefaultMaxSize = 16;

    Channel(RawChannel raw, int max_size = kDefaultMaxSize)
        : x_size_(raw.x_size), s_size_(raw.s_size), y_size_(raw.y_size),
          q_s_(std::move(raw.q_s)), w_(std::move(raw.w)) {
        check(max_size);
    }

    int x_size() const { return x_size_; }
    int s_size() const { return s_size_; }
    int y_size() const { return y_size_; }
    const std::vector<double>& q_s() const { return q_s_; }
    const std::vector<double>& row(int x, int s) const { return w_[x][s]; }
    double trans(int x, int s, int y) const { return w_[x][s][y]; }

    double state_entropy() const { return entropy(q_s_); }

private:
    void check(int max_size) const {
        if (x_size_ < 1 || s_size_ < 1 || y_size_ < 1 ||
            x_size_ > max_size || s_size_ > max_size || y_size_ > max_size)
            fail(ErrorCode::SizeOutOfRange,
                 "alphabet sizes must be in [1, " + std::to_string(max_size) + "]");
        if (static_cast<int>(q_s_.size()) != s_size_)
            fail(ErrorCode::DimensionMismatch, "q_s length does not match s_size");
        check_row(q_s_, "q_s");
        if (static_cast<int>(w_.size()) != x_size_)
            fail(ErrorCode::DimensionMismatch, "w must have x_size outer entries");
        for (int x = 0; x < x_size_; ++x) {
            if (static_cast<int>(w_[x].size()) != s_size_)
                fail(ErrorCode::DimensionMismatch, "w[" + std::to_string(x) +
                                                       "] must have s_size entries");
            for (int s = 0; s < s_size_; ++s) {
                if (static_cast<int>(w_[x][s].size()) != y_size_)
                    fail(ErrorCode::DimensionMismatch,
                         "w[" + std::to_string(x) + "][" + std::to_string(s) +
                             "] must have y_size entries");
                check_row(w_[x][s], "w[" + std::to_string(x) + "][" + std::to_string(s) + "]");
            }
        }
    }

    static void check_row(const std::vector<double>& p, const std::string& name) {
        double sum = 0.0;
        for (double v : p) {
            if (!std::isfinite(v)) fail(ErrorCode::ParseFailure, name + " has a non-finite entry");
            if (v < -kValidationTol) fail(ErrorCode::NegativeEntry, name + " has a negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kValidationTol * std::max<double>(1, p.size()))
            fail(ErrorCode::NonStochastic, name + " sums to " + std::to_string(sum));
    }

    int x_size_, s_size_, y_size_;
    std::vector<double> q_s_;
    std::vector<std::vector<std::vector<double>>> w_;
};

inline Channel validate_channel(RawChannel raw, int max_size = Channel::kDefaultMaxSize) {
    return Channel(std::move(raw), max_size);
}

}  // namespace hcap
