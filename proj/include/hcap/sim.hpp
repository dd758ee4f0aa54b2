#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hcap/channel.hpp"
#include "hcap/errors.hpp"
#include "hcap/parallel.hpp"
#include "hcap/prob.hpp"
#include "hcap/rng.hpp"

namespace hcap {

// Table-size guard for literal codebook scans, in address bits.
inline constexpr int kMaxTableBits = 24;

inline int ceil_bits(double x) {
    if (x <= 0.0) return 0;
    return static_cast<int>(std::ceil(x - 1e-9));
}

/// Robust strong typicality: every pair count within a relative eps window of
/// the reference, and exactly zero on null support. Stored in count space so
/// the same rule drives scans and the exact ensemble computation.
struct JointWindows {
    int a_size = 0, b_size = 0, n = 0;
    std::vector<long> lo, hi;  // per cell a*b_size + b

    static JointWindows from_ref(int n, const std::vector<std::vector<double>>& ref,
                                 double eps) {
        JointWindows w;
        w.a_size = static_cast<int>(ref.size());
        w.b_size = static_cast<int>(ref[0].size());
        w.n = n;
        w.lo.resize(static_cast<std::size_t>(w.a_size) * w.b_size);
        w.hi.resize(w.lo.size());
        for (int a = 0; a < w.a_size; ++a)
            for (int b = 0; b < w.b_size; ++b) {
                const double p = ref[a][b];
                const std::size_t i = static_cast<std::size_t>(a) * w.b_size + b;
                if (p <= 0.0) {
                    w.lo[i] = 0;
                    w.hi[i] = 0;
                } else {
                    w.lo[i] = static_cast<long>(std::ceil(n * p * (1.0 - eps) - 1e-9));
                    w.hi[i] = static_cast<long>(std::floor(n * p * (1.0 + eps) + 1e-9));
                    if (w.lo[i] < 0) w.lo[i] = 0;
                }
            }
        return w;
    }

    bool pass(const std::vector<long>& counts) const {
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] < lo[i] || counts[i] > hi[i]) return false;
        return true;
    }

    /// Necessary condition on the second sequence alone: its per-symbol counts
    /// must fit inside the column-sum range of the windows. When it fails, no
    /// partner sequence can be jointly typical.
    bool column_feasible(const std::vector<long>& b_counts) const {
        for (int b = 0; b < b_size; ++b) {
            long lo_sum = 0, hi_sum = 0;
            for (int a = 0; a < a_size; ++a) {
                lo_sum += lo[static_cast<std::size_t>(a) * b_size + b];
                hi_sum += hi[static_cast<std::size_t>(a) * b_size + b];
            }
            if (b_counts[b] < lo_sum || b_counts[b] > hi_sum) return false;
        }
        return true;
    }
};

inline void count_pairs(const std::vector<int>& a, const std::vector<int>& b, int a_size,
                        int b_size, std::vector<long>& counts) {
    counts.assign(static_cast<std::size_t>(a_size) * b_size, 0);
    for (std::size_t k = 0; k < a.size(); ++k)
        ++counts[static_cast<std::size_t>(a[k]) * b_size + b[k]];
}

/// True iff the pair of sequences is strongly jointly typical for `ref`.
inline bool typical(const std::vector<int>& a, const std::vector<int>& b,
                    const std::vector<std::vector<double>>& ref, double eps) {
    if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "sequences differ in length");
    const auto w = JointWindows::from_ref(static_cast<int>(a.size()), ref, eps);
    std::vector<long> counts;
    count_pairs(a, b, w.a_size, w.b_size, counts);
    return w.pass(counts);
}

/// Virtual random codebook: symbol (m, t1, k) is a deterministic function of
/// the key, IID ~ q_u across positions, with O(1) random access and no storage.
class CodewordStream {
public:
    CodewordStream(std::uint64_t key, int n, std::uint64_t m_count, std::uint64_t t1_count,
                   std::vector<double> cum_u)
        : key_(key), n_(n), m_count_(m_count), t1_count_(t1_count), cum_u_(std::move(cum_u)) {}

    int length() const { return n_; }
    std::uint64_t message_count() const { return m_count_; }
    std::uint64_t help_count() const { return t1_count_; }

    void copy_word(std::uint64_t m, std::uint64_t t1, std::vector<int>& out) const {
        out.resize(n_);
        const std::uint64_t k2 = splitmix64(splitmix64(key_ ^ splitmix64(m)) ^ splitmix64(~t1));
        for (int k = 0; k < n_; ++k) out[k] = sample_from_cum(cum_u_, counter_u01(k2, k));
    }

private:
    std::uint64_t key_;
    int n_;
    std::uint64_t m_count_, t1_count_;
    std::vector<double> cum_u_;
};

/// Materialized codebook; the explicit layout used by small configurations
/// and by tests that need to inject specific codewords.
struct Codebook {
    int n = 0;
    std::vector<std::vector<std::vector<int>>> u_words;  // [m][t1] -> length-n word

    int length() const { return n; }
    std::uint64_t message_count() const { return u_words.size(); }
    std::uint64_t help_count() const { return u_words.empty() ? 0 : u_words[0].size(); }
    void copy_word(std::uint64_t m, std::uint64_t t1, std::vector<int>& out) const {
        out = u_words[m][t1];
    }
};

inline Codebook make_codebook(int m_bits, int t1_bits, int n, const std::vector<double>& q_u,
                              std::uint64_t key) {
    if (m_bits + t1_bits > kMaxTableBits)
        fail(ErrorCode::ConfigTooLarge, "codebook exceeds the table-size guard");
    const std::uint64_t mc = 1ULL << m_bits, tc = 1ULL << t1_bits;
    CodewordStream stream(key, n, mc, tc, cumulative(q_u));
    Codebook cb;
    cb.n = n;
    cb.u_words.resize(mc);
    for (std::uint64_t m = 0; m < mc; ++m) {
        cb.u_words[m].resize(tc);
        for (std::uint64_t t1 = 0; t1 < tc; ++t1) stream.copy_word(m, t1, cb.u_words[m][t1]);
    }
    return cb;
}

/// Message-cognizant helper: scans the message's codewords for the smallest
/// index jointly typical with the observed state sequence.
template <class CB>
std::optional<std::uint64_t> helper_encode(const CB& cb, std::uint64_t m,
                                           const std::vector<int>& s_n,
                                           const std::vector<std::vector<double>>& ref_us,
                                           double eps, std::uint64_t* scanned = nullptr) {
    if (static_cast<int>(s_n.size()) != cb.length())
        fail(ErrorCode::LengthMismatch, "state sequence length mismatch");
    const auto windows = JointWindows::from_ref(cb.length(), ref_us, eps);
    std::vector<long> s_counts(windows.b_size, 0);
    for (int s : s_n) ++s_counts[s];
    if (!windows.column_feasible(s_counts)) return std::nullopt;
    std::vector<int> word;
    std::vector<long> counts;
    for (std::uint64_t t1 = 0; t1 < cb.help_count(); ++t1) {
        cb.copy_word(m, t1, word);
        count_pairs(word, s_n, windows.a_size, windows.b_size, counts);
        if (scanned) ++*scanned;
        if (windows.pass(counts)) return t1;
    }
    return std::nullopt;
}

/// x_k = phi(u_k); y_k drawn from the channel row for (x_k, s_k).
template <class Rng>
std::vector<int> transmit(const Channel& ch, const std::vector<int>& phi,
                          const std::vector<int>& u_n, const std::vector<int>& s_n, Rng& rng) {
    if (u_n.size() != s_n.size()) fail(ErrorCode::LengthMismatch, "sequence length mismatch");
    std::vector<std::vector<double>> cum(static_cast<std::size_t>(ch.x_size()) * ch.s_size());
    for (int x = 0; x < ch.x_size(); ++x)
        for (int s = 0; s < ch.s_size(); ++s)
            cum[static_cast<std::size_t>(x) * ch.s_size() + s] = cumulative(ch.row(x, s));
    std::vector<int> y(u_n.size());
    for (std::size_t k = 0; k < u_n.size(); ++k) {
        const auto& c = cum[static_cast<std::size_t>(phi[u_n[k]]) * ch.s_size() + s_n[k]];
        y[k] = sample_from_cum(c, u01_from_bits(rng()));
    }
    return y;
}

struct DecodeOutcome {
    enum class Status { ok, none, ambiguous };
    Status status = Status::none;
    std::uint64_t m_hat = 0;
};

/// Joint-typicality decoding: succeeds iff exactly one message index is
/// typical with the received sequence at the helper-chosen t1.
template <class CB>
DecodeOutcome decode(const CB& cb, std::uint64_t t1, const std::vector<int>& y_n,
                     const std::vector<std::vector<double>>& ref_uy, double eps) {
    if (static_cast<int>(y_n.size()) != cb.length())
        fail(ErrorCode::LengthMismatch, "received sequence length mismatch");
    const auto windows = JointWindows::from_ref(cb.length(), ref_uy, eps);
    std::vector<int> word;
    std::vector<long> counts;
    DecodeOutcome out;
    bool found = false;
    for (std::uint64_t m = 0; m < cb.message_count(); ++m) {
        cb.copy_word(m, t1, word);
        count_pairs(word, y_n, windows.a_size, windows.b_size, counts);
        if (!windows.pass(counts)) continue;
        if (found) {
            out.status = DecodeOutcome::Status::ambiguous;
            return out;
        }
        found = true;
        out.m_hat = m;
    }
    out.status = found ? DecodeOutcome::Status::ok : DecodeOutcome::Status::none;
    return out;
}

namespace detail {

inline double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Multinomial(total, q) restricted to per-cell count boxes: exact log
// probability of the box and exact sampling from the restricted law, both by
// a partial-sum DP over the cells.
struct BoxedMultinomial {
    int cells = 0;
    long total = 0;
    std::vector<long> lo, hi;
    std::vector<double> logq;
    std::vector<std::vector<double>> f;  // f[c][m], c cells placed, mass m
    double log_prob = -std::numeric_limits<double>::infinity();

    void build() {
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();
        f.assign(cells + 1, std::vector<double>(total + 1, neg_inf));
        f[0][0] = 0.0;
        for (int c = 0; c < cells; ++c) {
            const long chi = std::min<long>(hi[c], total);
            for (long m = 0; m <= total; ++m) {
                if (f[c][m] == neg_inf) continue;
                for (long j = lo[c]; j <= chi && m + j <= total; ++j) {
                    double term;
                    if (j == 0)
                        term = f[c][m];
                    else if (logq[c] == neg_inf)
                        break;
                    else
                        term = f[c][m] + j * logq[c] - std::lgamma(static_cast<double>(j) + 1.0);
                    f[c + 1][m + j] = logaddexp(f[c + 1][m + j], term);
                }
            }
        }
        if (f[cells][total] != neg_inf)
            log_prob = f[cells][total] + std::lgamma(static_cast<double>(total) + 1.0);
    }

    // Draws one count vector from the box-conditioned multinomial.
    template <class Rng>
    std::vector<long> sample(Rng& rng) const {
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();
        std::vector<long> counts(cells, 0);
        long m = total;
        for (int c = cells - 1; c >= 0; --c) {
            const double norm = f[c + 1][m];
            const double u = u01_from_bits(rng());
            double acc = 0.0;
            long picked = -1;
            for (long j = lo[c]; j <= std::min<long>(hi[c], m); ++j) {
                double term;
                if (j == 0)
                    term = f[c][m];
                else if (logq[c] == neg_inf)
                    break;
                else
                    term = f[c][m - j] + j * logq[c] - std::lgamma(static_cast<double>(j) + 1.0);
                if (term == neg_inf) continue;
                acc += std::exp(term - norm);
                if (u < acc) {
                    picked = j;
                    break;
                }
            }
            if (picked < 0) {
                // numerical remainder: take the largest feasible count
                for (long j = std::min<long>(hi[c], m); j >= lo[c]; --j)
                    if (f[c][m - j] != neg_inf) {
                        picked = j;
                        break;
                    }
                if (picked < 0) picked = 0;
            }
            counts[c] = picked;
            m -= picked;
        }
        return counts;
    }
};

inline BoxedMultinomial column_multinomial(const JointWindows& windows,
                                           const std::vector<double>& q_u, int column,
                                           long column_total) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    BoxedMultinomial bm;
    bm.cells = windows.a_size;
    bm.total = column_total;
    bm.lo.resize(bm.cells);
    bm.hi.resize(bm.cells);
    bm.logq.resize(bm.cells);
    for (int u = 0; u < bm.cells; ++u) {
        bm.lo[u] = windows.lo[static_cast<std::size_t>(u) * windows.b_size + column];
        bm.hi[u] = windows.hi[static_cast<std::size_t>(u) * windows.b_size + column];
        bm.logq[u] = q_u[u] > 0.0 ? std::log(q_u[u]) : neg_inf;
    }
    bm.build();
    return bm;
}

// log P[a codeword drawn IID ~ q_u is jointly typical with a sequence whose
// per-symbol counts are b_counts]. Conditioned on the partner sequence, the
// per-column count vectors are independent multinomials over U, so the
// probability factorizes into per-column box probabilities.
inline double log_codeword_typical(const std::vector<long>& b_counts,
                                   const std::vector<double>& q_u,
                                   const JointWindows& windows) {
    double total = 0.0;
    for (int b = 0; b < windows.b_size; ++b) {
        const double col = column_multinomial(windows, q_u, b, b_counts[b]).log_prob;
        if (col == -std::numeric_limits<double>::infinity()) return col;
        total += col;
    }
    return std::min(total, 0.0);
}

// P[at least one of 2^bits (minus one, for wrong-message counts) independent
// codewords is typical], with the count supplied in bits to survive
// astronomically large tables.
inline double prob_any_typical(double log_p, int bits, bool exclude_one) {
    if (log_p == -std::numeric_limits<double>::infinity()) return 0.0;
    double q;  // log P[none typical]
    if (bits <= 52) {
        const double count = std::exp2(bits) - (exclude_one ? 1.0 : 0.0);
        if (count <= 0.0) return 0.0;
        const double p = std::exp(log_p);
        if (p >= 1.0) return 1.0;
        q = count * std::log1p(-p);
    } else {
        // log1p(-p) ~ -p; exact far below sampling noise at these sizes
        const double log_lambda = log_p + bits * 0.6931471805599453;
        if (log_lambda > 50.0) return 1.0;
        q = -std::exp(log_lambda);
    }
    return -std::expm1(q);
}

}  // namespace detail

enum class DecodeMode {
    automatic,  // literal when the tables fit the guard, ensemble otherwise
    literal,    // scan the full message table
    ensemble,   // exact wrong-codeword probability over the random ensemble
};

enum class HelperMode {
    automatic,  // literal scan when the table fits the guard
    literal,    // scan codewords in index order for the smallest typical one
    sampled,    // exact success probability + conditioned codeword sampling
};

/// One operating point of the achievability scheme, with the single-branch
/// policy to simulate (time sharing composes externally).
struct SimConfig {
    int n = 0;
    double rate_r = 0.0;
    double rate_rh = 0.0;
    double r0 = 0.0;  // direct message bits carried by the description
    std::vector<std::vector<double>> q_u_given_s;  // [s][u]
    std::vector<int> phi;                          // [u] -> x
    double epsilon = 0.05;         // helper typicality slack
    double decode_epsilon = 0.1;   // decoder typicality slack
    int trials = 0;
    std::uint64_t seed = 0;
    bool fresh_codebook = true;  // fresh codebook per trial (ensemble average)
    DecodeMode decode_mode = DecodeMode::automatic;
    HelperMode helper_mode = HelperMode::automatic;
    int jobs = 1;
};

struct SimReport {
    int trials = 0;
    int helper_failures = 0;
    int decode_errors = 0;
    int direct_bit_errors = 0;  // always 0: direct bits ride the description
    double error_rate = 0.0;
    double wilson_lo = 0.0, wilson_hi = 0.0;
    int m_bits = 0, t1_bits = 0, r0_bits = 0;
    double eff_rate_r = 0.0, eff_rate_t1 = 0.0, eff_rate_r0 = 0.0;
};

struct TrialRecord {
    int trial = 0;
    bool helper_ok = false;
    std::uint64_t t1 = 0;
    std::uint64_t scanned = 0;
    // 0 ok, 1 no typical message, 2 ambiguous/wrong, 3 helper failure
    int outcome = 3;
};

inline void wilson_interval(int errors, int trials, double& lo, double& hi) {
    const double z = 1.959963984540054;  // 95%
    const double nt = trials, ph = static_cast<double>(errors) / nt;
    const double denom = 1.0 + z * z / nt;
    const double center = ph + z * z / (2.0 * nt);
    const double half = z * std::sqrt(ph * (1.0 - ph) / nt + z * z / (4.0 * nt * nt));
    lo = std::max(0.0, (center - half) / denom);
    hi = std::min(1.0, (center + half) / denom);
}

namespace detail {

inline void validate_sim_config(const Channel& ch, const SimConfig& cfg) {
    if (cfg.n < 1) fail(ErrorCode::InvalidArgument, "blocklength must be >= 1");
    if (cfg.trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
    if (cfg.rate_r < 0 || cfg.rate_rh < 0 || cfg.r0 < 0)
        fail(ErrorCode::InvalidArgument, "rates must be nonnegative");
    if (cfg.r0 > cfg.rate_rh + 1e-12)
        fail(ErrorCode::InvalidArgument, "r0 must not exceed rate_rh");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5) ||
        !(cfg.decode_epsilon > 0.0 && cfg.decode_epsilon < 0.5))
        fail(ErrorCode::InvalidArgument, "typicality slack must lie in (0, 0.5)");
    if (static_cast<int>(cfg.q_u_given_s.size()) != ch.s_size())
        fail(ErrorCode::DimensionMismatch, "policy must have s_size kernel rows");
    const int u_size = static_cast<int>(cfg.q_u_given_s[0].size());
    for (const auto& row : cfg.q_u_given_s) {
        if (static_cast<int>(row.size()) != u_size)
            fail(ErrorCode::DimensionMismatch, "ragged policy rows");
        if (!is_prob_vector(row)) fail(ErrorCode::NotADistribution, "policy row");
    }
    if (static_cast<int>(cfg.phi.size()) != u_size)
        fail(ErrorCode::DimensionMismatch, "phi must have one entry per auxiliary symbol");
    for (int x : cfg.phi)
        if (x < 0 || x >= ch.x_size())
            fail(ErrorCode::DimensionMismatch, "phi value outside the input alphabet");
}

}  // namespace detail

/// Runs the full scheme per trial: state draw, helper search, transmission
/// through phi, typicality decoding, plus error-free direct bits of rate r0.
/// Deterministic given (cfg, seed) regardless of the worker count.
inline SimReport run_trials(const Channel& ch, const SimConfig& cfg,
                            std::vector<TrialRecord>* trial_log = nullptr) {
    detail::validate_sim_config(ch, cfg);
    const int n = cfg.n;
    const int u_size = static_cast<int>(cfg.q_u_given_s[0].size());

    SimReport rep;
    rep.trials = cfg.trials;
    rep.m_bits = ceil_bits(n * cfg.rate_r);
    rep.t1_bits = ceil_bits(n * (cfg.rate_rh - cfg.r0));
    rep.r0_bits = ceil_bits(n * cfg.r0);
    rep.eff_rate_r = static_cast<double>(rep.m_bits) / n;
    rep.eff_rate_t1 = static_cast<double>(rep.t1_bits) / n;
    rep.eff_rate_r0 = static_cast<double>(rep.r0_bits) / n;

    DecodeMode mode = cfg.decode_mode;
    if (mode == DecodeMode::automatic)
        mode = (rep.m_bits + rep.t1_bits <= kMaxTableBits) ? DecodeMode::literal
                                                           : DecodeMode::ensemble;
    if (mode == DecodeMode::literal && rep.m_bits + rep.t1_bits > kMaxTableBits)
        fail(ErrorCode::ConfigTooLarge, "literal decoding exceeds the table-size guard");
    if (mode == DecodeMode::ensemble && !cfg.fresh_codebook)
        fail(ErrorCode::ConfigTooLarge, "a shared codebook requires literal decoding");
    HelperMode helper = cfg.helper_mode;
    if (helper == HelperMode::automatic)
        helper = (rep.t1_bits <= kMaxTableBits) ? HelperMode::literal : HelperMode::sampled;
    if (helper == HelperMode::literal && rep.t1_bits > kMaxTableBits)
        fail(ErrorCode::ConfigTooLarge, "helper search exceeds the table-size guard");
    if (helper == HelperMode::sampled && !cfg.fresh_codebook)
        fail(ErrorCode::ConfigTooLarge, "a shared codebook requires a literal helper");
    if (helper == HelperMode::sampled && mode == DecodeMode::literal)
        fail(ErrorCode::ConfigTooLarge, "a sampled helper requires ensemble decoding");

    // Reference joints of the single-branch policy.
    const auto& qs = ch.q_s();
    std::vector<double> q_u(u_size, 0.0);
    for (int s = 0; s < ch.s_size(); ++s)
        for (int u = 0; u < u_size; ++u) q_u[u] += qs[s] * cfg.q_u_given_s[s][u];
    std::vector<std::vector<double>> ref_us(u_size, std::vector<double>(ch.s_size()));
    for (int u = 0; u < u_size; ++u)
        for (int s = 0; s < ch.s_size(); ++s) ref_us[u][s] = qs[s] * cfg.q_u_given_s[s][u];
    std::vector<std::vector<double>> ref_uy(u_size, std::vector<double>(ch.y_size(), 0.0));
    for (int u = 0; u < u_size; ++u)
        for (int s = 0; s < ch.s_size(); ++s) {
            const double mass = qs[s] * cfg.q_u_given_s[s][u];
            if (mass == 0.0) continue;
            const auto& row = ch.row(cfg.phi[u], s);
            for (int y = 0; y < ch.y_size(); ++y) ref_uy[u][y] += mass * row[y];
        }
    const auto decode_windows = JointWindows::from_ref(n, ref_uy, cfg.decode_epsilon);
    const auto helper_windows = JointWindows::from_ref(n, ref_us, cfg.epsilon);
    const auto cum_u = cumulative(q_u);
    const auto cum_s = cumulative(qs);
    const std::uint64_t m_count = rep.m_bits <= 62 ? (1ULL << rep.m_bits) : 0;  // 0: virtual only
    const std::uint64_t t1_count = 1ULL << rep.t1_bits;
    const std::uint64_t shared_key = derive_seed(cfg.seed, 0x5eedb00cULL);

    std::vector<TrialRecord> records(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](int trial) {
        TrialRecord rec;
        rec.trial = trial;
        const std::uint64_t trial_seed = derive_seed(cfg.seed, trial);
        std::mt19937_64 rng(trial_seed);
        const std::uint64_t cb_key =
            cfg.fresh_codebook ? derive_seed(trial_seed, 0xc0deULL) : shared_key;
        CodewordStream stream(cb_key, n, m_count, t1_count, cum_u);

        // Uniform message; only its codeword stream matters in ensemble mode.
        std::uint64_t m = rng();
        m = (rep.m_bits == 0) ? 0 : (m >> (64 - rep.m_bits));

        std::vector<int> s_n(n);
        for (int k = 0; k < n; ++k) s_n[k] = sample_from_cum(cum_s, u01_from_bits(rng()));

        std::vector<int> u_n;
        if (helper == HelperMode::literal) {
            const auto t1 = helper_encode(stream, m, s_n, ref_us, cfg.epsilon, &rec.scanned);
            if (!t1) {
                rec.helper_ok = false;
                rec.outcome = 3;
                records[trial] = rec;
                return;
            }
            rec.helper_ok = true;
            rec.t1 = *t1;
            stream.copy_word(m, *t1, u_n);
        } else {
            // Exact ensemble equivalent of the scan: succeed with the
            // probability that some codeword in the table is typical, then
            // draw the selected codeword from the typicality-conditioned law.
            std::vector<long> s_counts(ch.s_size(), 0);
            for (int s : s_n) ++s_counts[s];
            std::vector<detail::BoxedMultinomial> columns;
            double log_p = 0.0;
            for (int s = 0; s < ch.s_size(); ++s) {
                columns.push_back(
                    detail::column_multinomial(helper_windows, q_u, s, s_counts[s]));
                log_p += columns.back().log_prob;
            }
            const double p_found = detail::prob_any_typical(log_p, rep.t1_bits, false);
            if (u01_from_bits(rng()) >= p_found) {
                rec.helper_ok = false;
                rec.outcome = 3;
                records[trial] = rec;
                return;
            }
            rec.helper_ok = true;
            u_n.assign(n, 0);
            for (int s = 0; s < ch.s_size(); ++s) {
                const auto counts = columns[s].sample(rng);
                std::vector<int> symbols;
                symbols.reserve(s_counts[s]);
                for (int u = 0; u < u_size; ++u)
                    symbols.insert(symbols.end(), counts[u], u);
                // uniform placement within the column's positions
                for (std::size_t i = symbols.size(); i > 1; --i) {
                    const std::size_t j =
                        static_cast<std::size_t>(u01_from_bits(rng()) * i);
                    std::swap(symbols[i - 1], symbols[std::min(j, i - 1)]);
                }
                std::size_t next = 0;
                for (int k = 0; k < n; ++k)
                    if (s_n[k] == s) u_n[k] = symbols[next++];
            }
        }
        const std::vector<int> y_n = transmit(ch, cfg.phi, u_n, s_n, rng);

        if (mode == DecodeMode::literal) {
            const DecodeOutcome out = decode(stream, rec.t1, y_n, ref_uy, cfg.decode_epsilon);
            if (out.status == DecodeOutcome::Status::ok && out.m_hat == m)
                rec.outcome = 0;
            else
                rec.outcome = (out.status == DecodeOutcome::Status::none) ? 1 : 2;
        } else {
            std::vector<long> counts;
            count_pairs(u_n, y_n, u_size, ch.y_size(), counts);
            const bool true_typical = decode_windows.pass(counts);
            std::vector<long> y_counts(ch.y_size(), 0);
            for (int y : y_n) ++y_counts[y];
            const double log_p = detail::log_codeword_typical(y_counts, q_u, decode_windows);
            const double p_wrong = detail::prob_any_typical(log_p, rep.m_bits, true);
            const bool wrong_event = u01_from_bits(rng()) < p_wrong;
            if (true_typical && !wrong_event)
                rec.outcome = 0;
            else
                rec.outcome = true_typical ? 2 : 1;
        }
        records[trial] = rec;
    });

    for (const auto& rec : records) {
        if (!rec.helper_ok)
            ++rep.helper_failures;
        else if (rec.outcome != 0)
            ++rep.decode_errors;
    }
    rep.error_rate = static_cast<double>(rep.helper_failures + rep.decode_errors) / cfg.trials;
    wilson_interval(rep.helper_failures + rep.decode_errors, cfg.trials, rep.wilson_lo,
                    rep.wilson_hi);
    if (trial_log) *trial_log = std::move(records);
    return rep;
}

}  // namespace hcap
