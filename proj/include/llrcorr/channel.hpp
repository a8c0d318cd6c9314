#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "llrcorr/math_util.hpp"
#include "llrcorr/rng.hpp"

namespace llrcorr {

// BPSK over additive Gaussian noise plus a BPSK interferer:
//   y = h*x + z + g*d,  x = 2c-1,  d = +/-1,  z ~ N(0, sigma2_z)
// Bits map to symbols as x = 2c-1 and the decoder metric is sum(l_n * c_n).
struct ChannelParams {
    double h = 1.0;        // channel gain (linear)
    double g = 0.0;        // interference gain (linear)
    double sigma2_z = 1.0; // noise variance, N0/2

    void validate() const {
        if (!(sigma2_z > 0.0)) throw std::invalid_argument("ChannelParams: sigma2_z must be > 0");
        if (!(h > 0.0)) throw std::invalid_argument("ChannelParams: h must be > 0");
        if (!(g >= 0.0 && g < h)) throw std::invalid_argument("ChannelParams: need 0 <= g < h");
    }

    double n0() const { return 2.0 * sigma2_z; }
    double snr() const { return h * h / n0(); }
    double sir() const { return g > 0.0 ? h * h / (g * g) : std::numeric_limits<double>::infinity(); }
    double snr_db() const { return 10.0 * std::log10(snr()); }
    double sir_db() const { return 10.0 * std::log10(sir()); }

    // h fixed at 1 by default: SNR sets the noise, SIR the interferer.
    static ChannelParams from_db(double snr_db, double sir_db, double h = 1.0) {
        ChannelParams p;
        p.h = h;
        p.sigma2_z = h * h * std::pow(10.0, -snr_db / 10.0) / 2.0;
        p.g = std::isinf(sir_db) ? 0.0 : h * std::pow(10.0, -sir_db / 20.0);
        p.validate();
        return p;
    }
};

enum class LValueKind { matched, mismatched, corrected };

inline const char* to_string(LValueKind k) {
    switch (k) {
        case LValueKind::matched: return "matched";
        case LValueKind::mismatched: return "mismatched";
        case LValueKind::corrected: return "corrected";
    }
    return "?";
}

// L-values conditioned on the transmitted bit being 0; samples drawn with a
// scrambled bit are sign-flipped back, which also enforces the symmetry
// condition p(l|c) = p(-l|1-c).
struct LValueBatch {
    std::vector<double> samples;
    LValueKind kind = LValueKind::matched;
    ChannelParams params;
};

// Exact L-value: log-ratio of the two-term Gaussian mixture likelihoods.
// Each side is evaluated as a pairwise log-sum-exp so large |y| (high SNR)
// cannot overflow the exponentials.
inline double true_llr(double y, const ChannelParams& p) {
    const double inv2s = 1.0 / (2.0 * p.sigma2_z);
    const double num = logsumexp(-(y - p.h - p.g) * (y - p.h - p.g) * inv2s,
                                 -(y - p.h + p.g) * (y - p.h + p.g) * inv2s);
    const double den = logsumexp(-(y + p.h - p.g) * (y + p.h - p.g) * inv2s,
                                 -(y + p.h + p.g) * (y + p.h + p.g) * inv2s);
    return num - den;
}

// Interference-blind L-value 2hy/sigma2_z.
inline double mismatched_llr(double y, const ChannelParams& p) {
    return 2.0 * p.h * y / p.sigma2_z;
}

namespace detail {

inline double draw_llr(Rng& rng, const ChannelParams& p, LValueKind kind, double alpha) {
    const bool bit = rng.bernoulli_half();
    const double x = bit ? 1.0 : -1.0;
    const double d = rng.sign();
    const double z = rng.gaussian() * std::sqrt(p.sigma2_z);
    const double y = p.h * x + z + p.g * d;
    double l;
    switch (kind) {
        case LValueKind::matched: l = true_llr(y, p); break;
        case LValueKind::mismatched: l = mismatched_llr(y, p); break;
        case LValueKind::corrected: l = alpha * mismatched_llr(y, p); break;
        default: l = 0.0;
    }
    return bit ? -l : l;  // condition everything on c = 0
}

}  // namespace detail

// Draws n conditioned-on-zero L-values. Work is split into fixed-size blocks
// with counter-derived seeds, so output is bit-identical for any thread count.
inline LValueBatch sample_llrs(const ChannelParams& p, LValueKind kind, std::size_t n,
                               uint64_t seed, double alpha = 1.0, int threads = 1) {
    p.validate();
    if (n == 0) throw std::invalid_argument("sample_llrs: n must be >= 1");
    LValueBatch batch;
    batch.kind = kind;
    batch.params = p;
    batch.samples.resize(n);
    constexpr std::size_t kBlock = 1u << 16;
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    for_each_block(n_blocks, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i)
            batch.samples[i] = detail::draw_llr(rng, p, kind, alpha);
    });
    return batch;
}

// Histogram check of the consistency condition log[p(-l|0)/p(l|0)] = l.
// Equal-width bins symmetric about zero spanning +/- 6 sample standard
// deviations; only mirror pairs with at least 100 samples each count.
// Returns the max absolute deviation over qualifying bins.
inline double empirical_consistency_check(const LValueBatch& batch, int bins) {
    if (bins < 10) throw std::invalid_argument("empirical_consistency_check: bins must be >= 10");
    const auto& xs = batch.samples;
    if (xs.empty()) throw std::invalid_argument("empirical_consistency_check: empty batch");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    if (!(var > 0.0))
        throw std::runtime_error("empirical_consistency_check: degenerate batch (zero variance)");
    const double half_range = 6.0 * std::sqrt(var);
    const double width = 2.0 * half_range / bins;
    std::vector<std::size_t> count(bins, 0);
    for (double x : xs) {
        if (x <= -half_range || x >= half_range) continue;
        int idx = static_cast<int>((x + half_range) / width);
        idx = std::clamp(idx, 0, bins - 1);
        ++count[idx];
    }
    bool any = false;
    double worst = 0.0;
    for (int i = bins / 2; i < bins; ++i) {
        const int mirror = bins - 1 - i;
        if (count[i] < 100 || count[mirror] < 100) continue;
        const double center = -half_range + (i + 0.5) * width;
        const double dev = std::fabs(
            std::log(static_cast<double>(count[mirror]) / static_cast<double>(count[i])) - center);
        worst = std::max(worst, dev);
        any = true;
    }
    if (!any)
        throw std::runtime_error(
            "empirical_consistency_check: no mirror bin pair has enough samples");
    return worst;
}

}  // namespace llrcorr
