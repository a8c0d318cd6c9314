#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "llrcorr/cgf.hpp"
#include "llrcorr/channel.hpp"
#include "llrcorr/correction.hpp"
#include "llrcorr/math_util.hpp"
#include "llrcorr/rng.hpp"
#include "llrcorr/saddlepoint.hpp"

namespace llrcorr {

// Error event with d1 mismatched L-values (scaled by alpha) and d2 matched
// ones; "matched" means transmitted without interference.
struct PepQuery {
    int d1 = 0;
    int d2 = 0;
    double alpha = 1.0;

    void validate() const {
        if (d1 < 0 || d2 < 0 || d1 + d2 < 1)
            throw std::invalid_argument("PepQuery: need d1, d2 >= 0 and d1 + d2 >= 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("PepQuery: alpha must be > 0");
    }
};

enum class PepMethod { exact_gauss, exact_2sm, bhattacharyya_ub, spa, mc_oracle };

inline const char* to_string(PepMethod m) {
    switch (m) {
        case PepMethod::exact_gauss: return "exact_gauss";
        case PepMethod::exact_2sm: return "exact_2sm";
        case PepMethod::bhattacharyya_ub: return "bhattacharyya_ub";
        case PepMethod::spa: return "spa";
        case PepMethod::mc_oracle: return "mc_oracle";
    }
    return "?";
}

struct PepEstimate {
    double value = 0.0;
    PepMethod method = PepMethod::exact_gauss;
    double std_error = 0.0;                                   // mc_oracle only
    double s_hat = std::numeric_limits<double>::quiet_NaN();  // saddlepoint methods
    long long samples = 0;                                    // mc_oracle only
};

// All-Gaussian case: d1 L-values at SNR estimate gamma_tilde (true SNR gamma)
// and d2 exactly computed ones. The convolution stays Gaussian, so
//   PEP(alpha) = Q( sqrt(2) (alpha d1 gt + d2 g) / sqrt(alpha^2 d1 gt^2/g + d2 g) ).
inline PepEstimate pep_exact_gauss(const PepQuery& q, double gamma, double gamma_tilde) {
    q.validate();
    if (!(gamma > 0.0 && gamma_tilde > 0.0))
        throw std::invalid_argument("pep_exact_gauss: SNRs must be > 0");
    const double num = q.alpha * q.d1 * gamma_tilde + q.d2 * gamma;
    const double den =
        std::sqrt(q.alpha * q.alpha * q.d1 * gamma_tilde * gamma_tilde / gamma + q.d2 * gamma);
    PepEstimate est;
    est.value = q_func(kSqrt2 * num / den);
    est.method = PepMethod::exact_gauss;
    return est;
}

// log of the closed-form two-state-mismatch PEP for the interference channel:
// a binomial mixture over the interferer signs of the d1 mismatched legs,
//   2^{-d1} sum_k C(d1,k) Q( ((d1-k) a mu1 + k a mu2 + d2 mu0) /
//                            (sigma sqrt(d1 a^2 + d2)) ).
// Evaluated in the log domain so deep-tail values survive the alpha sweep.
inline double log_pep_exact_2sm(const PepQuery& q, const ChannelParams& p) {
    q.validate();
    p.validate();
    const double mu1 = 2.0 * p.h * (p.h - p.g) / p.sigma2_z;
    const double mu2 = 2.0 * p.h * (p.h + p.g) / p.sigma2_z;
    const double mu0 = 2.0 * p.h * p.h / p.sigma2_z;
    const double sigma = 2.0 * p.h / std::sqrt(p.sigma2_z);
    const double denom = sigma * std::sqrt(q.d1 * q.alpha * q.alpha + q.d2);
    std::vector<double> terms(q.d1 + 1);
    for (int k = 0; k <= q.d1; ++k) {
        const double num = (q.d1 - k) * q.alpha * mu1 + k * q.alpha * mu2 + q.d2 * mu0;
        terms[k] = log_binom(q.d1, k) - q.d1 * kLog2 + log_q(num / denom);
    }
    return logsumexp(terms);
}

inline PepEstimate pep_exact_2sm(const PepQuery& q, const ChannelParams& p) {
    PepEstimate est;
    est.value = std::exp(log_pep_exact_2sm(q, p));
    est.method = PepMethod::exact_2sm;
    return est;
}

namespace detail {

inline SaddlepointResult composite_saddlepoint(const std::vector<CgfTerm>& terms,
                                               double seed, double tol) {
    const Cgf composite = cgf_composite(terms);
    return find_saddlepoint(composite, seed, tol);
}

}  // namespace detail

// Chernoff/Bhattacharyya bound e^{kappa_sum(s_hat)} on Pr{sum > 0}.
inline PepEstimate pep_bhattacharyya(const std::vector<CgfTerm>& terms, double seed = 0.5,
                                     double tol = 1e-10) {
    const Cgf composite = cgf_composite(terms);
    const SaddlepointResult r = find_saddlepoint(composite, seed, tol);
    if (!r.converged) throw std::runtime_error("pep_bhattacharyya: solver did not converge");
    PepEstimate est;
    est.value = std::exp(composite.value(r.s_hat));
    est.method = PepMethod::bhattacharyya_ub;
    est.s_hat = r.s_hat;
    return est;
}

// Saddlepoint approximation: the bound refined by the curvature factor.
inline PepEstimate pep_spa(const std::vector<CgfTerm>& terms, double seed = 0.5,
                           double tol = 1e-10) {
    const Cgf composite = cgf_composite(terms);
    const SaddlepointResult r = find_saddlepoint(composite, seed, tol);
    if (!r.converged) throw std::runtime_error("pep_spa: solver did not converge");
    const double curv = composite.d2(r.s_hat);
    if (!(curv > 0.0)) throw std::runtime_error("pep_spa: nonpositive curvature at saddlepoint");
    PepEstimate est;
    est.value = std::exp(composite.value(r.s_hat)) /
                (std::fabs(r.s_hat) * std::sqrt(kTwoPi * curv));
    est.method = PepMethod::spa;
    est.s_hat = r.s_hat;
    return est;
}

// Convenience composite for the interference channel's two-state mismatch.
inline std::vector<CgfTerm> two_state_cgf_terms(const PepQuery& q, const ChannelParams& p) {
    q.validate();
    p.validate();
    std::vector<CgfTerm> terms;
    if (q.d1 > 0)
        terms.push_back({cgf_mismatched_llr(p), static_cast<double>(q.d1), q.alpha});
    if (q.d2 > 0) {
        const double mu0 = 2.0 * p.h * p.h / p.sigma2_z;
        terms.push_back({cgf_gaussian(-mu0, 2.0 * mu0), static_cast<double>(q.d2), 1.0});
    }
    return terms;
}

// Direct simulation of Pr{ sum of alpha-scaled mismatched + matched
// conditioned-on-zero L-values >= 0 }; ties count as errors. Fixed-size
// blocks with derived seeds keep the count identical for any thread count.
inline PepEstimate pep_mc_oracle(const PepQuery& q, const ChannelParams& p, long long n,
                                 uint64_t seed, int threads = 1) {
    q.validate();
    p.validate();
    if (n < 100000) throw std::invalid_argument("pep_mc_oracle: need n >= 1e5");
    constexpr long long kBlock = 1 << 16;
    const std::size_t n_blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
    std::vector<long long> errs(n_blocks, 0);
    const double sd = std::sqrt(p.sigma2_z);
    const double scale = 2.0 * p.h / p.sigma2_z;
    for_each_block(n_blocks, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        const long long lo = static_cast<long long>(b) * kBlock;
        const long long hi = std::min(n, lo + kBlock);
        long long e = 0;
        for (long long i = lo; i < hi; ++i) {
            double sum = 0.0;
            for (int k = 0; k < q.d1; ++k) {
                const double y = -p.h + rng.gaussian() * sd + p.g * rng.sign();
                sum += q.alpha * scale * y;
            }
            for (int k = 0; k < q.d2; ++k) {
                const double y = -p.h + rng.gaussian() * sd;
                sum += scale * y;
            }
            if (sum >= 0.0) ++e;
        }
        errs[b] = e;
    });
    long long total = 0;
    for (long long e : errs) total += e;
    PepEstimate est;
    est.value = static_cast<double>(total) / static_cast<double>(n);
    est.method = PepMethod::mc_oracle;
    est.samples = n;
    est.std_error = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) /
                              static_cast<double>(n));
    return est;
}

// Exhaustive minimization of the closed-form 2SM PEP over an alpha grid.
// Flat objectives (no interference, or no matched legs so a common scale
// cannot change the comparison) are flagged instead of minimized.
inline CorrectionEstimate alpha_grid_2sm(const ChannelParams& p, int d1, int d2,
                                         double grid_step = 1e-3, double alpha_max = 1.5) {
    p.validate();
    if (!(grid_step > 0.0 && grid_step <= 1e-3))
        throw std::invalid_argument("alpha_grid_2sm: grid_step must be in (0, 1e-3]");
    CorrectionEstimate est;
    est.method = CorrectionMethod::grid_2sm;
    if (p.g == 0.0 || d1 == 0 || d2 == 0) {
        est.alpha = 1.0;
        est.alpha_independent = true;
        return est;
    }
    double best_log = std::numeric_limits<double>::infinity();
    double best_alpha = grid_step;
    int evals = 0;
    for (double a = grid_step; a <= alpha_max + 0.5 * grid_step; a += grid_step) {
        const double v = log_pep_exact_2sm({d1, d2, a}, p);
        ++evals;
        if (v < best_log) {  // strict: ties keep the smaller alpha
            best_log = v;
            best_alpha = a;
        }
    }
    est.alpha = best_alpha;
    est.iterations = evals;
    return est;
}

}  // namespace llrcorr
