#pragma once

#include <cmath>
#include <stdexcept>

#include "llrcorr/cgf.hpp"
#include "llrcorr/channel.hpp"

namespace llrcorr {

struct SaddlepointResult {
    double s_hat = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
};

// Minimizes a convex CGF: Newton on kappa'(s) = 0 guarded by a sign bracket.
// A Newton step that leaves the domain/bracket or fails to shrink |kappa'|
// falls back to bisection, so convergence only needs the initial bracket.
// Throws if kappa' has no sign change on the domain (no interior minimizer).
inline SaddlepointResult find_saddlepoint(const Cgf& cgf, double seed_s, double tol,
                                          int max_iter = 100) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_saddlepoint: tol must be > 0");
    const Interval& dom = cgf.domain();
    double s = dom.clamp_inside(seed_s);

    // expand a sign-changing bracket [lo, hi] with kappa'(lo) < 0 < kappa'(hi)
    double f = cgf.d1(s);
    double lo, hi, flo, fhi;
    if (f == 0.0) {
        SaddlepointResult r;
        r.s_hat = s;
        r.converged = true;
        r.residual = 0.0;
        return r;
    }
    {
        const double dir = f < 0.0 ? +1.0 : -1.0;
        double step = std::max(1.0, std::fabs(s)) * 0.5;
        double prev = s, fprev = f, cur = s;
        bool bracketed = false;
        for (int i = 0; i < 200; ++i) {
            double cand = cur + dir * step;
            const double edge = dir > 0.0 ? dom.hi : dom.lo;
            if (!dom.contains(cand)) {
                if (!std::isfinite(edge)) break;
                cand = 0.5 * (cur + edge);  // creep toward a finite edge
                if (cand == cur) break;
            }
            const double fc = cgf.d1(cand);
            if (fc * fprev <= 0.0) {
                lo = dir > 0.0 ? prev : cand;
                hi = dir > 0.0 ? cand : prev;
                flo = dir > 0.0 ? fprev : fc;
                fhi = dir > 0.0 ? fc : fprev;
                bracketed = true;
                break;
            }
            prev = cand;
            fprev = fc;
            cur = cand;
            step *= 2.0;
        }
        if (!bracketed)
            throw std::runtime_error(
                "find_saddlepoint: kappa' has no sign change on the domain");
        if (flo > 0.0) {
            std::swap(lo, hi);
            std::swap(flo, fhi);
        }
    }

    SaddlepointResult r;
    r.s_hat = s;
    r.residual = std::fabs(f);
    for (int it = 1; it <= max_iter; ++it) {
        r.iterations = it;
        // keep the bracket current
        if (f < 0.0)
            lo = s;
        else
            hi = s;
        double next;
        const double curv = cgf.d2(s);
        bool use_bisect = !(curv > 0.0);
        if (!use_bisect) {
            next = s - f / curv;
            use_bisect = !(next > lo && next < hi);
        }
        if (use_bisect) next = 0.5 * (lo + hi);
        double fn = cgf.d1(next);
        if (std::fabs(fn) > std::fabs(f) && !use_bisect) {
            next = 0.5 * (lo + hi);
            fn = cgf.d1(next);
        }
        s = next;
        f = fn;
        r.s_hat = s;
        r.residual = std::fabs(f);
        if (r.residual <= tol) {
            r.converged = true;
            return r;
        }
    }
    return r;
}

// tanh(x) ~ x linearization of the channel saddle equation, exact as SNR -> 0
inline double saddle_seed_low_snr(const ChannelParams& p) {
    return p.h / (p.sigma2_z + p.g * p.g);
}

// tanh saturation limit, exact as SNR -> infinity
inline double saddle_seed_high_snr(const ChannelParams& p) {
    if (!(p.g < p.h)) throw std::invalid_argument("saddle_seed_high_snr: requires g < h");
    return (p.h - p.g) / p.sigma2_z;
}

// scale-aware stopping tolerance for the channel saddle equation
inline double saddlepoint_tolerance(const ChannelParams& p) {
    return 1e-10 * (p.h + p.sigma2_z);
}

// Saddlepoint of kappa_Y for the interference channel, seeded at the larger
// of the two closed-form asymptotes.
inline SaddlepointResult solve_channel_saddlepoint(const ChannelParams& p) {
    // the high-SNR asymptote goes negative once g >= h; the low-SNR seed
    // stays positive and still brackets the root
    const double seed =
        std::max(p.h / (p.sigma2_z + p.g * p.g), (p.h - p.g) / p.sigma2_z);
    return find_saddlepoint(cgf_observation(p), seed, saddlepoint_tolerance(p));
}

// Plain fixed-iteration Newton (no safeguards); the low-cost online recipe.
inline double newton_saddlepoint(const Cgf& cgf, double s0, int iters) {
    double s = s0;
    for (int i = 0; i < iters; ++i) s -= cgf.d1(s) / cgf.d2(s);
    return s;
}

}  // namespace llrcorr
