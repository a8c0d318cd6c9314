#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "llrcorr/channel.hpp"
#include "llrcorr/math_util.hpp"

namespace llrcorr {

// Open interval on which a CGF and its derivatives stay finite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double s) const { return s > lo && s < hi; }
    double clamp_inside(double s) const {
        if (contains(s)) return s;
        if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
        if (s <= lo) return std::isfinite(lo) ? lo + 1e-3 * (1.0 + std::fabs(lo)) : s;
        return std::isfinite(hi) ? hi - 1e-3 * (1.0 + std::fabs(hi)) : s;
    }
};

// Cumulant generating function kappa(s) = log E[e^{sL}] together with its
// first two derivatives. Convex with kappa(0) = 0 for every realization.
class Cgf {
public:
    using Fn = std::function<double(double)>;

    Cgf(Fn value, Fn d1, Fn d2, Interval domain = {})
        : value_(std::move(value)), d1_(std::move(d1)), d2_(std::move(d2)), domain_(domain) {}

    double value(double s) const { return value_(s); }
    double d1(double s) const { return d1_(s); }
    double d2(double s) const { return d2_(s); }
    const Interval& domain() const { return domain_; }

private:
    Fn value_, d1_, d2_;
    Interval domain_;
};

// CGF of N(mean, variance)
inline Cgf cgf_gaussian(double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("cgf_gaussian: variance must be > 0");
    return Cgf([=](double s) { return mean * s + 0.5 * variance * s * s; },
               [=](double s) { return mean + variance * s; },
               [=](double) { return variance; });
}

// CGF of the observation Y conditioned on c = 0 for the interference channel:
//   kappa_Y(s) = -h s + sigma2_z s^2 / 2 + log cosh(g s)
// Valid for any g >= 0; the weak-interference assumption g < h is not needed
// here (fading experiments evaluate it at negative instantaneous SIR too).
inline Cgf cgf_observation(const ChannelParams& p) {
    const double h = p.h, g = p.g, s2 = p.sigma2_z;
    return Cgf([=](double s) { return -h * s + 0.5 * s2 * s * s + log_cosh(g * s); },
               [=](double s) { return -h + s2 * s + g * std::tanh(g * s); },
               [=](double s) { return s2 + g * g * sech2(g * s); });
}

// CGF of the mismatched L-value 2hY/sigma2_z: kappa_Y(2h/sigma2_z * s)
inline Cgf cgf_mismatched_llr(const ChannelParams& p) {
    const Cgf base = cgf_observation(p);
    const double c = 2.0 * p.h / p.sigma2_z;
    return Cgf([=](double s) { return base.value(c * s); },
               [=](double s) { return c * base.d1(c * s); },
               [=](double s) { return c * c * base.d2(c * s); });
}

// CGF of alpha*L when L has CGF `base`: s -> base(alpha*s)
inline Cgf cgf_scaled(const Cgf& base, double alpha) {
    const Interval dom = base.domain();
    Interval scaled = dom;
    if (alpha > 0.0) {
        scaled.lo = dom.lo / alpha;
        scaled.hi = dom.hi / alpha;
    } else if (alpha < 0.0) {
        scaled.lo = dom.hi / alpha;
        scaled.hi = dom.lo / alpha;
    } else {
        throw std::invalid_argument("cgf_scaled: alpha must be nonzero");
    }
    return Cgf([=](double s) { return base.value(alpha * s); },
               [=](double s) { return alpha * base.d1(alpha * s); },
               [=](double s) { return alpha * alpha * base.d2(alpha * s); },
               scaled);
}

namespace detail {

struct TiltedMoments {
    double kappa, mean, var, ess;
};

inline TiltedMoments tilted_moments(const std::vector<double>& xs, double s) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, s * x);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, sq = 0.0;
    for (double x : xs) {
        const double w = std::exp(s * x - m);
        s0 += w;
        s1 += w * x;
        s2 += w * x * x;
        sq += w * w;
    }
    TiltedMoments out;
    out.kappa = m + std::log(s0 / static_cast<double>(xs.size()));
    out.mean = s1 / s0;
    out.var = std::max(0.0, s2 / s0 - out.mean * out.mean);
    out.ess = s0 * s0 / sq;
    return out;
}

}  // namespace detail

// Sample-based CGF estimate kappa_hat(s) = log mean(e^{s l_i}) with
// exponentially tilted moments as derivatives. The domain is restricted to
// where the tilted effective sample size stays >= min_ess; beyond that the
// estimate would ride on a handful of extreme samples.
inline Cgf cgf_empirical(std::vector<double> samples, double min_ess = 30.0) {
    if (samples.empty()) throw std::invalid_argument("cgf_empirical: empty batch");
    auto xs = std::make_shared<const std::vector<double>>(std::move(samples));
    // a batch below the target ESS keeps a usable neighbourhood of s = 0
    min_ess = std::min(min_ess, 0.9 * static_cast<double>(xs->size()));

    auto ess_at = [xs](double s) { return detail::tilted_moments(*xs, s).ess; };
    auto find_edge = [&](double dir) {
        double inner = 0.0, step = 1.0 / 1048576.0;
        double outer = 0.0;
        bool found = false;
        for (int i = 0; i < 80; ++i) {
            const double cand = dir * step;
            if (ess_at(cand) < min_ess) {
                outer = cand;
                found = true;
                break;
            }
            inner = cand;
            step *= 2.0;
        }
        if (!found) return dir * std::numeric_limits<double>::infinity();
        for (int i = 0; i < 40; ++i) {
            const double mid = 0.5 * (inner + outer);
            (ess_at(mid) >= min_ess ? inner : outer) = mid;
        }
        return inner;
    };
    Interval dom;
    dom.hi = find_edge(+1.0);
    dom.lo = find_edge(-1.0);

    return Cgf([xs](double s) { return detail::tilted_moments(*xs, s).kappa; },
               [xs](double s) { return detail::tilted_moments(*xs, s).mean; },
               [xs](double s) { return detail::tilted_moments(*xs, s).var; },
               dom);
}

// One addend of a composite CGF: multiplicity copies of alpha-scaled L.
struct CgfTerm {
    Cgf cgf;
    double multiplicity = 1.0;
    double alpha = 1.0;
};

// kappa_sum(s) = sum_i multiplicity_i * kappa_i(alpha_i * s)
inline Cgf cgf_composite(std::vector<CgfTerm> terms) {
    if (terms.empty()) throw std::invalid_argument("cgf_composite: no terms");
    Interval dom;
    for (const auto& t : terms) {
        if (!(t.alpha > 0.0)) throw std::invalid_argument("cgf_composite: alpha must be > 0");
        dom.lo = std::max(dom.lo, t.cgf.domain().lo / t.alpha);
        dom.hi = std::min(dom.hi, t.cgf.domain().hi / t.alpha);
    }
    auto shared = std::make_shared<const std::vector<CgfTerm>>(std::move(terms));
    return Cgf(
        [shared](double s) {
            double acc = 0.0;
            for (const auto& t : *shared) acc += t.multiplicity * t.cgf.value(t.alpha * s);
            return acc;
        },
        [shared](double s) {
            double acc = 0.0;
            for (const auto& t : *shared) acc += t.multiplicity * t.alpha * t.cgf.d1(t.alpha * s);
            return acc;
        },
        [shared](double s) {
            double acc = 0.0;
            for (const auto& t : *shared)
                acc += t.multiplicity * t.alpha * t.alpha * t.cgf.d2(t.alpha * s);
            return acc;
        },
        dom);
}

}  // namespace llrcorr
