#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "llrcorr/cgf.hpp"
#include "llrcorr/channel.hpp"
#include "llrcorr/math_util.hpp"
#include "llrcorr/saddlepoint.hpp"

namespace llrcorr {

enum class CorrectionMethod {
    saddlepoint,
    gmi,
    gmi_mc,
    wlsf,
    gauss_moment,
    low_snr,
    high_snr,
    grid_2sm,
};

inline const char* to_string(CorrectionMethod m) {
    switch (m) {
        case CorrectionMethod::saddlepoint: return "saddlepoint";
        case CorrectionMethod::gmi: return "gmi";
        case CorrectionMethod::gmi_mc: return "gmi_mc";
        case CorrectionMethod::wlsf: return "wlsf";
        case CorrectionMethod::gauss_moment: return "gauss_moment";
        case CorrectionMethod::low_snr: return "low_snr";
        case CorrectionMethod::high_snr: return "high_snr";
        case CorrectionMethod::grid_2sm: return "grid_2sm";
    }
    return "?";
}

struct CorrectionEstimate {
    double alpha = 1.0;
    CorrectionMethod method = CorrectionMethod::saddlepoint;
    int iterations = 0;
    double residual = 0.0;
    int quad_order = 0;
    bool alpha_independent = false;  // objective did not depend on alpha
};

// Gaussian mixture with a shared variance; the conditioned-on-zero L-value
// densities used throughout are of this form.
struct MixturePdf {
    std::vector<double> means;
    std::vector<double> weights;
    double sigma2 = 1.0;

    void validate() const {
        if (means.empty() || means.size() != weights.size())
            throw std::invalid_argument("MixturePdf: means/weights size mismatch");
        if (!(sigma2 > 0.0)) throw std::invalid_argument("MixturePdf: sigma2 must be > 0");
        double sum = 0.0;
        for (double w : weights) sum += w;
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("MixturePdf: weights must sum to 1");
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < means.size(); ++i) m += weights[i] * means[i];
        return m;
    }

    double variance() const {
        const double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < means.size(); ++i)
            v += weights[i] * (sigma2 + means[i] * means[i]);
        return v - m * m;
    }

    double log_density(double l) const {
        double acc = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < means.size(); ++i) {
            const double d = l - means[i];
            acc = logsumexp(acc, std::log(weights[i]) - d * d / (2.0 * sigma2));
        }
        return acc - 0.5 * std::log(kTwoPi * sigma2);
    }

    Cgf cgf() const {
        validate();
        if (means.size() == 1) return cgf_gaussian(means[0], sigma2);
        auto self = *this;
        return Cgf(
            [self](double s) {
                double acc = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < self.means.size(); ++i)
                    acc = logsumexp(acc, std::log(self.weights[i]) + self.means[i] * s);
                return acc + 0.5 * self.sigma2 * s * s;
            },
            [self](double s) {
                double num = 0.0, den = 0.0, m = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < self.means.size(); ++i)
                    m = std::max(m, self.means[i] * s);
                for (std::size_t i = 0; i < self.means.size(); ++i) {
                    const double w = self.weights[i] * std::exp(self.means[i] * s - m);
                    num += w * self.means[i];
                    den += w;
                }
                return num / den + self.sigma2 * s;
            },
            [self](double s) {
                double n1 = 0.0, n2 = 0.0, den = 0.0, m = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < self.means.size(); ++i)
                    m = std::max(m, self.means[i] * s);
                for (std::size_t i = 0; i < self.means.size(); ++i) {
                    const double w = self.weights[i] * std::exp(self.means[i] * s - m);
                    n1 += w * self.means[i];
                    n2 += w * self.means[i] * self.means[i];
                    den += w;
                }
                const double mu = n1 / den;
                return n2 / den - mu * mu + self.sigma2;
            });
    }
};

// Interference-channel mismatched L-value density conditioned on c = 0:
// equal-weight pair at -2h(h-g)/s2 and -2h(h+g)/s2, shared variance 4h^2/s2.
inline MixturePdf mismatched_llr_pdf(const ChannelParams& p) {
    if (!(p.h > 0.0 && p.sigma2_z > 0.0 && p.g >= 0.0))
        throw std::invalid_argument("mismatched_llr_pdf: bad channel parameters");
    MixturePdf pdf;
    pdf.means = {-2.0 * p.h * (p.h - p.g) / p.sigma2_z, -2.0 * p.h * (p.h + p.g) / p.sigma2_z};
    pdf.weights = {0.5, 0.5};
    pdf.sigma2 = 4.0 * p.h * p.h / p.sigma2_z;
    return pdf;
}

// Matched BPSK L-value density at SNR gamma: N(-4 gamma, 8 gamma)
inline MixturePdf matched_llr_pdf_bpsk(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("matched_llr_pdf_bpsk: gamma must be > 0");
    return MixturePdf{{-4.0 * gamma}, {1.0}, 8.0 * gamma};
}

// L-value computed with SNR estimate gamma_tilde when the channel runs at
// gamma: N(-4 gamma_tilde, 8 gamma_tilde^2 / gamma)
inline MixturePdf mismatched_llr_pdf_bpsk(double gamma, double gamma_tilde) {
    if (!(gamma > 0.0 && gamma_tilde > 0.0))
        throw std::invalid_argument("mismatched_llr_pdf_bpsk: SNRs must be > 0");
    return MixturePdf{{-4.0 * gamma_tilde}, {1.0}, 8.0 * gamma_tilde * gamma_tilde / gamma};
}

// E[f(L)] for L ~ pdf by Gauss-Hermite quadrature per mixture component.
template <typename F>
double gh_expectation(const MixturePdf& pdf, const GaussHermiteRule& rule, F&& f) {
    const double scale = std::sqrt(2.0 * pdf.sigma2);
    double acc = 0.0;
    for (std::size_t i = 0; i < pdf.means.size(); ++i) {
        double comp = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
            comp += rule.weights[j] * f(pdf.means[i] + scale * rule.nodes[j]);
        acc += pdf.weights[i] * comp / kSqrtPi;
    }
    return acc;
}

// alpha = 2|s_hat|: doubled saddlepoint of the L-value CGF.
inline CorrectionEstimate alpha_saddlepoint(const Cgf& cgf, double seed = 0.5,
                                            double tol = 1e-10) {
    const SaddlepointResult r = find_saddlepoint(cgf, seed, tol);
    if (!r.converged)
        throw std::runtime_error("alpha_saddlepoint: saddlepoint solver did not converge");
    CorrectionEstimate est;
    est.alpha = 2.0 * std::fabs(r.s_hat);
    est.method = CorrectionMethod::saddlepoint;
    est.iterations = r.iterations;
    est.residual = r.residual;
    return est;
}

// Same rule computed through the observation CGF: alpha = sigma2_z * s_hat / h.
inline CorrectionEstimate alpha_saddlepoint_channel(const ChannelParams& p) {
    if (p.g == 0.0) {
        CorrectionEstimate est;
        est.alpha = 1.0;
        est.method = CorrectionMethod::saddlepoint;
        return est;
    }
    const SaddlepointResult r = solve_channel_saddlepoint(p);
    if (!r.converged)
        throw std::runtime_error("alpha_saddlepoint_channel: solver did not converge");
    CorrectionEstimate est;
    est.alpha = p.sigma2_z * r.s_hat / p.h;
    est.method = CorrectionMethod::saddlepoint;
    est.iterations = r.iterations;
    est.residual = r.residual;
    return est;
}

namespace detail {

// Increasing-in-alpha stationarity functions are solved by plain bisection.
template <typename G>
double bisect_root(G&& g, double lo, double hi, const char* who) {
    double flo = g(lo), fhi = g(hi);
    if (!(flo < 0.0 && fhi > 0.0)) {
        std::ostringstream msg;
        msg << who << ": no sign change on (" << lo << ", " << hi << "]; endpoint values "
            << flo << " and " << fhi;
        throw std::runtime_error(msg.str());
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid);
        if (fm == 0.0) return mid;
        (fm < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// GMI-maximizing factor: root of E[L * sigmoid(alpha L)] = 0 with the
// expectation taken by quadrature. At high SNR the integrand's support falls
// outside the quadrature nodes and no bracketed root may exist; that failure
// is reported rather than patched here.
inline CorrectionEstimate alpha_gmi(const MixturePdf& pdf, int quad_order = 64) {
    pdf.validate();
    if (quad_order < 20) throw std::invalid_argument("alpha_gmi: quad_order must be >= 20");
    const GaussHermiteRule rule = gauss_hermite(quad_order);
    auto g = [&](double a) {
        return gh_expectation(pdf, rule, [a](double l) { return l * sigmoid(a * l); });
    };
    CorrectionEstimate est;
    est.alpha = detail::bisect_root(g, 1e-3, 2.0, "alpha_gmi");
    est.method = CorrectionMethod::gmi;
    est.quad_order = quad_order;
    est.residual = std::fabs(g(est.alpha));
    return est;
}

// Monte-Carlo counterpart of alpha_gmi on a sampled batch.
inline CorrectionEstimate alpha_gmi_mc(const LValueBatch& batch) {
    if (batch.samples.size() < 10000)
        throw std::invalid_argument("alpha_gmi_mc: need at least 1e4 samples");
    const auto& xs = batch.samples;
    auto g = [&xs](double a) {
        double acc = 0.0;
        for (double l : xs) acc += l * sigmoid(a * l);
        return acc / static_cast<double>(xs.size());
    };
    CorrectionEstimate est;
    est.alpha = detail::bisect_root(g, 1e-3, 2.0, "alpha_gmi_mc");
    est.method = CorrectionMethod::gmi_mc;
    est.residual = std::fabs(g(est.alpha));
    return est;
}

// Weighted least-squares fit of alpha*l to the exact correction function
// f_c(l) = log[p(-l|0)/p(l|0)]: the quadratic objective minimizes in closed
// form at E[L f_c(L)] / E[L^2].
inline CorrectionEstimate alpha_wlsf(const MixturePdf& pdf, int quad_order = 64) {
    pdf.validate();
    const GaussHermiteRule rule = gauss_hermite(quad_order);
    const double num = gh_expectation(pdf, rule, [&pdf](double l) {
        return l * (pdf.log_density(-l) - pdf.log_density(l));
    });
    const double den = pdf.variance() + pdf.mean() * pdf.mean();
    CorrectionEstimate est;
    est.alpha = num / den;
    est.method = CorrectionMethod::wlsf;
    est.quad_order = quad_order;
    return est;
}

// Gaussian-model factor 2*mu/sigma^2 from the conditioned-on-zero moments.
inline CorrectionEstimate alpha_gauss_moment(const MixturePdf& pdf) {
    pdf.validate();
    CorrectionEstimate est;
    est.alpha = 2.0 * (-pdf.mean()) / pdf.variance();
    est.method = CorrectionMethod::gauss_moment;
    return est;
}

inline CorrectionEstimate alpha_gauss_moment(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("alpha_gauss_moment: empty batch");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples.size());
    if (!(var > 0.0)) throw std::runtime_error("alpha_gauss_moment: zero variance");
    CorrectionEstimate est;
    est.alpha = -2.0 * mean / var;
    est.method = CorrectionMethod::gauss_moment;
    return est;
}

// Low-SNR closed form: noise+interference treated as one Gaussian.
inline CorrectionEstimate alpha_low_snr(const ChannelParams& p) {
    p.validate();
    CorrectionEstimate est;
    est.alpha = p.sigma2_z / (p.sigma2_z + p.g * p.g);
    est.method = CorrectionMethod::low_snr;
    return est;
}

// High-SNR closed form 1 - g/h.
inline CorrectionEstimate alpha_high_snr(const ChannelParams& p) {
    p.validate();
    if (!(p.g < p.h)) throw std::invalid_argument("alpha_high_snr: requires g < h");
    CorrectionEstimate est;
    est.alpha = 1.0 - p.g / p.h;
    est.method = CorrectionMethod::high_snr;
    return est;
}

}  // namespace llrcorr
