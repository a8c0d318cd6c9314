#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace llrcorr {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kLog2 = 0.69314718055994530942;
inline constexpr double kTwoPi = 6.2831853071795864769;

// log(1 + e^x) without overflow for large |x|
inline double log1pexp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// logistic function, stable on both tails
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(e^a + e^b)
inline double logsumexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double logsumexp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// log(cosh(x)) valid for any x (cosh itself overflows past ~710)
inline double log_cosh(double x) {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - kLog2;
}

// 1/cosh^2(x), underflows gracefully to 0 for large |x|
inline double sech2(double x) {
    const double e = std::exp(-2.0 * std::fabs(x));
    const double r = 2.0 * std::sqrt(e) / (1.0 + e);
    return r * r;
}

// Scaled complementary error function e^{x^2} erfc(x).
// Direct product below x=20 (both factors representable and accurate),
// asymptotic series beyond, where erfc itself is headed for underflow.
inline double erfcx(double x) {
    if (x < 0.0) {
        // erfc(x) = 2 - erfc(-x); only small |x| matter on this side
        if (x < -26.0) return std::numeric_limits<double>::infinity();
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < 20.0) return std::exp(x * x) * std::erfc(x);
    const double z = 1.0 / (2.0 * x * x);
    // 1 - z + 3z^2 - 15z^3 + 105z^4 - 945z^5, truncation < 1e-15 at x>=20
    double series = 1.0 + z * (-1.0 + z * (3.0 + z * (-15.0 + z * (105.0 - z * 945.0))));
    return series / (x * kSqrtPi);
}

// Gaussian tail probability Q(x) = P(N(0,1) > x)
inline double q_func(double x) {
    return 0.5 * std::erfc(x / kSqrt2);
}

// log Q(x), stable deep into the upper tail and near-exact for x < 0
// where Q approaches 1 and a plain log would cancel
inline double log_q(double x) {
    if (x < 0.0) return std::log1p(-q_func(-x));
    if (x < 15.0) return std::log(q_func(x));
    return -0.5 * x * x + std::log(0.5 * erfcx(x / kSqrt2));
}

inline double log_binom(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Gauss-Hermite rule for weight e^{-t^2} on the real line (physicists'
// convention): nodes and weights via Newton iteration on the recurrence.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussHermiteRule gauss_hermite(int n) {
    // beyond ~160 the boundary-weight normalization 2/pp^2 overflows
    if (n < 1 || n > 160)
        throw std::invalid_argument("gauss_hermite: order must be in [1, 160]");
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15 * (1.0 + std::fabs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

}  // namespace llrcorr
