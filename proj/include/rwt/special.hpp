// SPDX-License-Identifier: Apache-2.0
//
// Special functions and the exact binomial machinery the estimators need:
// regularized incomplete beta (Lentz continued fraction), its inverse,
// Clopper-Pearson intervals, and the DKW band.

#ifndef RWT_SPECIAL_HPP
#define RWT_SPECIAL_HPP

#include <cmath>
#include <cstddef>
#include <utility>

#include "rwt/common.hpp"

namespace rwt {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta, modified Lentz scheme.
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 400;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw convergence_error("incomplete beta continued fraction stalled");
}

} // namespace detail

/// Regularized incomplete beta I_x(a,b) for a,b > 0 and x in [0,1].
inline double inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw domain_error("inc_beta: a,b > 0 required");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Inverse of I_x(a,b) in x: bisection with a Newton polish.
inline double inc_beta_inv(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("inc_beta_inv: p in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0, x = a / (a + b);
    for (int it = 0; it < 200; ++it) {
        const double f = inc_beta(a, b, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        // density of Beta(a,b) at x; guard the endpoints
        double step = 0.0;
        if (x > 0.0 && x < 1.0) {
            const double logpdf = (a - 1.0) * std::log(x) +
                                  (b - 1.0) * std::log1p(-x) - log_beta(a, b);
            const double pdf = std::exp(logpdf);
            if (pdf > 0.0 && std::isfinite(pdf)) step = f / pdf;
        }
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-15 * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

/// Survival function of Beta(a,b) evaluated from the right: P[B > x].
inline double beta_sf(double a, double b, double x) { return 1.0 - inc_beta(a, b, x); }

// ---------------------------------------------------------------------------
// Binomial confidence intervals (Clopper-Pearson)

struct BinomialCI {
    double lo = 0.0;
    double hi = 1.0;
};

/// Exact two-sided Clopper-Pearson interval for k successes out of n at
/// confidence `conf`.  k == 0 and k == n collapse to one-sided intervals.
inline BinomialCI binomial_ci(std::size_t k, std::size_t n, double conf) {
    if (n == 0) throw domain_error("binomial_ci: n >= 1 required");
    if (k > n) throw domain_error("binomial_ci: k <= n required");
    if (!(conf > 0.0 && conf < 1.0))
        throw domain_error("binomial_ci: conf in (0,1) required");
    const double delta = 1.0 - conf;
    BinomialCI ci;
    const double kn = static_cast<double>(k), nn = static_cast<double>(n);
    if (k == 0) {
        ci.lo = 0.0;
        ci.hi = 1.0 - std::pow(delta, 1.0 / nn); // one-sided
        return ci;
    }
    if (k == n) {
        ci.lo = std::pow(delta, 1.0 / nn); // one-sided
        ci.hi = 1.0;
        return ci;
    }
    ci.lo = inc_beta_inv(kn, nn - kn + 1.0, delta / 2.0);
    ci.hi = inc_beta_inv(kn + 1.0, nn - kn, 1.0 - delta / 2.0);
    return ci;
}

// ---------------------------------------------------------------------------
// DKW band

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz band: with probability at
/// least 1-delta, sup_x |F_n(x) - F(x)| <= this.
inline double dkw_epsilon(std::size_t n, double delta) {
    if (n == 0 || !(delta > 0.0 && delta < 1.0))
        throw domain_error("dkw_epsilon: n >= 1, delta in (0,1)");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

} // namespace rwt

#endif
