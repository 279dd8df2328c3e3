// SPDX-License-Identifier: Apache-2.0
//
// Empirical tail estimates with exact binomial intervals, ratio curves with
// propagated intervals, and the Hill tail-index estimator with its k-sweep.

#ifndef RWT_ESTIMATORS_HPP
#define RWT_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rwt/common.hpp"
#include "rwt/special.hpp"

namespace rwt {

struct TailEstimate {
    std::vector<double> x_levels;
    std::vector<double> p_hat;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::size_t n = 0;
    double ci_level = 0.0;
};

/// Exceedance fractions of `sample` at ascending `x_levels` with
/// Clopper-Pearson intervals at confidence `ci_level`.
inline TailEstimate empirical_tail(const std::vector<double>& sample,
                                   const std::vector<double>& x_levels,
                                   double ci_level) {
    if (sample.empty()) throw domain_error("empirical_tail: empty sample");
    if (x_levels.empty()) throw domain_error("empirical_tail: no levels");
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    TailEstimate est;
    est.x_levels = x_levels;
    est.n = sample.size();
    est.ci_level = ci_level;
    for (double x : x_levels) {
        const auto beyond = static_cast<std::size_t>(
            sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x));
        const auto ci = binomial_ci(beyond, est.n, ci_level);
        est.p_hat.push_back(double(beyond) / double(est.n));
        est.ci_low.push_back(ci.lo);
        est.ci_high.push_back(ci.hi);
    }
    return est;
}

struct RatioCurve {
    std::vector<double> x_levels;
    std::vector<double> ratio;
    std::vector<double> lo;
    std::vector<double> hi;

    bool brackets(double target) const {
        for (std::size_t i = 0; i < ratio.size(); ++i)
            if (!(lo[i] <= target && target <= hi[i])) return false;
        return true;
    }
};

/// Pointwise ratio of an empirical tail to an analytic one, intervals by
/// endpoint division.
inline RatioCurve tail_ratio(const TailEstimate& num,
                             const std::vector<double>& den) {
    if (den.size() != num.x_levels.size())
        throw domain_error("tail_ratio: grid mismatch");
    RatioCurve rc;
    rc.x_levels = num.x_levels;
    for (std::size_t i = 0; i < den.size(); ++i) {
        if (!(den[i] > 0.0))
            throw domain_error("tail_ratio: denominator not positive on grid");
        rc.ratio.push_back(num.p_hat[i] / den[i]);
        rc.lo.push_back(num.ci_low[i] / den[i]);
        rc.hi.push_back(num.ci_high[i] / den[i]);
    }
    return rc;
}

/// Ratio of two empirical tails on the same grid.
inline RatioCurve tail_ratio(const TailEstimate& num, const TailEstimate& den) {
    if (den.x_levels != num.x_levels)
        throw domain_error("tail_ratio: grid mismatch");
    RatioCurve rc;
    rc.x_levels = num.x_levels;
    for (std::size_t i = 0; i < den.p_hat.size(); ++i) {
        if (!(den.p_hat[i] > 0.0))
            throw domain_error("tail_ratio: denominator not positive on grid");
        rc.ratio.push_back(num.p_hat[i] / den.p_hat[i]);
        rc.lo.push_back(num.ci_low[i] / den.ci_high[i]);
        rc.hi.push_back(den.ci_low[i] > 0.0
                            ? num.ci_high[i] / den.ci_low[i]
                            : std::numeric_limits<double>::infinity());
    }
    return rc;
}

// ---------------------------------------------------------------------------
// Hill estimator

struct HillEstimate {
    std::size_t k = 0;
    double alpha_hat = 0.0;
    double se = 0.0; // alpha_hat / sqrt(k)
};

/// Hill estimate from the top k+1 order statistics:
///   alpha_hat = k / sum_{i<=k} log(X_(n-i+1) / X_(n-k)).
inline HillEstimate hill(const std::vector<double>& sample, std::size_t k) {
    const std::size_t n = sample.size();
    if (k < 10) throw domain_error("hill: k >= 10 required");
    if (k >= n) throw domain_error("hill: k < n required");
    std::vector<double> top(sample);
    std::nth_element(top.begin(), top.begin() + k, top.end(),
                     std::greater<double>());
    const double pivot = top[k]; // (k+1)-th largest
    if (!(pivot > 0.0))
        throw domain_error("hill: top order statistics must be positive");
    double logsum = 0.0;
    for (std::size_t i = 0; i < k; ++i) logsum += std::log(top[i] / pivot);
    if (!(logsum > 0.0))
        throw domain_error("hill: degenerate order statistics (tied values)");
    HillEstimate est;
    est.k = k;
    est.alpha_hat = double(k) / logsum;
    est.se = est.alpha_hat / std::sqrt(double(k));
    return est;
}

struct HillSweep {
    HillEstimate half, base, twice;
};

/// Hill at k, k/2 and 2k; the default k is ceil(n^0.6).
inline HillSweep hill_sweep(const std::vector<double>& sample,
                            std::size_t k_base = 0) {
    const std::size_t n = sample.size();
    if (k_base == 0)
        k_base = static_cast<std::size_t>(std::ceil(std::pow(double(n), 0.6)));
    HillSweep sw;
    sw.base = hill(sample, k_base);
    sw.half = hill(sample, std::max<std::size_t>(10, k_base / 2));
    sw.twice = hill(sample, std::min(n - 1, 2 * k_base));
    return sw;
}

} // namespace rwt

#endif
