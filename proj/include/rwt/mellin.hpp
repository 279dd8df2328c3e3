// SPDX-License-Identifier: Apache-2.0
//
// The Mellin line M(beta) = sum_t E[Theta_t^(alpha + i beta)] and its zeros.
// Since |E[Theta^(alpha+i beta)]| <= E[Theta^alpha], truncating the series at
// t_max leaves a remainder rigorously bounded by the alpha-moment tail sum.
// Zeros decide whether a regularly varying tail of the weighted series can be
// pulled back to the summands; a single zero breaks the converse.

#ifndef RWT_MELLIN_HPP
#define RWT_MELLIN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rwt/weights.hpp"

namespace rwt {

struct MellinValue {
    complex_t value{0.0, 0.0};
    double remainder_bound = 0.0; // |dropped tail| <= this
    std::size_t terms_used = 0;
};

/// Partial Mellin line sum_{t <= t_max} E[Theta_t^(alpha + i beta)] with its
/// truncation certificate.  Throws strip_error when sum_t E[Theta_t^alpha]
/// diverges (the line is ill-defined).
inline MellinValue mellin_line(const WeightSequence& seq, double alpha,
                               double beta, std::size_t t_max) {
    if (t_max < 1) throw domain_error("mellin_line: t_max >= 1 required");
    if (seq.sum(alpha).cls == SumClass::diverges)
        throw strip_error("mellin_line: alpha-moment sum diverges, line ill-defined");

    MellinValue out;
    const std::size_t n = seq.is_infinite()
                              ? t_max
                              : std::min<std::size_t>(t_max, seq.finite_size());
    const complex_t s(alpha, beta);
    for (std::size_t t = 1; t <= n; ++t) out.value += seq.law(t).moment(s);
    out.terms_used = n;
    out.remainder_bound = seq.is_infinite() ? seq.tail_sum_bound(alpha, n) : 0.0;
    return out;
}

namespace detail {

template <typename F>
double golden_min(const F& f, double lo, double hi, double width) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > width) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

/// All beta in [range_lo, range_hi] with |M(alpha + i beta)| below
/// tol * M(alpha) (the beta = 0 value normalizes the threshold, which makes
/// the zero set invariant under Theta -> c Theta).  Grid bracketing at 1000
/// points per unit beta, then golden-section refinement of |M|^2 to width
/// tol/2.  An empty list is a valid result; beta = 0 itself is excluded
/// whenever M(alpha) > 0.
inline std::vector<double> find_mellin_zeros(const WeightSequence& seq,
                                             double alpha, double range_lo,
                                             double range_hi, double tol) {
    if (!(range_hi > range_lo)) throw domain_error("find_mellin_zeros: bad range");
    if (!(tol > 0.0)) throw domain_error("find_mellin_zeros: tol > 0 required");

    // pick t_max so the truncation error cannot blur a zero at scale tol/10
    std::size_t t_max = seq.is_infinite() ? 0 : seq.finite_size();
    const double m0 = mellin_line(seq, alpha, 0.0, std::max<std::size_t>(t_max, 1))
                          .value.real();
    if (seq.is_infinite()) {
        const double target = tol * m0 / 10.0;
        std::size_t t = 8;
        while (seq.tail_sum_bound(alpha, t) >= target) {
            t *= 2;
            if (t > (std::size_t{1} << 21))
                throw convergence_error(
                    "find_mellin_zeros: cannot certify truncation at this tol");
        }
        t_max = t;
    }

    // materialize the truncated sequence once; the grid scan then only pays
    // for moment evaluations
    std::vector<WeightLaw> laws;
    laws.reserve(t_max);
    for (std::size_t t = 1; t <= t_max; ++t) laws.push_back(seq.law(t));
    auto line_abs2 = [&](double beta) {
        complex_t acc = 0.0;
        const complex_t s(alpha, beta);
        for (const auto& w : laws) acc += w.moment(s);
        return std::norm(acc);
    };

    const auto n_pts = static_cast<std::size_t>(
        std::ceil(1000.0 * (range_hi - range_lo))) + 2;
    std::vector<double> beta_grid(n_pts), m2(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
        beta_grid[i] = range_lo + (range_hi - range_lo) *
                                      static_cast<double>(i) /
                                      static_cast<double>(n_pts - 1);
        m2[i] = line_abs2(beta_grid[i]);
    }

    const double accept = tol * std::max(m0, 1e-300);
    std::vector<double> zeros;
    for (std::size_t i = 1; i + 1 < n_pts; ++i) {
        if (!(m2[i] <= m2[i - 1] && m2[i] <= m2[i + 1])) continue;
        const double refined = detail::golden_min(line_abs2, beta_grid[i - 1],
                                                  beta_grid[i + 1], tol * 0.5);
        if (std::sqrt(line_abs2(refined)) >= accept) continue;
        if (refined == 0.0 && m0 > 0.0) continue;
        if (!zeros.empty() &&
            std::fabs(zeros.back() - refined) <
                2.0 * (beta_grid[1] - beta_grid[0]))
            continue; // same zero seen from an adjacent bracket
        zeros.push_back(refined);
    }
    return zeros;
}

} // namespace rwt

#endif
