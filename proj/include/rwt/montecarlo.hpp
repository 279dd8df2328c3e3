// SPDX-License-Identifier: Apache-2.0
//
// Simulation of randomly weighted series S_m = sum_{t<=m} Theta_t X_t^+ and
// their running maxima, with principled truncation: the dropped tail
// sum_{t>m} Theta_t X_t is controlled by a p-th moment Markov bound
//   P[sum_{t>m} Theta_t X_t > x_ref] <= x_ref^-p B_p(m),
//   B_p(m) = sum_{t>m} E[Theta_t^p] E[X^p]                 (p <= 1)
//          = ( sum_{t>m} (E[Theta_t^p] E[X^p])^(1/p) )^p   (p  > 1)
// using p-subadditivity below 1 and Minkowski above.  Replications draw from
// per-index derived streams, so every estimate is independent of scheduling
// and worker count; reductions run in index order.

#ifndef RWT_MONTECARLO_HPP
#define RWT_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwt/common.hpp"
#include "rwt/estimators.hpp"
#include "rwt/regvar.hpp"
#include "rwt/tail_measure.hpp"
#include "rwt/weights.hpp"

namespace rwt {

// ---------------------------------------------------------------------------
// truncation

struct TruncationCertificate {
    std::size_t m = 0;
    double bound = 0.0;  // certified P[dropped tail > x_ref] bound
    double p = 0.0;      // moment order used
    double x_ref = 0.0;  // reference exceedance level
};

namespace detail {

inline double theta_tail_sum(const WeightSequence& seq, double p, std::size_t m) {
    if (!seq.is_infinite()) {
        double s = 0.0;
        for (std::size_t t = m + 1; t <= seq.finite_size(); ++t)
            s += seq.moment_term(t, p);
        return s;
    }
    return seq.tail_sum_bound(p, m);
}

inline double markov_bound(const WeightSequence& seq, double ex_p, double p,
                           double x_ref, std::size_t m) {
    if (p <= 1.0) return std::pow(x_ref, -p) * theta_tail_sum(seq, p, m) * ex_p;
    // Minkowski route: terms (E[Theta^p] E[X^p])^(1/p) sum before the power
    if (!seq.is_infinite()) {
        double s = 0.0;
        for (std::size_t t = m + 1; t <= seq.finite_size(); ++t)
            s += std::pow(seq.moment_term(t, p) * ex_p, 1.0 / p);
        return std::pow(x_ref, -p) * std::pow(s, p);
    }
    // bound sum (E^p)^(1/p) through the rule's certificate machinery
    const auto cert = seq.sum_pow(p, 1.0 / p);
    if (cert.cls == SumClass::diverges)
        throw strip_error("markov_bound: Minkowski sum diverges");
    double head = 0.0;
    for (std::size_t t = 1; t <= m; ++t)
        head += std::pow(seq.moment_term(t, p), 1.0 / p);
    const double tail = std::max(0.0, cert.value - head) + cert.remainder_bound;
    return std::pow(x_ref, -p) * std::pow(tail * std::pow(ex_p, 1.0 / p), p);
}

} // namespace detail

/// Smallest m whose Markov bound at x_ref is <= epsilon_trunc, with the
/// bound returned as a certificate.  Pass p to force a moment order (throws
/// if it carries no convergence certificate); omit it to search a small set
/// of valid orders below (and, for alpha > 1, above) 1.
inline TruncationCertificate truncation_level(const WeightSequence& seq,
                                              const RegVarLaw& x_law,
                                              double epsilon_trunc, double x_ref,
                                              std::optional<double> p_request =
                                                  std::nullopt) {
    if (!(epsilon_trunc > 0.0))
        throw domain_error("truncation_level: epsilon_trunc > 0 required");
    if (!(x_ref > 0.0)) throw domain_error("truncation_level: x_ref > 0 required");
    const double alpha = x_law.alpha();

    std::vector<double> candidates;
    if (p_request) {
        if (!(*p_request > 0.0 && *p_request < alpha))
            throw domain_error("truncation_level: need 0 < p < alpha");
        candidates.push_back(*p_request);
    } else {
        for (double f : {0.9, 0.75, 0.5})
            candidates.push_back(f * std::min(1.0, alpha));
        if (alpha > 1.0) candidates.push_back((1.0 + alpha) / 2.0);
    }

    std::string last_reason = "no candidate moment order was certified";
    for (double p : candidates) {
        if (!(p < alpha)) continue;
        const auto cert = p <= 1.0 ? seq.sum(p) : seq.sum_pow(p, 1.0 / p);
        if (cert.cls == SumClass::diverges) {
            last_reason = "sum of E[Theta_t^" + std::to_string(p) +
                          "]-type terms diverges";
            continue;
        }
        const double ex_p = x_law.moment(p);

        TruncationCertificate out;
        out.p = p;
        out.x_ref = x_ref;
        if (epsilon_trunc >= 1.0) {
            out.m = 0; // the bound P <= 1 is already vacuous
            out.bound = std::min(1.0, detail::markov_bound(seq, ex_p, p, x_ref, 0));
            return out;
        }
        // the bound is nonincreasing in m: double then bisect
        std::size_t hi = 1;
        const std::size_t cap =
            seq.is_infinite() ? 1u << 22 : seq.finite_size();
        bool found = false;
        while (hi <= cap) {
            if (detail::markov_bound(seq, ex_p, p, x_ref, hi) <= epsilon_trunc) {
                found = true;
                break;
            }
            hi *= 2;
        }
        if (!found) {
            if (!seq.is_infinite() &&
                detail::markov_bound(seq, ex_p, p, x_ref, cap) <= epsilon_trunc) {
                found = true;
                hi = cap;
            } else {
                last_reason = "bound does not reach epsilon within the cap";
                continue;
            }
        }
        std::size_t lo = hi / 2;
        if (detail::markov_bound(seq, ex_p, p, x_ref, 0) <= epsilon_trunc) {
            out.m = 0;
            out.bound = detail::markov_bound(seq, ex_p, p, x_ref, 0);
            return out;
        }
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            (detail::markov_bound(seq, ex_p, p, x_ref, mid) <= epsilon_trunc ? hi
                                                                             : lo) =
                mid;
        }
        out.m = hi;
        out.bound = detail::markov_bound(seq, ex_p, p, x_ref, hi);
        return out;
    }
    throw strip_error("truncation_level: no certificate: " + last_reason);
}

// ---------------------------------------------------------------------------
// series simulation

struct SeriesSample {
    std::vector<double> values;      // S_m, positive parts
    std::vector<double> running_max; // max_{k<=m} sum_{t<=k} Theta_t X_t
    std::size_t m = 0;
    double truncation_bound = 0.0;   // certificate carried along when known
};

/// n independent realizations of (S_m, running max) at truncation m.
/// Within a replication X_t are i.i.d. draws of x_law, Theta_t independent
/// draws of the sequence laws; a zero weight skips its X draw (the skipped
/// coordinate is independent of everything else, so the law of the sum is
/// unchanged).  Deterministic given (seed, m, n).
inline SeriesSample simulate_series(const RegVarLaw& x_law,
                                    const WeightSequence& seq, std::size_t m,
                                    std::size_t n, std::uint64_t seed,
                                    double truncation_bound = 0.0) {
    if (m < 1 || n < 1)
        throw domain_error("simulate_series: m >= 1 and n >= 1 required");
    if (!seq.is_infinite() && m > seq.finite_size())
        throw domain_error("simulate_series: m exceeds the sequence length");

    std::vector<WeightLaw> laws;
    laws.reserve(m);
    for (std::size_t t = 1; t <= m; ++t) laws.push_back(seq.law(t));

    SeriesSample out;
    out.m = m;
    out.truncation_bound = truncation_bound;
    out.values.resize(n);
    out.running_max.resize(n);
    parallel_for_indexed(n, [&](std::size_t i) {
        SplitMix64 g(derive_seed(seed, i));
        double sum_pos = 0.0, partial = 0.0, peak = 0.0;
        bool first = true;
        for (const auto& w : laws) {
            const double theta = w.sample(g);
            if (theta > 0.0) {
                const double x = x_law.quantile(1.0 - g.next_open01());
                sum_pos += theta * std::max(x, 0.0);
                partial += theta * x;
            }
            if (first) {
                peak = partial;
                first = false;
            } else {
                peak = std::max(peak, partial);
            }
        }
        out.values[i] = sum_pos;
        out.running_max[i] = peak;
    });
    return out;
}

// ---------------------------------------------------------------------------
// asymptotic-independence and left-tail diagnostics

struct DiagnosticCurve {
    std::vector<double> x_levels;
    std::vector<double> ratio;
    std::vector<double> upper; // upper CI where empirical, = ratio otherwise
    bool flag = false;         // meaning documented per diagnostic
};

/// Empirical P[X1 > x, X2 > x] / P[X1 > x] along levels; flagged consistent
/// with asymptotic independence when the upper interval decreases along the
/// grid and ends below `threshold`.
inline DiagnosticCurve asymp_indep_diag(
    const std::function<std::pair<double, double>(SplitMix64&)>& pair_sampler,
    const std::vector<double>& x_levels, std::size_t n, std::uint64_t seed,
    double ci_level = 0.99, double threshold = 0.1) {
    if (n < 1) throw domain_error("asymp_indep_diag: n >= 1 required");
    std::vector<double> x1(n), x2(n);
    parallel_for_indexed(n, [&](std::size_t i) {
        SplitMix64 g(derive_seed(seed, i));
        const auto pr = pair_sampler(g);
        x1[i] = pr.first;
        x2[i] = pr.second;
    });
    DiagnosticCurve curve;
    curve.x_levels = x_levels;
    for (double x : x_levels) {
        std::size_t joint = 0, marg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x1[i] > x) {
                ++marg;
                if (x2[i] > x) ++joint;
            }
        }
        const double r = marg == 0 ? 0.0 : double(joint) / double(marg);
        double up = 1.0;
        if (marg > 0) {
            const auto ciJ = binomial_ci(joint, n, ci_level);
            const auto ciM = binomial_ci(marg, n, ci_level);
            up = ciM.lo > 0.0 ? std::min(1.0, ciJ.hi / ciM.lo) : 1.0;
        }
        curve.ratio.push_back(r);
        curve.upper.push_back(up);
    }
    // consistent with asymptotic independence once the upper interval has
    // dropped below the threshold by the deep end of the grid
    curve.flag = curve.upper.back() < threshold &&
                 curve.upper.back() <= curve.upper.front() + 1e-12;
    return curve;
}

/// Analytic left-tail ratio P[X < -u x]/P[X > x] along levels; the flag
/// reports whether the curve is consistent with a negligible left tail
/// (decreasing toward 0 or identically 0).
inline DiagnosticCurve left_tail_diag(const RegVarLaw& law, double u,
                                      const std::vector<double>& x_levels) {
    if (!(u > 0.0)) throw domain_error("left_tail_diag: u > 0 required");
    DiagnosticCurve curve;
    curve.x_levels = x_levels;
    for (double x : x_levels) {
        const double denom = law.tail(x);
        const double r = law.left_tail(u * x) / denom;
        curve.ratio.push_back(r);
        curve.upper.push_back(r);
    }
    const double first = curve.ratio.front(), last = curve.ratio.back();
    curve.flag = last == 0.0 || last < 0.5 * first;
    return curve;
}

/// Empirical variant for a signed sample.
inline DiagnosticCurve left_tail_diag(const std::vector<double>& signed_sample,
                                      double u,
                                      const std::vector<double>& x_levels) {
    if (!(u > 0.0)) throw domain_error("left_tail_diag: u > 0 required");
    if (signed_sample.empty()) throw domain_error("left_tail_diag: empty sample");
    DiagnosticCurve curve;
    curve.x_levels = x_levels;
    for (double x : x_levels) {
        std::size_t below = 0, above = 0;
        for (double v : signed_sample) {
            if (v < -u * x) ++below;
            if (v > x) ++above;
        }
        curve.ratio.push_back(above == 0 ? 0.0 : double(below) / double(above));
        curve.upper.push_back(curve.ratio.back());
    }
    const double first = curve.ratio.front(), last = curve.ratio.back();
    curve.flag = last == 0.0 || last < 0.5 * first;
    return curve;
}

// ---------------------------------------------------------------------------
// named experiment cores

/// Exceedance levels hit by the analytic comparison tail at the requested
/// probabilities (deeper levels would need importance sampling).
inline std::vector<double> levels_from_tail(
    const std::function<double(double)>& comparison_tail,
    const std::vector<double>& probs, double lo_start = 1.0) {
    std::vector<double> levels;
    for (double p : probs) {
        if (comparison_tail(lo_start) <= p) {
            levels.push_back(lo_start);
            continue;
        }
        double lo = lo_start, hi = 2.0 * lo_start;
        while (comparison_tail(hi) > p) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = std::sqrt(lo * hi);
            (comparison_tail(mid) > p ? lo : hi) = mid;
            if (hi / lo - 1.0 < 1e-13) break;
        }
        levels.push_back(std::sqrt(lo * hi));
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

struct FiniteSumReport {
    std::vector<double> x_levels;
    TailEstimate sum_tail;       // P[sum Theta_t X_t^+ > x]
    TailEstimate max_tail;       // P[max_k partial sums > x]
    std::vector<double> target;  // sum_t E[Theta_t^a] * P[X1 > x]
    RatioCurve sum_ratio;        // sum_tail / target
    RatioCurve max_ratio;        // max_tail / target
    double moment_sum = 0.0;     // sum_{t<=n_terms} E[Theta_t^alpha]
    bool asymp_indep_flag = true;
    bool contract_violation = false;
};

/// Tail curves of the n_terms-sum, its running max, and their ratios to the
/// additivity target sum_t E[Theta_t^alpha] P[X1 > x].  With
/// comonotone_x = true the X_t are all one draw, which violates pairwise
/// asymptotic independence: the report flags it and is otherwise out of
/// contract.
inline FiniteSumReport finite_sum_experiment(const RegVarLaw& x_law,
                                             const WeightSequence& seq,
                                             std::size_t n_terms, std::size_t n,
                                             std::uint64_t seed,
                                             const std::vector<double>& x_levels,
                                             double ci_level = 0.99,
                                             bool comonotone_x = false) {
    if (n_terms < 1) throw domain_error("finite_sum_experiment: n_terms >= 1");
    FiniteSumReport rep;
    rep.x_levels = x_levels;
    for (std::size_t t = 1; t <= n_terms; ++t)
        rep.moment_sum += seq.law(t).moment(x_law.alpha());

    std::vector<WeightLaw> laws;
    for (std::size_t t = 1; t <= n_terms; ++t) laws.push_back(seq.law(t));
    std::vector<double> sums(n), peaks(n);
    parallel_for_indexed(n, [&](std::size_t i) {
        SplitMix64 g(derive_seed(seed, i));
        double shared_x = 0.0;
        if (comonotone_x) shared_x = x_law.quantile(1.0 - g.next_open01());
        double sum_pos = 0.0, partial = 0.0, peak = 0.0;
        bool first = true;
        for (const auto& w : laws) {
            const double theta = w.sample(g);
            double x = 0.0;
            if (comonotone_x) {
                x = shared_x;
            } else if (theta > 0.0) {
                x = x_law.quantile(1.0 - g.next_open01());
            }
            sum_pos += theta * std::max(x, 0.0);
            partial += theta * x;
            peak = first ? partial : std::max(peak, partial);
            first = false;
        }
        sums[i] = sum_pos;
        peaks[i] = peak;
    });

    rep.sum_tail = empirical_tail(sums, x_levels, ci_level);
    rep.max_tail = empirical_tail(peaks, x_levels, ci_level);
    for (double x : x_levels) rep.target.push_back(rep.moment_sum * x_law.tail(x));
    rep.sum_ratio = tail_ratio(rep.sum_tail, rep.target);
    rep.max_ratio = tail_ratio(rep.max_tail, rep.target);

    if (n_terms >= 2) {
        // diagnose pairwise asymptotic independence of (T1 X1, T2 X2)
        auto pair_sampler = [&](SplitMix64& g) {
            double x1, x2;
            if (comonotone_x) {
                x1 = x2 = x_law.quantile(1.0 - g.next_open01());
            } else {
                x1 = x_law.quantile(1.0 - g.next_open01());
                x2 = x_law.quantile(1.0 - g.next_open01());
            }
            const double t1 = laws[0].sample(g), t2 = laws[1].sample(g);
            return std::make_pair(t1 * x1, t2 * x2);
        };
        std::vector<double> diag_levels;
        for (double p : {1e-1, 1e-2, 1e-3})
            diag_levels.push_back(x_law.quantile(1.0 - p));
        const auto diag = asymp_indep_diag(
            pair_sampler, diag_levels, std::min<std::size_t>(n, 200000),
            derive_seed(seed, 0xD1A6u), ci_level, 0.25);
        rep.asymp_indep_flag = diag.flag;
        rep.contract_violation = !diag.flag;
    }
    return rep;
}

struct SeriesReport {
    TruncationCertificate truncation;
    std::vector<double> x_levels;
    TailEstimate tail;          // P[S_m > x], positive parts
    TailEstimate max_tail;      // P[max_k partial sums > x]
    std::vector<double> target; // sum_t E[Theta_t^a] * P[X1>x]
    RatioCurve ratio;
    RatioCurve max_ratio;
    HillSweep hill;
    double moment_sum = 0.0;    // certified sum_t E[Theta_t^alpha]
    bool all_finite = true;
};

/// The infinite-series experiment: certify a truncation level, simulate, and
/// compare the empirical tail against sum_t E[Theta_t^alpha] P[X1 > x].
inline SeriesReport series_experiment(const RegVarLaw& x_law,
                                      const WeightSequence& seq, std::size_t n,
                                      std::uint64_t seed,
                                      const std::vector<double>& probs,
                                      double epsilon_trunc, double ci_level = 0.99,
                                      std::optional<double> p_force = std::nullopt) {
    SeriesReport rep;
    const auto cert_sum = seq.sum(x_law.alpha());
    if (cert_sum.cls == SumClass::diverges)
        throw strip_error("series_experiment: sum E[Theta_t^alpha] diverges");
    rep.moment_sum = cert_sum.value;

    auto comparison = [&](double x) { return rep.moment_sum * x_law.tail(x); };
    rep.x_levels = levels_from_tail(comparison, probs, x_law.x_min());
    const double x_ref = rep.x_levels.back();
    rep.truncation = truncation_level(seq, x_law, epsilon_trunc, x_ref, p_force);
    const std::size_t m = std::max<std::size_t>(1, rep.truncation.m);

    const auto sample =
        simulate_series(x_law, seq, m, n, seed, rep.truncation.bound);
    for (double v : sample.values)
        if (!std::isfinite(v)) rep.all_finite = false;

    rep.tail = empirical_tail(sample.values, rep.x_levels, ci_level);
    rep.max_tail = empirical_tail(sample.running_max, rep.x_levels, ci_level);
    for (double x : rep.x_levels) rep.target.push_back(comparison(x));
    rep.ratio = tail_ratio(rep.tail, rep.target);
    rep.max_ratio = tail_ratio(rep.max_tail, rep.target);

    std::vector<double> positive;
    positive.reserve(sample.values.size());
    for (double v : sample.values)
        if (v > 0.0) positive.push_back(v);
    rep.hill = hill_sweep(positive);
    return rep;
}

struct ConverseReport {
    std::vector<double> x_levels;
    TailEstimate tail;            // empirical tail of sum Theta_t X_t
    std::vector<double> target;   // |rho|_alpha x^-alpha from mu (*) rho
    RatioCurve ratio;
    HillSweep hill;
    OscillationProfile input_profile; // x^alpha mu(x, inf): never flattens
    double rho_alpha_norm = 0.0;
};

/// The converse construction run end to end: X ~ mu (no regularly varying
/// tail), weights from atomic rho, and the sum's tail checked against the
/// regularly varying target |rho|_alpha x^-alpha.  rho masses summing to 1
/// act as one random weight; unit masses act as a deterministic weight list.
inline ConverseReport converse_experiment(const CounterexampleMu& mu,
                                          const std::vector<MeasureAtom>& rho,
                                          double alpha, std::size_t n,
                                          std::uint64_t seed,
                                          const std::vector<double>& probs,
                                          double ci_level = 0.99) {
    if (n < 1) throw domain_error("converse_experiment: n >= 1 required");
    if (rho.empty()) throw domain_error("converse_experiment: rho has no atoms");
    double mass = 0.0;
    for (const auto& a : rho) mass += a.mass;
    const bool random_weight = std::fabs(mass - 1.0) < 1e-12;
    if (!random_weight)
        for (const auto& a : rho)
            if (std::fabs(a.mass - 1.0) > 1e-12)
                throw domain_error(
                    "converse_experiment: rho must be a probability or a unit-mass list");

    ConverseReport rep;
    for (const auto& a : rho)
        rep.rho_alpha_norm += a.mass * std::pow(a.location, alpha);

    auto comparison = [&](double x) {
        return rep.rho_alpha_norm * std::pow(x, -alpha);
    };
    rep.x_levels = levels_from_tail(comparison, probs, 1.0);
    rep.input_profile = oscillation_profile_fn(
        [&](double x) { return mu.measure().tail(x); }, alpha,
        log_grid(1.0, rep.x_levels.back(), 400));

    std::vector<double> sums(n);
    parallel_for_indexed(n, [&](std::size_t i) {
        SplitMix64 g(derive_seed(seed, i));
        if (random_weight) {
            double u = g.next_open01(), theta = rho.back().location;
            for (const auto& a : rho) {
                if (u < a.mass) {
                    theta = a.location;
                    break;
                }
                u -= a.mass;
            }
            sums[i] = theta * mu.sample(g);
        } else {
            double s = 0.0;
            for (const auto& a : rho) s += a.location * mu.sample(g);
            sums[i] = s;
        }
    });

    rep.tail = empirical_tail(sums, rep.x_levels, ci_level);
    for (double x : rep.x_levels) rep.target.push_back(comparison(x));
    rep.ratio = tail_ratio(rep.tail, rep.target);
    rep.hill = hill_sweep(sums);
    return rep;
}

} // namespace rwt

#endif
