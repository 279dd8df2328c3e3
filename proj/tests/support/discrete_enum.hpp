// SPDX-License-Identifier: Apache-2.0
//
// Test-only brute-force oracle: tiny discrete models of (Theta_t, X_t) pairs
// whose exact probabilities come from full enumeration of the product space.
// Used to assert the comparison inequalities between P[sum Theta_t X_t > x]
// and the single/pairwise exceedance sums as exact inequalities.

#ifndef RWT_TESTS_DISCRETE_ENUM_HPP
#define RWT_TESTS_DISCRETE_ENUM_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "rwt/common.hpp"

namespace rwt_test {

struct DiscreteVar {
    std::vector<std::pair<double, double>> atoms; // (value, probability)
};

struct DiscreteModel {
    std::vector<DiscreteVar> thetas;
    std::vector<DiscreteVar> xs;

    std::size_t terms() const { return thetas.size(); }
};

/// P[Theta_t X_t > y], exact.
inline double prob_term_exceeds(const DiscreteModel& m, std::size_t t, double y) {
    double p = 0.0;
    for (const auto& [tv, tp] : m.thetas[t].atoms)
        for (const auto& [xv, xp] : m.xs[t].atoms)
            if (tv * xv > y) p += tp * xp;
    return p;
}

/// P[sum_t Theta_t X_t > x], exact, by enumerating every joint state.
inline double prob_sum_exceeds(const DiscreteModel& m, double x) {
    const std::size_t k = m.terms();
    double total = 0.0;
    // odometer over 2k indices
    std::vector<std::size_t> idx(2 * k, 0);
    while (true) {
        double prob = 1.0, sum = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            const auto& ta = m.thetas[t].atoms[idx[2 * t]];
            const auto& xa = m.xs[t].atoms[idx[2 * t + 1]];
            prob *= ta.second * xa.second;
            sum += ta.first * xa.first;
        }
        if (sum > x) total += prob;
        std::size_t d = 0;
        for (; d < 2 * k; ++d) {
            const std::size_t limit = (d % 2 == 0) ? m.thetas[d / 2].atoms.size()
                                                   : m.xs[d / 2].atoms.size();
            if (++idx[d] < limit) break;
            idx[d] = 0;
        }
        if (d == 2 * k) break;
    }
    return total;
}

/// Lower comparison: P[sum > x] >= sum_t P[Y_t > x] - sum_{s != t} P[Y_s > x] P[Y_t > x]
/// (ordered pairs; terms are independent here so pair joints factorize).
inline bool check_comp_up(const DiscreteModel& m, double x, double slack = 1e-12) {
    const std::size_t k = m.terms();
    double singles = 0.0, pairs = 0.0;
    std::vector<double> pt(k);
    for (std::size_t t = 0; t < k; ++t) {
        pt[t] = prob_term_exceeds(m, t, x);
        singles += pt[t];
    }
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t t = 0; t < k; ++t)
            if (s != t) pairs += pt[s] * pt[t];
    return prob_sum_exceeds(m, x) >= singles - pairs - slack;
}

/// Upper comparison with 1/2 < delta < 1 and m >= 2 terms:
/// P[sum > x] <= sum_t P[Y_t > delta x]
///               + sum_{s != t} P[Y_s > (1-delta)x/(m-1)] P[Y_t > (1-delta)x/(m-1)].
inline bool check_comp_dn(const DiscreteModel& m, double x, double delta,
                          double slack = 1e-12) {
    const std::size_t k = m.terms();
    if (k < 2) throw rwt::domain_error("check_comp_dn: at least two terms");
    const double cut = (1.0 - delta) * x / double(k - 1);
    double singles = 0.0, pairs = 0.0;
    std::vector<double> pc(k);
    for (std::size_t t = 0; t < k; ++t) {
        singles += prob_term_exceeds(m, t, delta * x);
        pc[t] = prob_term_exceeds(m, t, cut);
    }
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t t = 0; t < k; ++t)
            if (s != t) pairs += pc[s] * pc[t];
    return prob_sum_exceeds(m, x) <= singles + pairs + slack;
}

/// Random model with 2..max_terms terms and 1..max_atoms atoms per variable.
inline DiscreteModel random_model(rwt::SplitMix64& g, std::size_t max_terms = 4,
                                  std::size_t max_atoms = 3) {
    DiscreteModel m;
    const std::size_t k = 2 + g.next_u64() % (max_terms - 1);
    auto make_var = [&](bool allow_zero) {
        DiscreteVar v;
        const std::size_t na = 1 + g.next_u64() % max_atoms;
        double left = 1.0;
        for (std::size_t i = 0; i < na; ++i) {
            double val = allow_zero && (g.next_u64() % 4 == 0)
                             ? 0.0
                             : std::exp(3.0 * (g.next_open01() - 0.3));
            double p = (i + 1 == na) ? left : left * g.next_open01();
            left -= (i + 1 == na) ? 0.0 : p;
            v.atoms.push_back({val, p});
        }
        return v;
    };
    for (std::size_t t = 0; t < k; ++t) {
        m.thetas.push_back(make_var(true));
        m.xs.push_back(make_var(false));
    }
    return m;
}

/// A few exceedance levels spread over the model's reachable sums.
inline std::vector<double> probe_levels(const DiscreteModel& m) {
    double max_sum = 0.0;
    for (std::size_t t = 0; t < m.terms(); ++t) {
        double tmax = 0.0, xmax = 0.0;
        for (const auto& [v, p] : m.thetas[t].atoms) tmax = std::max(tmax, v);
        for (const auto& [v, p] : m.xs[t].atoms) xmax = std::max(xmax, v);
        max_sum += tmax * xmax;
    }
    return {0.1 * max_sum, 0.35 * max_sum, 0.6 * max_sum, 0.9 * max_sum,
            1.01 * max_sum};
}

} // namespace rwt_test

#endif
