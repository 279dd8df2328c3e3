// SPDX-License-Identifier: Apache-2.0
//
// Regularly varying laws F with tail F̄(x) = x^(-alpha) L(x), clipped to
// [0,1] below the support edge x_min.  The body of the distribution is not
// modelled: all mass sits above x_min exactly as the tail formula dictates,
// which keeps quantiles invertible.  Built-in families
//   pareto(alpha, x_min)           L == 1
//   log_pareto(alpha, gamma)       L(x) = (1 + log x)^gamma
//   weibull_sv(alpha)              L(x) = exp(-sqrt(log x))
// cover the DZ conditions: each condition has one family that satisfies it
// analytically.

#ifndef RWT_REGVAR_HPP
#define RWT_REGVAR_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwt/common.hpp"
#include "rwt/quadrature.hpp"
#include "rwt/slowly_varying.hpp"

namespace rwt {

class RegVarLaw {
  public:
    enum class Family { pareto, log_pareto, weibull_sv, custom };

    RegVarLaw(double alpha, SlowlyVaryingSpec sv, double x_min = 1.0)
        : alpha_(alpha), sv_(std::move(sv)), x_min_(x_min) {
        if (!(alpha > 0.0)) throw domain_error("RegVarLaw: alpha must be positive");
        if (!(x_min > 0.0)) throw domain_error("RegVarLaw: x_min must be positive");
    }

    // -- built-in families ---------------------------------------------------

    static RegVarLaw pareto(double alpha, double x_min = 1.0) {
        // classic scaled Pareto: tail (x/x_min)^(-alpha), so L == x_min^alpha
        SlowlyVaryingSpec sv = SlowlyVaryingSpec::constant();
        if (x_min != 1.0) {
            const double scale = std::pow(x_min, alpha);
            sv.set_prefactor([scale](double) { return scale; }, scale);
        }
        RegVarLaw law(alpha, std::move(sv), x_min);
        law.family_ = Family::pareto;
        return law;
    }

    /// Tail x^(-alpha) (1+log x)^gamma.  For gamma > 0 the support edge moves
    /// right to keep the tail nonincreasing and equal to 1 at x_min.
    static RegVarLaw log_pareto(double alpha, double gamma) {
        if (gamma == 0.0) return pareto(alpha);
        SlowlyVaryingSpec sv =
            gamma > 0.0
                ? SlowlyVaryingSpec(SvType::type2, std::nullopt,
                                    LongTailedComponent::power(gamma))
                : SlowlyVaryingSpec(SvType::type3,
                                    LongTailedComponent::power(-gamma));
        double x_min = 1.0;
        if (gamma > 0.0) {
            // smallest x on the decreasing branch with x^(-a)(1+log x)^g = 1;
            // the branch starts where the log-derivative turns negative
            const double branch = std::exp(std::max(0.0, gamma / alpha - 1.0));
            auto f = [&](double x) {
                return -alpha * std::log(x) + gamma * std::log1p(std::log(x));
            };
            double lo = branch, hi = std::max(2.0 * branch, 2.0);
            while (f(hi) > 0.0) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = std::sqrt(lo * hi);
                (f(mid) > 0.0 ? lo : hi) = mid;
                if (hi / lo - 1.0 < 1e-14) break;
            }
            x_min = std::sqrt(lo * hi);
        }
        RegVarLaw law(alpha, std::move(sv), x_min);
        law.family_ = Family::log_pareto;
        law.gamma_ = gamma;
        return law;
    }

    /// Tail x^(-alpha) exp(-((log x)/scale)^shape), shape in (0,1).
    static RegVarLaw weibull_sv(double alpha, double shape = 0.5,
                                double scale = 1.0) {
        RegVarLaw law(alpha,
                      SlowlyVaryingSpec(SvType::type3,
                                        LongTailedComponent::weibull(shape, scale)),
                      1.0);
        law.family_ = Family::weibull_sv;
        return law;
    }

    // -- basic accessors ------------------------------------------------------

    double alpha() const { return alpha_; }
    double x_min() const { return x_min_; }
    Family family() const { return family_; }
    double gamma() const { return gamma_; }
    const SlowlyVaryingSpec& sv() const { return sv_; }

    void set_left_tail(std::function<double(double)> lt) { left_tail_ = std::move(lt); }
    bool has_left_tail() const { return static_cast<bool>(left_tail_); }
    /// P[X < -x] for x > 0; identically zero for positive laws.
    double left_tail(double x) const { return left_tail_ ? left_tail_(x) : 0.0; }

    double slowly_varying(double x) const { return sv_.eval(x); }

    // -- tail / quantile / sampling -------------------------------------------

    /// P[X > x]; 1 below the support edge, min(1, x^(-a) L(x)) above.
    double tail(double x) const {
        if (x < x_min_) return 1.0;
        const double v = std::pow(x, -alpha_) * sv_.eval(std::max(x, 1.0));
        return v >= 1.0 ? 1.0 : v;
    }

    /// Smallest x with F(x) >= p.  Closed form for pareto, monotone bisection
    /// on the tail otherwise (relative width 1e-12, 200-iteration cap).
    double quantile(double p) const {
        if (!(p >= 0.0 && p < 1.0)) throw domain_error("quantile: p in [0,1) required");
        const double q = 1.0 - p; // target tail value
        if (q >= tail(x_min_)) return x_min_;
        if (family_ == Family::pareto) return x_min_ * std::pow(q, -1.0 / alpha_);

        double lo = x_min_, hi = std::max(2.0 * x_min_, 2.0);
        int guard = 0;
        while (tail(hi) > q) {
            hi *= 2.0;
            if (++guard > 1060)
                throw convergence_error("quantile: failed to bracket the target");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (tail(mid) > q ? lo : hi) = mid;
            if ((hi - lo) <= 1e-12 * hi) break;
        }
        return 0.5 * (lo + hi);
    }

    /// One inverse-transform draw from its own derived stream.
    double sample_one(std::uint64_t master_seed, std::uint64_t index) const {
        SplitMix64 g(derive_seed(master_seed, index));
        return quantile(1.0 - g.next_open01());
    }

    /// n i.i.d. draws; draw i depends only on (seed, i), so batches are
    /// invariant to internal parallelism.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
        if (n < 1) throw domain_error("sample: n >= 1 required");
        std::vector<double> out(n);
        parallel_for_indexed(n, [&](std::size_t i) { out[i] = sample_one(seed, i); });
        return out;
    }

    // -- truncated moments -----------------------------------------------------

    /// int_{x_min}^{x} v^gamma dF(v) via tail integration by parts; closed
    /// form for pareto, adaptive quadrature (abs tol 1e-10) otherwise.
    double truncated_moment(double power, double x) const {
        if (!(x >= x_min_)) throw domain_error("truncated_moment: x >= x_min required");
        if (x == x_min_) return 0.0;
        if (family_ == Family::pareto) {
            if (power == alpha_)
                return alpha_ * std::pow(x_min_, alpha_) * std::log(x / x_min_);
            return alpha_ * std::pow(x_min_, alpha_) *
                   (std::pow(x, power - alpha_) - std::pow(x_min_, power - alpha_)) /
                   (power - alpha_);
        }
        // d(v^g) against the tail on the log scale: v = e^u
        auto f = [&](double u) {
            const double v = std::exp(u);
            return std::pow(v, power) * tail(v);
        };
        const double body =
            power * integrate(f, std::log(x_min_), std::log(x), 1e-12, 1e-11);
        return std::pow(x_min_, power) - std::pow(x, power) * tail(x) + body;
    }

    /// m(x) = int_0^x v^alpha dF(v); grows without bound iff E[X^alpha] = inf.
    double truncated_alpha_moment(double x) const {
        return truncated_moment(alpha_, x);
    }

    /// E[X^p]; requires p < alpha.  Closed form for pareto.
    double moment(double p) const {
        if (!(p < alpha_)) throw strip_error("moment: E[X^p] diverges for p >= alpha");
        if (!(p > 0.0)) throw domain_error("moment: p > 0 required");
        if (family_ == Family::pareto)
            return std::pow(x_min_, p) * alpha_ / (alpha_ - p);
        const double body = p * integrate_to_inf(
            [&](double v) { return std::pow(v, p - 1.0) * tail(v); }, x_min_,
            1e-11, 1e-12);
        return std::pow(x_min_, p) + body;
    }

  private:
    double alpha_;
    SlowlyVaryingSpec sv_;
    double x_min_;
    Family family_ = Family::custom;
    double gamma_ = 0.0;
    std::function<double(double)> left_tail_;
};

/// m(x) bound to one law, as a reusable value object.
class KaramataIntegral {
  public:
    explicit KaramataIntegral(RegVarLaw law) : law_(std::move(law)) {}
    double operator()(double x) const { return law_.truncated_alpha_moment(x); }
    const RegVarLaw& law() const { return law_; }

  private:
    RegVarLaw law_;
};

// ---------------------------------------------------------------------------
// Potter envelope

struct PotterViolation {
    double x, u, required_m;
};

struct PotterReport {
    double m = 0.0;                        // smallest grid-feasible constant
    std::vector<PotterViolation> violations; // pairs needing more than the cap
};

/// Grid search for the Potter-type envelope
///   tail(x/u)/tail(x) <= M u^(alpha-eps)  for u < 1
///   tail(x/u)/tail(x) <= M u^(alpha+eps)  for 1 <= u <= x/x0
/// over all grid x > x0.  Pairs whose required M exceeds `cap` are reported
/// as violations instead of inflating M.
inline PotterReport potter_envelope_check(const RegVarLaw& law, double eps,
                                          double x0,
                                          const std::vector<double>& grid,
                                          double cap = 1e6) {
    if (!(eps > 0.0 && eps < law.alpha()))
        throw domain_error("potter_envelope_check: 0 < eps < alpha required");
    if (!(x0 > 0.0)) throw domain_error("potter_envelope_check: x0 > 0 required");

    PotterReport report;
    const std::vector<double> u_small = log_grid(1e-8, 1.0, 81); // last point u=1
    for (double x : grid) {
        if (!(x > x0)) continue;
        const double tx = law.tail(x);
        auto account = [&](double u, double envelope_pow) {
            const double ratio = law.tail(x / u) / tx;
            const double required = ratio / std::pow(u, envelope_pow);
            if (required > cap)
                report.violations.push_back({x, u, required});
            else if (required > report.m)
                report.m = required;
        };
        for (std::size_t i = 0; i + 1 < u_small.size(); ++i)
            account(u_small[i], law.alpha() - eps);
        if (x / x0 >= 1.0)
            for (double u : log_grid(1.0, x / x0, 64))
                account(u, law.alpha() + eps);
    }
    return report;
}

} // namespace rwt

#endif
