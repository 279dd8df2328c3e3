// SPDX-License-Identifier: Apache-2.0
//
// Karamata representation of slowly varying functions.  A slowly varying L
// is one of four types built from a convergent prefactor c(x) and long-tailed
// components U, V evaluated at log x:
//   type 1: L(x) = c(x)
//   type 2: L(x) = c(x) / P[V > log x]
//   type 3: L(x) = c(x) * P[U > log x]
//   type 4: L(x) = c(x) * P[U > log x] / P[V > log x]
// Class memberships (long-tailed, S*, S_d after exp) are declared
// certificates carried by the component families, not inferred numerically:
// they are not decidable from finitely many evaluations.

#ifndef RWT_SLOWLY_VARYING_HPP
#define RWT_SLOWLY_VARYING_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwt/common.hpp"

namespace rwt {

/// Declared tail-class memberships of a long-tailed component.
struct TailClassCertificates {
    bool long_tailed = false;
    bool hazard_rate_to_zero = false;
    bool in_s_star = false;          // U in S*
    bool in_s_d_after_exp = false;   // tail(exp(.)) in the density class S_d
};

/// Long-tailed positive random variable given by its tail function; used as
/// the U/V building block of slowly varying types 2-4.
class LongTailedComponent {
  public:
    enum class Family { weibull, lognormal, power, custom };

    /// P[W > u] = exp(-(u/scale)^shape), shape in (0,1).
    static LongTailedComponent weibull(double shape, double scale = 1.0) {
        if (!(shape > 0.0 && shape < 1.0) || !(scale > 0.0))
            throw domain_error("weibull component: shape in (0,1), scale > 0");
        LongTailedComponent c;
        c.family_ = Family::weibull;
        c.tail_ = [shape, scale](double u) {
            return u <= 0.0 ? 1.0 : std::exp(-std::pow(u / scale, shape));
        };
        c.certs_ = {true, true, true, true};
        c.describe_ = "weibull(shape=" + std::to_string(shape) + ")";
        return c;
    }

    /// P[W > u] = erfc((log u - mu)/(sigma*sqrt 2))/2 for u > 0.
    static LongTailedComponent lognormal(double mu, double sigma) {
        if (!(sigma > 0.0)) throw domain_error("lognormal component: sigma > 0");
        LongTailedComponent c;
        c.family_ = Family::lognormal;
        c.tail_ = [mu, sigma](double u) {
            if (u <= 0.0) return 1.0;
            return 0.5 * std::erfc((std::log(u) - mu) / (sigma * std::sqrt(2.0)));
        };
        c.certs_ = {true, true, true, true};
        c.describe_ = "lognormal";
        return c;
    }

    /// P[W > u] = (1 + u/scale)^(-eta); in S* only when the mean is finite.
    static LongTailedComponent power(double eta, double scale = 1.0) {
        if (!(eta > 0.0) || !(scale > 0.0))
            throw domain_error("power component: eta > 0, scale > 0");
        LongTailedComponent c;
        c.family_ = Family::power;
        c.tail_ = [eta, scale](double u) {
            return u <= 0.0 ? 1.0 : std::pow(1.0 + u / scale, -eta);
        };
        c.certs_ = {true, true, eta > 1.0, eta > 1.0};
        c.describe_ = "power(eta=" + std::to_string(eta) + ")";
        return c;
    }

    static LongTailedComponent custom(std::function<double(double)> tail,
                                      TailClassCertificates certs,
                                      std::string name = "custom") {
        LongTailedComponent c;
        c.family_ = Family::custom;
        c.tail_ = std::move(tail);
        c.certs_ = certs;
        c.describe_ = std::move(name);
        return c;
    }

    /// P[W > u]; must stay strictly positive for the component to sit in L.
    double tail(double u) const {
        const double t = tail_(u);
        if (!(t > 0.0) || t > 1.0)
            throw domain_error("long-tailed component tail out of (0,1] at u=" +
                               std::to_string(u));
        return t;
    }

    const TailClassCertificates& certificates() const { return certs_; }
    Family family() const { return family_; }
    const std::string& describe() const { return describe_; }

  private:
    Family family_ = Family::custom;
    std::function<double(double)> tail_;
    TailClassCertificates certs_;
    std::string describe_;
};

enum class SvType { type1 = 1, type2 = 2, type3 = 3, type4 = 4 };

/// One slowly varying function in Karamata form.
class SlowlyVaryingSpec {
  public:
    SlowlyVaryingSpec(SvType variant,
                      std::optional<LongTailedComponent> u = std::nullopt,
                      std::optional<LongTailedComponent> v = std::nullopt)
        : variant_(variant), u_(std::move(u)), v_(std::move(v)) {
        const bool needs_u = variant == SvType::type3 || variant == SvType::type4;
        const bool needs_v = variant == SvType::type2 || variant == SvType::type4;
        if (needs_u && !u_)
            throw config_error("slowly varying spec: variant needs a U component");
        if (needs_v && !v_)
            throw config_error("slowly varying spec: variant needs a V component");
    }

    static SlowlyVaryingSpec constant() { return SlowlyVaryingSpec(SvType::type1); }

    /// Replace the default c(x) == 1.  `limit` is the declared limit c.
    void set_prefactor(std::function<double(double)> c_fn, double limit) {
        if (!(limit > 0.0) || !std::isfinite(limit))
            throw domain_error("prefactor limit must be in (0,inf)");
        c_fn_ = std::move(c_fn);
        c_limit_ = limit;
    }

    double prefactor(double x) const {
        const double c = c_fn_ ? c_fn_(x) : 1.0;
        if (!(c > 0.0)) throw domain_error("prefactor c(x) must be positive");
        return c;
    }
    double prefactor_limit() const { return c_limit_; }

    /// Grid diagnostic for c(x) -> c: |c(x) - c| must be nonincreasing past
    /// x_star and vanish at the far end of the grid.
    bool prefactor_converges_on(double x_star,
                                const std::vector<double>& grid,
                                double tol = 1e-6) const {
        double prev = std::numeric_limits<double>::infinity();
        double last = prev;
        for (double x : grid) {
            if (x < x_star) continue;
            const double dev = std::fabs(prefactor(x) - c_limit_);
            if (dev > prev * (1.0 + 1e-12)) return false;
            prev = dev;
            last = dev;
        }
        return last <= tol * std::max(1.0, c_limit_);
    }

    SvType variant() const { return variant_; }
    const std::optional<LongTailedComponent>& u_component() const { return u_; }
    const std::optional<LongTailedComponent>& v_component() const { return v_; }

    /// L(x) for x >= 1.
    double eval(double x) const {
        if (!(x >= 1.0)) throw domain_error("sv_eval: x >= 1 required");
        const double lx = std::log(x);
        const double c = prefactor(x);
        double value = c;
        switch (variant_) {
            case SvType::type1: break;
            case SvType::type2: value = c / v_->tail(lx); break;
            case SvType::type3: value = c * u_->tail(lx); break;
            case SvType::type4: value = c * u_->tail(lx) / v_->tail(lx); break;
        }
        if (!(value > 0.0) || !std::isfinite(value))
            throw domain_error("slowly varying value not positive finite");
        return value;
    }

  private:
    SvType variant_;
    std::optional<LongTailedComponent> u_, v_;
    std::function<double(double)> c_fn_; // empty -> identically 1
    double c_limit_ = 1.0;
};

/// Free-function form of SlowlyVaryingSpec::eval.
inline double sv_eval(const SlowlyVaryingSpec& spec, double x) { return spec.eval(x); }

} // namespace rwt

#endif
