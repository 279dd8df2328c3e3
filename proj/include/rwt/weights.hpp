// SPDX-License-Identifier: Apache-2.0
//
// Weight laws Theta and weight sequences {Theta_t}.  Every law carries a
// complex moment oracle s -> E[Theta^s]; sequences carry analytic
// convergence certificates for sums like sum_t E[Theta_t^p], because
// convergence is not decidable from finitely many terms.  Includes the
// two-point pathological rule
//   Theta_t in {2^t / t^(2/alpha), 0},  P = {2^(-t alpha), 1 - 2^(-t alpha)}
// whose alpha-moment sum is the Basel sum pi^2/6 while every
// (alpha+eps)-moment sum diverges.

#ifndef RWT_WEIGHTS_HPP
#define RWT_WEIGHTS_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwt/common.hpp"
#include "rwt/quadrature.hpp"
#include "rwt/special.hpp"

namespace rwt {

using complex_t = std::complex<double>;

/// How fast P[Theta > x] vanishes; drives the o(.) certificates in the DZ
/// condition reports.
enum class TailDecay {
    bounded_support,  // tail identically 0 beyond the essential sup
    superpolynomial,  // o(x^-c) for every c (lognormal-type)
    polynomial_like,  // power tail, possibly with log corrections
    unknown,
};

class WeightLaw {
  public:
    enum class Rep { atoms, degenerate, lognormal, uniform, beta_scaled, custom_tail };

    struct Atom {
        double value;
        double prob;
    };

    // -- factories ------------------------------------------------------------

    /// Finite atom list; zero atoms are allowed (the pathological rule has
    /// them) and probabilities must sum to 1.
    static WeightLaw atoms(std::vector<Atom> as) {
        if (as.empty()) throw domain_error("weight atoms: empty list");
        double mass = 0.0;
        for (const auto& a : as) {
            if (a.value < 0.0 || !(a.prob >= 0.0))
                throw domain_error("weight atoms: values >= 0, probs >= 0");
            mass += a.prob;
        }
        if (std::fabs(mass - 1.0) > 1e-12)
            throw domain_error("weight atoms: probabilities must sum to 1");
        WeightLaw w;
        w.rep_ = Rep::atoms;
        w.atoms_ = std::move(as);
        bool has_zero = false;
        double sup = 0.0;
        for (const auto& a : w.atoms_) {
            if (a.value == 0.0 && a.prob > 0.0) has_zero = true;
            sup = std::max(sup, a.value);
        }
        w.strip_lo_ = has_zero ? 0.0 : -std::numeric_limits<double>::infinity();
        w.ess_sup_ = sup;
        w.decay_ = TailDecay::bounded_support;
        return w;
    }

    static WeightLaw two_point(double v1, double p1, double v2, double p2) {
        return atoms({{v1, p1}, {v2, p2}});
    }

    static WeightLaw degenerate(double c) {
        if (!(c > 0.0)) throw domain_error("degenerate weight: c > 0 required");
        WeightLaw w;
        w.rep_ = Rep::degenerate;
        w.atoms_ = {{c, 1.0}};
        w.ess_sup_ = c;
        w.strip_lo_ = -std::numeric_limits<double>::infinity();
        w.decay_ = TailDecay::bounded_support;
        return w;
    }

    /// log Theta ~ N(mu, sigma^2); E[Theta^s] = exp(s mu + s^2 sigma^2 / 2).
    static WeightLaw lognormal(double mu, double sigma) {
        if (!(sigma > 0.0)) throw domain_error("lognormal weight: sigma > 0");
        WeightLaw w;
        w.rep_ = Rep::lognormal;
        w.mu_ = mu;
        w.sigma_ = sigma;
        w.strip_lo_ = -std::numeric_limits<double>::infinity();
        w.decay_ = TailDecay::superpolynomial;
        return w;
    }

    static WeightLaw uniform(double a, double b) {
        if (!(a >= 0.0 && b > a)) throw domain_error("uniform weight: 0 <= a < b");
        WeightLaw w;
        w.rep_ = Rep::uniform;
        w.lo_ = a;
        w.hi_ = b;
        w.ess_sup_ = b;
        w.strip_lo_ = a > 0.0 ? -std::numeric_limits<double>::infinity() : -1.0;
        w.decay_ = TailDecay::bounded_support;
        return w;
    }

    /// Theta = scale * B with B ~ Beta(p, q), p, q >= 1.
    static WeightLaw beta_scaled(double p, double q, double scale) {
        if (!(p >= 1.0 && q >= 1.0 && scale > 0.0))
            throw domain_error("beta weight: p, q >= 1 and scale > 0");
        WeightLaw w;
        w.rep_ = Rep::beta_scaled;
        w.beta_p_ = p;
        w.beta_q_ = q;
        w.hi_ = scale;
        w.ess_sup_ = scale;
        w.strip_lo_ = -p;
        w.decay_ = TailDecay::bounded_support;
        return w;
    }

    /// Law given only through its tail function (diagnostics-oriented);
    /// moments come from E[Theta^s] = s int x^(s-1) P[Theta > x] dx.
    static WeightLaw custom_tail(std::function<double(double)> tail,
                                 TailDecay decay, double moment_strip_hi) {
        WeightLaw w;
        w.rep_ = Rep::custom_tail;
        w.tail_fn_ = std::move(tail);
        w.decay_ = decay;
        w.strip_lo_ = 0.0;
        w.strip_hi_ = moment_strip_hi;
        return w;
    }

    /// Term t of the pathological rule at tail index alpha.
    static WeightLaw pathological_term(double alpha, std::size_t t) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw domain_error("pathological rule: alpha in (0,1) required");
        if (t < 1) throw domain_error("pathological rule: t >= 1");
        const double td = static_cast<double>(t);
        const double value = std::pow(2.0, td) / std::pow(td, 2.0 / alpha);
        const double p = std::pow(2.0, -td * alpha);
        return atoms({{value, p}, {0.0, 1.0 - p}});
    }

    // -- oracles ---------------------------------------------------------------

    Rep rep() const { return rep_; }
    TailDecay decay() const { return decay_; }
    std::optional<double> essential_sup() const { return ess_sup_; }
    const std::vector<Atom>& atom_list() const { return atoms_; }

    /// Declared strip of finite moments: E[Theta^s] exists for
    /// strip_lo < Re s < strip_hi (s = 0 always allowed).
    std::pair<double, double> moment_strip() const { return {strip_lo_, strip_hi_}; }

    bool in_strip(double re_s) const {
        if (re_s == 0.0) return true;
        return re_s > strip_lo_ && re_s < strip_hi_;
    }

    /// E[Theta^s] for complex s.  Exact for atom-type laws (zero atoms
    /// contribute nothing unless s = 0), closed form for lognormal/uniform,
    /// quadrature elsewhere (relative tolerance 1e-10).
    complex_t moment(complex_t s) const {
        if (s == complex_t(0.0, 0.0)) return 1.0; // normalization, exactly
        if (!in_strip(s.real()))
            throw strip_error("weight moment: Re(s) outside the finite-moment strip");
        switch (rep_) {
            case Rep::atoms:
            case Rep::degenerate: {
                complex_t acc = 0.0;
                for (const auto& a : atoms_)
                    if (a.value > 0.0)
                        acc += a.prob * std::exp(s * std::log(a.value));
                return acc;
            }
            case Rep::lognormal:
                return std::exp(s * mu_ + 0.5 * s * s * sigma_ * sigma_);
            case Rep::uniform: {
                const complex_t sp1 = s + 1.0;
                const complex_t top =
                    std::exp(sp1 * std::log(hi_)) -
                    (lo_ > 0.0 ? std::exp(sp1 * std::log(lo_)) : complex_t(0.0));
                return top / (sp1 * (hi_ - lo_));
            }
            case Rep::beta_scaled: {
                if (s.imag() == 0.0) {
                    const double sr = s.real();
                    return std::pow(hi_, sr) *
                           std::exp(log_beta(beta_p_ + sr, beta_q_) -
                                    log_beta(beta_p_, beta_q_));
                }
                const double lb = log_beta(beta_p_, beta_q_);
                auto f = [&](double t) -> complex_t {
                    const double logpdf = (beta_p_ - 1.0) * std::log(t) +
                                          (beta_q_ - 1.0) * std::log1p(-t) - lb;
                    return std::exp(s * std::log(hi_ * t) + logpdf);
                };
                return integrate(f, 0.0, 1.0, 1e-10, 1e-13);
            }
            case Rep::custom_tail: {
                auto f = [&](double x) -> complex_t {
                    return std::exp((s - 1.0) * std::log(x)) * tail_fn_(x);
                };
                // split at 1 so the to-infinity walker starts on a sane scale
                complex_t head = integrate(
                    [&](double x) -> complex_t { return f(x); }, 1e-14, 1.0,
                    1e-10, 1e-13);
                complex_t body = integrate_to_inf(
                    [&](double x) -> complex_t { return f(x); }, 1.0, 1e-10, 1e-13);
                return s * (head + body);
            }
        }
        throw domain_error("weight moment: unhandled representation");
    }

    double moment(double s) const { return moment(complex_t(s, 0.0)).real(); }

    /// P[Theta > x].
    double tail(double x) const {
        switch (rep_) {
            case Rep::atoms:
            case Rep::degenerate: {
                double p = 0.0;
                for (const auto& a : atoms_)
                    if (a.value > x) p += a.prob;
                return p;
            }
            case Rep::lognormal:
                if (x <= 0.0) return 1.0;
                return 0.5 * std::erfc((std::log(x) - mu_) / (sigma_ * std::sqrt(2.0)));
            case Rep::uniform:
                if (x < lo_) return 1.0;
                if (x >= hi_) return 0.0;
                return (hi_ - x) / (hi_ - lo_);
            case Rep::beta_scaled:
                if (x <= 0.0) return 1.0;
                if (x >= hi_) return 0.0;
                return beta_sf(beta_p_, beta_q_, x / hi_);
            case Rep::custom_tail:
                return x <= 0.0 ? 1.0 : std::min(1.0, tail_fn_(x));
        }
        return 0.0;
    }

    /// One draw using the supplied stream.
    double sample(SplitMix64& g) const {
        switch (rep_) {
            case Rep::atoms:
            case Rep::degenerate: {
                double u = g.next_open01();
                for (const auto& a : atoms_) {
                    if (u < a.prob) return a.value;
                    u -= a.prob;
                }
                return atoms_.back().value;
            }
            case Rep::lognormal: {
                const double u1 = g.next_open01(), u2 = g.next_open01();
                const double z =
                    std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
                return std::exp(mu_ + sigma_ * z);
            }
            case Rep::uniform:
                return lo_ + (hi_ - lo_) * g.next_open01();
            case Rep::beta_scaled:
                return hi_ * inc_beta_inv(beta_p_, beta_q_, g.next_open01());
            case Rep::custom_tail: {
                const double u = g.next_open01();
                double lo = 0.0, hi = 1.0;
                while (tail(hi) > u) hi *= 2.0;
                for (int i = 0; i < 200; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (tail(mid) > u ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
        }
        throw domain_error("weight sample: unhandled representation");
    }

  private:
    Rep rep_ = Rep::degenerate;
    std::vector<Atom> atoms_;
    double mu_ = 0.0, sigma_ = 1.0;       // lognormal
    double lo_ = 0.0, hi_ = 1.0;          // uniform / beta scale
    double beta_p_ = 1.0, beta_q_ = 1.0;  // beta
    std::function<double(double)> tail_fn_;
    std::optional<double> ess_sup_;
    double strip_lo_ = -std::numeric_limits<double>::infinity();
    double strip_hi_ = std::numeric_limits<double>::infinity();
    TailDecay decay_ = TailDecay::unknown;
};

// ---------------------------------------------------------------------------
// Sum certificates
//
// Generator rules expose their moment terms in geometric-polynomial form
// coef * r^t * t^a, which makes convergence of sum_t f(t)^q decidable:
// r^q < 1 converges, r^q > 1 diverges, r^q == 1 converges iff q*a < -1.

enum class SumClass { converges, diverges };

struct SumCertificate {
    SumClass cls = SumClass::converges;
    double value = 0.0;           // meaningful when converging
    double remainder_bound = 0.0; // rigorous bound on the dropped tail
    std::size_t terms_used = 0;
    bool exact = false;           // finite sum evaluated completely
    std::string note;
};

class WeightSequence {
  public:
    enum class Kind { explicit_list, iid_repeat, geometric_degenerate, pathological };

    // -- factories ------------------------------------------------------------

    static WeightSequence explicit_list(std::vector<WeightLaw> laws,
                                        double alpha_hint = 1.0) {
        if (laws.empty()) throw domain_error("weight sequence: empty list");
        WeightSequence s;
        s.kind_ = Kind::explicit_list;
        s.laws_ = std::move(laws);
        s.alpha_hint_ = alpha_hint;
        return s;
    }

    /// The same law repeated `count` times (a finite i.i.d. block).
    static WeightSequence iid(WeightLaw law, std::size_t count,
                              double alpha_hint = 1.0) {
        if (count < 1) throw domain_error("weight sequence: count >= 1");
        WeightSequence s;
        s.kind_ = Kind::iid_repeat;
        s.laws_ = {std::move(law)};
        s.count_ = count;
        s.alpha_hint_ = alpha_hint;
        return s;
    }

    /// Theta_t == c * r^t (degenerate), an infinite rule with geometric sums.
    static WeightSequence geometric(double c, double r, double alpha_hint = 1.0) {
        if (!(c > 0.0) || !(r > 0.0 && r < 1.0))
            throw domain_error("geometric sequence: c > 0 and r in (0,1)");
        WeightSequence s;
        s.kind_ = Kind::geometric_degenerate;
        s.c_ = c;
        s.r_ = r;
        s.alpha_hint_ = alpha_hint;
        return s;
    }

    /// The pathological rule for a given alpha in (0,1).
    static WeightSequence pathological(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw domain_error("pathological sequence: alpha in (0,1) required");
        WeightSequence s;
        s.kind_ = Kind::pathological;
        s.alpha_hint_ = alpha;
        return s;
    }

    // -- structure -------------------------------------------------------------

    Kind kind() const { return kind_; }
    double alpha_hint() const { return alpha_hint_; }
    bool is_infinite() const {
        return kind_ == Kind::geometric_degenerate || kind_ == Kind::pathological;
    }
    /// Number of terms for finite sequences; 0 means infinite.
    std::size_t finite_size() const {
        switch (kind_) {
            case Kind::explicit_list: return laws_.size();
            case Kind::iid_repeat: return count_;
            default: return 0;
        }
    }

    /// Law of Theta_t, t >= 1.
    WeightLaw law(std::size_t t) const {
        if (t < 1) throw domain_error("weight sequence: t >= 1 required");
        switch (kind_) {
            case Kind::explicit_list:
                if (t > laws_.size())
                    throw domain_error("weight sequence: index past end of list");
                return laws_[t - 1];
            case Kind::iid_repeat:
                if (t > count_)
                    throw domain_error("weight sequence: index past end of list");
                return laws_[0];
            case Kind::geometric_degenerate:
                return WeightLaw::degenerate(c_ * std::pow(r_, static_cast<double>(t)));
            case Kind::pathological:
                return WeightLaw::pathological_term(alpha_hint_, t);
        }
        throw domain_error("weight sequence: unhandled kind");
    }

    /// E[Theta_t^p], analytic per rule (avoids building the law object).
    double moment_term(std::size_t t, double p) const {
        switch (kind_) {
            case Kind::geometric_degenerate:
                return std::pow(c_ * std::pow(r_, static_cast<double>(t)), p);
            case Kind::pathological: {
                const double td = static_cast<double>(t);
                // (2^t t^(-2/alpha))^p 2^(-t alpha) = 2^(t(p-alpha)) t^(-2p/alpha)
                return std::exp2(td * (p - alpha_hint_)) *
                       std::pow(td, -2.0 * p / alpha_hint_);
            }
            default:
                return law(t).moment(p);
        }
    }

    // -- certified sums ----------------------------------------------------------

    /// Classification data for the generator-rule term f(t) = E[Theta_t^p]
    /// written as coef * r^t * t^a; empty for finite sequences.
    struct GeomPoly {
        double log_r;
        double poly;
    };
    std::optional<GeomPoly> term_shape(double p) const {
        switch (kind_) {
            case Kind::geometric_degenerate:
                return GeomPoly{p * std::log(r_), 0.0};
            case Kind::pathological:
                return GeomPoly{(p - alpha_hint_) * std::log(2.0),
                                -2.0 * p / alpha_hint_};
            default:
                return std::nullopt;
        }
    }

    /// Certificate for sum_t (E[Theta_t^p1] + E[Theta_t^p2])^q, the common
    /// shape of the RW-type sums; pass nullopt to drop the second exponent.
    SumCertificate combined_sum(double p1, std::optional<double> p2, double q) const;

    /// Certificate for sum_t (E[Theta_t^p])^q.
    SumCertificate sum_pow(double p, double q) const {
        return combined_sum(p, std::nullopt, q);
    }
    /// Certificate for sum_t E[Theta_t^p].
    SumCertificate sum(double p) const { return combined_sum(p, std::nullopt, 1.0); }

    /// Rigorous upper bound on sum_{t > t_from} E[Theta_t^p] for converging
    /// rules; throws for diverging ones.
    double tail_sum_bound(double p, std::size_t t_from) const;

  private:
    Kind kind_ = Kind::explicit_list;
    std::vector<WeightLaw> laws_;
    std::size_t count_ = 0;
    double c_ = 1.0, r_ = 0.5;
    double alpha_hint_ = 1.0;
};

inline SumCertificate WeightSequence::combined_sum(double p1,
                                                   std::optional<double> p2,
                                                   double q) const {
    auto term = [&](std::size_t t) {
        const double base =
            moment_term(t, p1) + (p2 ? moment_term(t, *p2) : 0.0);
        return q == 1.0 ? base : std::pow(base, q);
    };

    SumCertificate cert;
    if (!is_infinite()) {
        const std::size_t n = finite_size();
        for (std::size_t t = 1; t <= n; ++t) cert.value += term(t);
        cert.cls = SumClass::converges;
        cert.exact = true;
        cert.terms_used = n;
        cert.note = "finite sequence, sum evaluated completely";
        return cert;
    }

    // dominant geometric-polynomial shape of the combined term
    const auto s1 = *term_shape(p1);
    std::optional<GeomPoly> s2 = p2 ? term_shape(*p2) : std::nullopt;
    GeomPoly dom = s1;
    if (s2 && (s2->log_r > dom.log_r ||
               (s2->log_r == dom.log_r && s2->poly > dom.poly)))
        dom = *s2;
    const double log_r_eff = q * dom.log_r;
    const double poly_eff = q * dom.poly;

    if (log_r_eff > 0.0 || (log_r_eff == 0.0 && poly_eff >= -1.0)) {
        cert.cls = SumClass::diverges;
        cert.note = log_r_eff > 0.0 ? "geometric ratio exceeds 1"
                                    : "p-series exponent >= -1";
        return cert;
    }

    cert.cls = SumClass::converges;
    if (log_r_eff < 0.0) {
        // Geometric decay.  For t beyond the current index,
        //   f(t+k) <= f(t) * exp(q*(log_r + a_+/t))^k
        // since (1+k/t)^a <= exp(a k / t) for a >= 0, so the remainder has a
        // rigorous geometric bound once the adjusted ratio drops below 1.
        const double a_plus =
            std::max(0.0, std::max(s1.poly, s2 ? s2->poly : s1.poly));
        double s = 0.0;
        std::size_t t = 1;
        double rem = std::numeric_limits<double>::infinity();
        for (; t <= 400000; ++t) {
            const double f = term(t);
            s += f;
            const double log_rho = q * (dom.log_r + a_plus / double(t));
            if (log_rho < 0.0) {
                const double rho = std::exp(log_rho);
                rem = f * rho / (1.0 - rho);
                if (rem < 1e-14 * (std::fabs(s) + 1e-300)) break;
            }
        }
        cert.value = s;
        cert.remainder_bound = rem;
        cert.terms_used = std::min<std::size_t>(t, 400000);
        cert.note = "geometric rule";
        return cert;
    }

    // Pure p-series coef * t^poly_eff with poly_eff < -1 (any geometric
    // subdominant part has died out long before the cut): midpoint tail
    // estimate with the coefficient read off the last computed term.
    const std::size_t cut = 20000;
    double s = 0.0;
    for (std::size_t t = 1; t <= cut; ++t) s += term(t);
    const double a = poly_eff;
    const double coef = term(cut) / std::pow(double(cut), a);
    const double tail_mid = coef * std::pow(cut + 0.5, a + 1.0) / (-a - 1.0);
    cert.value = s + tail_mid;
    // Euler-Maclaurin error of the midpoint tail estimate
    cert.remainder_bound = coef * std::fabs(a) * std::fabs(a + 1.0) / 24.0 *
                           std::pow(double(cut), a - 1.0) * 4.0;
    cert.terms_used = cut;
    cert.note = "p-series rule with midpoint tail correction";
    return cert;
}

inline double WeightSequence::tail_sum_bound(double p, std::size_t t_from) const {
    if (!is_infinite()) return 0.0;
    if (sum(p).cls == SumClass::diverges)
        throw strip_error("tail_sum_bound: series diverges");
    const auto shape = *term_shape(p);
    if (shape.log_r < 0.0) {
        // walk forward until the adjusted ratio exp(log_r + a_+/t) < 1, then
        // close with the geometric bound sum_k first * rho^k
        const double a_plus = std::max(0.0, shape.poly);
        double extra = 0.0;
        std::size_t t = t_from + 1;
        while (shape.log_r + a_plus / double(t) >= 0.0) {
            extra += moment_term(t, p);
            ++t;
            if (t > t_from + 1000000)
                throw convergence_error("tail_sum_bound: ratio never drops below 1");
        }
        const double rho = std::exp(shape.log_r + a_plus / double(t));
        return extra + moment_term(t, p) / (1.0 - rho);
    }
    // p-series coef * t^a with a < -1: integral bound from t_from
    const double a = shape.poly;
    const double coef =
        moment_term(t_from + 1, p) / std::pow(double(t_from + 1), a);
    return coef * std::pow(static_cast<double>(t_from), a + 1.0) / (-a - 1.0);
}

/// The sequence from the introduction's pathological example.
inline WeightSequence pathological_sequence(double alpha) {
    return WeightSequence::pathological(alpha);
}

} // namespace rwt

#endif
