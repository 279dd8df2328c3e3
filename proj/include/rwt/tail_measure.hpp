// SPDX-License-Identifier: Apache-2.0
//
// Sigma-finite measures on (0, inf) represented by their tail function plus
// an explicit atom list and optional Lebesgue density, with the product
// convolution
//   (nu (*) rho)(B) = int nu(x^-1 B) rho(dx).
// The standard measure nu_alpha has tail x^-alpha; the oscillating measure
// d nu = g d nu_alpha with g(y) = 1 + a cos(b0 log y) + b sin(b0 log y) has
// the closed-form tail
//   nu(x,inf) = x^-alpha [1 + (alpha/(alpha^2+b0^2)) *
//               ((a alpha + b b0) cos(b0 log x) + (b alpha - a b0) sin(b0 log x))]
// obtained by integrating g against alpha y^(-alpha-1) dy; the tests check it
// against adaptive quadrature.  Its x^alpha-profile oscillates forever (no
// regularly varying tail), yet convolving with any rho whose Mellin transform
// vanishes at b0 collapses it to |rho|_alpha * nu_alpha exactly.

#ifndef RWT_TAIL_MEASURE_HPP
#define RWT_TAIL_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwt/common.hpp"
#include "rwt/quadrature.hpp"
#include "rwt/regvar.hpp"

namespace rwt {

struct MeasureAtom {
    double location;
    double mass;
};

/// Parameters of an oscillating density against nu_alpha.
struct OscParams {
    double alpha, beta0, a, b;

    double g(double y) const {
        const double w = beta0 * std::log(y);
        return 1.0 + a * std::cos(w) + b * std::sin(w);
    }
    /// nu(x, inf) in closed form.
    double tail(double x) const {
        const double w = beta0 * std::log(x);
        const double k = alpha / (alpha * alpha + beta0 * beta0);
        const double osc = k * ((a * alpha + b * beta0) * std::cos(w) +
                                (b * alpha - a * beta0) * std::sin(w));
        return std::pow(x, -alpha) * (1.0 + osc);
    }
};

class TailMeasure {
  public:
    struct DensityPart {
        std::function<double(double)> pdf; // w.r.t. Lebesgue on (lo, hi)
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
    };

    TailMeasure(std::function<double(double)> tail, std::vector<MeasureAtom> atoms,
                std::optional<DensityPart> density, double strip_lo,
                double strip_hi)
        : tail_(std::move(tail)), atoms_(std::move(atoms)),
          density_(std::move(density)), strip_lo_(strip_lo), strip_hi_(strip_hi) {
        for (const auto& a : atoms_)
            if (!(a.location > 0.0) || !(a.mass > 0.0))
                throw domain_error("measure atoms need positive location and mass");
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const MeasureAtom& x, const MeasureAtom& y) {
                      return x.location < y.location;
                  });
    }

    // -- accessors --------------------------------------------------------------

    /// nu(x, inf); may grow without bound as x -> 0+ for sigma-finite inputs.
    double tail(double x) const {
        if (!(x > 0.0)) throw domain_error("measure tail: x > 0 required");
        return tail_(x);
    }
    const std::vector<MeasureAtom>& atoms() const { return atoms_; }
    const std::optional<DensityPart>& density() const { return density_; }
    bool purely_atomic() const { return !density_.has_value(); }
    std::pair<double, double> strip() const { return {strip_lo_, strip_hi_}; }
    const std::optional<OscParams>& density_vs_nu_alpha() const { return osc_; }

    bool strip_covers(double sigma) const {
        return sigma > strip_lo_ && sigma < strip_hi_;
    }

    // -- constructors for the shipped measures -----------------------------------

    /// nu_alpha(x, inf) = x^-alpha; no finite sigma-moment exists.
    static TailMeasure nu_alpha(double alpha) {
        if (!(alpha > 0.0)) throw domain_error("nu_alpha: alpha > 0 required");
        return oscillating(alpha, 1.0, 0.0, 0.0); // g == 1
    }

    /// d nu = g d nu_alpha with g(y) = 1 + a cos(beta0 log y) + b sin(beta0 log y).
    static TailMeasure oscillating(double alpha, double beta0, double a, double b) {
        if (!(alpha > 0.0)) throw domain_error("oscillating measure: alpha > 0");
        const double r2 = a * a + b * b;
        if (a != 0.0 || b != 0.0) {
            if (!(r2 > 0.0 && r2 <= 1.0))
                throw domain_error("oscillating measure: need 0 < a^2+b^2 <= 1");
            if (beta0 == 0.0)
                throw domain_error("oscillating measure: beta0 must be nonzero");
        }
        OscParams osc{alpha, beta0, a, b};
        DensityPart dens;
        dens.pdf = [osc, alpha](double y) {
            return osc.g(y) * alpha * std::pow(y, -alpha - 1.0);
        };
        dens.lo = 0.0;
        TailMeasure m([osc](double x) { return osc.tail(x); }, {}, dens,
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN());
        // no sigma has both endpoints integrable: declare an empty strip
        m.strip_lo_ = std::numeric_limits<double>::infinity();
        m.strip_hi_ = -std::numeric_limits<double>::infinity();
        m.osc_ = osc;
        return m;
    }

    /// Finite atomic measure (masses need not sum to 1).
    static TailMeasure from_atoms(std::vector<MeasureAtom> atoms) {
        auto sorted = atoms;
        std::sort(sorted.begin(), sorted.end(),
                  [](const MeasureAtom& x, const MeasureAtom& y) {
                      return x.location < y.location;
                  });
        auto tail = [sorted](double x) {
            double m = 0.0;
            for (const auto& a : sorted)
                if (a.location > x) m += a.mass;
            return m;
        };
        return TailMeasure(tail, std::move(atoms), std::nullopt,
                           -std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity());
    }

    /// The law of X as a probability measure on (x_min, inf).
    static TailMeasure from_law(const RegVarLaw& law) {
        return TailMeasure([law](double x) { return law.tail(x); }, {},
                           std::nullopt,
                           -std::numeric_limits<double>::infinity(), law.alpha());
    }

  private:
    std::function<double(double)> tail_;
    std::vector<MeasureAtom> atoms_;
    std::optional<DensityPart> density_;
    double strip_lo_, strip_hi_;
    std::optional<OscParams> osc_;
};

// ---------------------------------------------------------------------------
// alpha-norm

/// |rho|_sigma = int y^sigma rho(dy); exact over atoms, quadrature otherwise.
inline double alpha_norm(const TailMeasure& rho, double sigma) {
    if (!rho.strip_covers(sigma))
        throw strip_error("alpha_norm: sigma outside the declared finite strip");
    double norm = 0.0;
    for (const auto& a : rho.atoms()) norm += a.mass * std::pow(a.location, sigma);
    if (rho.density()) {
        const auto& d = *rho.density();
        auto f = [&](double y) { return std::pow(y, sigma) * d.pdf(y); };
        const double lo = d.lo, hi = d.hi;
        if (std::isinf(hi)) {
            const double split = std::max(lo, 1.0);
            if (split > lo) norm += integrate(f, lo, split, 1e-10, 1e-13);
            norm += integrate_to_inf(f, split, 1e-10, 1e-13);
        } else {
            norm += integrate(f, lo, hi, 1e-10, 1e-13);
        }
    }
    return norm;
}

// ---------------------------------------------------------------------------
// product convolution

/// (nu (*) rho)(x, inf) = int nu(x/u, inf) rho(du).  Exact finite sum for
/// purely atomic rho, adaptive quadrature (rel tol 1e-9) over any density
/// part.  Requires alpha = the working index to sit inside rho's moment
/// strip (condition (2)); the caller passes it for the check.
inline double product_convolve_tail(const TailMeasure& nu, const TailMeasure& rho,
                                    double x, double alpha) {
    if (!rho.strip_covers(alpha))
        throw strip_error(
            "product_convolve_tail: rho lacks finite moments around alpha");
    if (!(x > 0.0)) throw domain_error("product_convolve_tail: x > 0 required");
    double val = 0.0;
    for (const auto& a : rho.atoms()) val += a.mass * nu.tail(x / a.location);
    if (rho.density()) {
        const auto& d = *rho.density();
        auto f = [&](double u) { return nu.tail(x / u) * d.pdf(u); };
        const double lo = d.lo, hi = d.hi;
        if (std::isinf(hi)) {
            const double split = std::max(lo, 1e-6);
            if (split > lo) val += integrate(f, lo, split, 1e-9, 1e-12);
            val += integrate_to_inf(f, split, 1e-9, 1e-12);
        } else {
            val += integrate(f, lo, hi, 1e-9, 1e-12);
        }
    }
    return val;
}

/// Lazy measure for nu (*) rho.  Atoms materialize only when both sides are
/// purely atomic; the moment strip intersects.
inline TailMeasure product_convolve(const TailMeasure& nu, const TailMeasure& rho,
                                    double alpha) {
    if (!rho.strip_covers(alpha))
        throw strip_error("product_convolve: rho lacks finite moments around alpha");
    std::vector<MeasureAtom> atoms;
    if (nu.purely_atomic() && rho.purely_atomic()) {
        for (const auto& p : nu.atoms())
            for (const auto& q : rho.atoms())
                atoms.push_back({p.location * q.location, p.mass * q.mass});
    }
    const auto [nlo, nhi] = nu.strip();
    const auto [rlo, rhi] = rho.strip();
    TailMeasure out(
        [nu, rho, alpha](double x) {
            return product_convolve_tail(nu, rho, x, alpha);
        },
        std::move(atoms), std::nullopt, std::max(nlo, rlo), std::min(nhi, rhi));
    return out;
}

// ---------------------------------------------------------------------------
// the probability measure mu of the converse construction

/// mu(B) = nu(B cap (b, inf)) + (1 - nu(b, inf)) 1_B(1): all of nu's tail
/// mass beyond b plus a balancing atom at 1.  Requires b > 1 and
/// nu(b, inf) <= 1.  The tail is
///   mu(y, inf) = nu(y, inf)  for y > b
///              = nu(b, inf)  for 1 < y <= b
///              = 1           for y <= 1.
class CounterexampleMu {
  public:
    CounterexampleMu(const TailMeasure& nu, double b_threshold)
        : nu_tail_([nu](double x) { return nu.tail(x); }), b_(b_threshold) {
        if (!(b_threshold > 1.0))
            throw domain_error("counterexample mu: b_threshold > 1 required");
        tail_at_b_ = nu_tail_(b_);
        if (!(tail_at_b_ <= 1.0))
            throw domain_error("counterexample mu: nu(b, inf) must be <= 1");
        atom_mass_ = 1.0 - tail_at_b_;

        std::vector<MeasureAtom> atoms;
        if (atom_mass_ > 0.0) atoms.push_back({1.0, atom_mass_});
        auto nu_tail = nu_tail_;
        const double b = b_, tb = tail_at_b_;
        const auto [slo, shi] = nu.strip();
        TailMeasure::DensityPart dens; // nu restricted to (b, inf)
        const auto nu_dens = nu.density();
        measure_.emplace(
            [nu_tail, b, tb](double y) {
                if (y <= 1.0) return 1.0;
                if (y <= b) return tb;
                return nu_tail(y);
            },
            std::move(atoms),
            nu_dens ? std::optional<TailMeasure::DensityPart>(
                          TailMeasure::DensityPart{nu_dens->pdf, b,
                                                   nu_dens->hi})
                    : std::nullopt,
            -std::numeric_limits<double>::infinity(),
            // all moments below the decay index of nu's tail are finite; for
            // the shipped oscillating nu that index is alpha
            nu.density_vs_nu_alpha() ? nu.density_vs_nu_alpha()->alpha
                                     : (std::isnan(shi) ? 0.0 : shi));
    }

    const TailMeasure& measure() const { return *measure_; }
    double b_threshold() const { return b_; }
    double atom_mass() const { return atom_mass_; }

    /// Inverse-transform draw: the atom with probability its mass, else
    /// bisection on the continuous tail beyond b.
    double sample(SplitMix64& g) const {
        const double u = g.next_open01();
        if (u >= tail_at_b_) return 1.0;
        double lo = b_, hi = 2.0 * b_;
        int guard = 0;
        while (nu_tail_(hi) > u) {
            hi *= 2.0;
            if (++guard > 1060)
                throw convergence_error("mu sampler failed to bracket");
        }
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (nu_tail_(mid) > u ? lo : hi) = mid;
            if (hi - lo <= 1e-14 * hi) break;
        }
        return 0.5 * (lo + hi);
    }

    /// One draw on a derived stream, batch-stable.
    double sample_one(std::uint64_t master_seed, std::uint64_t index) const {
        SplitMix64 g(derive_seed(master_seed, index));
        return sample(g);
    }

  private:
    std::function<double(double)> nu_tail_;
    double b_;
    double tail_at_b_ = 0.0;
    double atom_mass_ = 0.0;
    std::optional<TailMeasure> measure_;
};

/// Smallest b certified by the bound nu(x, inf) <= 2 x^-alpha.
inline double default_b_threshold(double alpha) {
    return std::pow(2.0, 1.0 / alpha);
}

inline CounterexampleMu make_counterexample_mu(const TailMeasure& nu,
                                               double b_threshold) {
    return CounterexampleMu(nu, b_threshold);
}

// ---------------------------------------------------------------------------
// oscillation diagnostics

/// x^alpha nu(x, inf) swept over a grid; a regularly varying tail flattens
/// (amplitude -> 0), the oscillating counterexample does not.
struct OscillationProfile {
    std::vector<double> grid;
    std::vector<double> values; // x^alpha * tail(x)
    double sup = 0.0;
    double inf = 0.0;
    double amplitude = 0.0;
};

inline OscillationProfile oscillation_profile(const TailMeasure& m, double alpha,
                                              const std::vector<double>& grid) {
    OscillationProfile p;
    p.grid = grid;
    p.values.reserve(grid.size());
    for (double x : grid) p.values.push_back(std::pow(x, alpha) * m.tail(x));
    p.sup = *std::max_element(p.values.begin(), p.values.end());
    p.inf = *std::min_element(p.values.begin(), p.values.end());
    p.amplitude = p.sup - p.inf;
    return p;
}

/// Same profile from an explicit tail function (e.g. the mu tail).
template <typename TailF>
OscillationProfile oscillation_profile_fn(const TailF& tail, double alpha,
                                          const std::vector<double>& grid) {
    OscillationProfile p;
    p.grid = grid;
    p.values.reserve(grid.size());
    for (double x : grid) p.values.push_back(std::pow(x, alpha) * tail(x));
    p.sup = *std::max_element(p.values.begin(), p.values.end());
    p.inf = *std::min_element(p.values.begin(), p.values.end());
    p.amplitude = p.sup - p.inf;
    return p;
}

// ---------------------------------------------------------------------------
// scaling identity

struct ScalingIdentityReport {
    double rho_alpha_norm = 0.0;
    double max_residual = 0.0;          // max |x^a conv_tail - |rho|_a|
    OscillationProfile nu_profile;      // input, oscillates for the counterexample
    OscillationProfile conv_profile;    // output, flat when the identity holds
};

/// Checks nu (*) rho = |rho|_alpha nu_alpha on a grid and reports both
/// oscillation profiles.
inline ScalingIdentityReport verify_scaling_identity(
    const TailMeasure& nu, const TailMeasure& rho, double alpha,
    const std::vector<double>& grid) {
    ScalingIdentityReport rep;
    rep.rho_alpha_norm = alpha_norm(rho, alpha);
    rep.nu_profile = oscillation_profile(nu, alpha, grid);
    OscillationProfile conv;
    conv.grid = grid;
    conv.values.reserve(grid.size());
    for (double x : grid) {
        const double t = product_convolve_tail(nu, rho, x, alpha);
        conv.values.push_back(std::pow(x, alpha) * t);
        rep.max_residual = std::max(
            rep.max_residual, std::fabs(conv.values.back() - rep.rho_alpha_norm));
    }
    conv.sup = *std::max_element(conv.values.begin(), conv.values.end());
    conv.inf = *std::min_element(conv.values.begin(), conv.values.end());
    conv.amplitude = conv.sup - conv.inf;
    rep.conv_profile = conv;
    return rep;
}

} // namespace rwt

#endif
