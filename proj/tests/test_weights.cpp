// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>

#include "rwt/weights.hpp"

using namespace rwt;

TEST_CASE("two-point moment closed form") {
    const auto w = WeightLaw::two_point(0.5, 0.5, 2.0, 0.5);
    const double expected = 0.5 * (std::pow(0.5, 0.7) + std::pow(2.0, 0.7));
    CHECK(w.moment(0.7) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(1.12003849969).epsilon(1e-9));
}

TEST_CASE("moment normalization is exact, zero atoms included") {
    for (const auto& w :
         {WeightLaw::two_point(0.0, 0.75, 3.0, 0.25), WeightLaw::degenerate(2.0),
          WeightLaw::lognormal(0.3, 1.1), WeightLaw::uniform(0.0, 2.0),
          WeightLaw::beta_scaled(2.0, 3.0, 1.5)}) {
        CHECK(w.moment(0.0) == 1.0);
        CHECK(w.moment(complex_t(0.0, 0.0)) == complex_t(1.0, 0.0));
    }
}

TEST_CASE("pathological terms: values, probabilities, alpha-moments") {
    const double alpha = 0.5;
    SUBCASE("t = 1 takes value 2 with probability 2^(-1/2)") {
        const auto w = WeightLaw::pathological_term(alpha, 1);
        CHECK(w.atom_list()[0].value == doctest::Approx(2.0));
        CHECK(w.atom_list()[0].prob == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
        CHECK(w.atom_list()[0].prob == doctest::Approx(0.70711).epsilon(1e-5));
    }
    SUBCASE("E[Theta_t^alpha] = t^(-2) exactly") {
        for (std::size_t t = 1; t <= 8; ++t) {
            const auto w = WeightLaw::pathological_term(alpha, t);
            CHECK(w.moment(alpha) ==
                  doctest::Approx(1.0 / double(t * t)).epsilon(1e-13));
        }
    }
    SUBCASE("domain of the rule") {
        CHECK_THROWS_AS(WeightLaw::pathological_term(1.5, 1), domain_error);
        CHECK_THROWS_AS(WeightSequence::pathological(0.0), domain_error);
        CHECK_THROWS_AS(WeightSequence::pathological(1.0), domain_error);
    }
}

TEST_CASE("pathological sums: Basel value at alpha, divergence above") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const auto seq = WeightSequence::pathological(alpha);
        const auto basel = seq.sum(alpha);
        CHECK(basel.cls == SumClass::converges);
        CHECK(basel.value ==
              doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-10));
        for (double eps : {0.01, 0.1, 0.19}) {
            CHECK(seq.sum(alpha + eps).cls == SumClass::diverges);
            CHECK(seq.sum(alpha - eps).cls == SumClass::converges);
        }
    }
}

TEST_CASE("geometric degenerate sums in closed form") {
    // Theta_t == 2^-t; sum_t (E[Theta_t^1.5])^(1/1.5) = sum 2^-t = 1
    const auto seq = WeightSequence::geometric(1.0, 0.5);
    const auto cert = seq.sum_pow(1.5, 1.0 / 1.5);
    CHECK(cert.cls == SumClass::converges);
    CHECK(cert.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(seq.sum(1.0).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("modulus bound |E[Theta^(s+ib)]| <= E[Theta^s]") {
    SplitMix64 rng(7);
    const WeightLaw laws[] = {WeightLaw::two_point(0.5, 0.4, 4.0, 0.6),
                              WeightLaw::lognormal(0.0, 0.8),
                              WeightLaw::uniform(0.5, 3.0),
                              WeightLaw::degenerate(2.5)};
    for (const auto& w : laws)
        for (int i = 0; i < 50; ++i) {
            const double sigma = rng.next_open01() * 2.0;
            const double beta = (rng.next_open01() - 0.5) * 40.0;
            CHECK(std::abs(w.moment(complex_t(sigma, beta))) <=
                  w.moment(sigma) * (1.0 + 1e-12));
        }
}

TEST_CASE("family moment oracles against independent routes") {
    SUBCASE("lognormal closed form") {
        const auto w = WeightLaw::lognormal(0.2, 0.7);
        CHECK(w.moment(2.0) ==
              doctest::Approx(std::exp(0.4 + 2.0 * 0.49)).epsilon(1e-13));
    }
    SUBCASE("uniform closed form vs direct integral") {
        const auto w = WeightLaw::uniform(0.0, 2.0);
        CHECK(w.moment(1.0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(w.moment(3.0) == doctest::Approx(16.0 / 8.0).epsilon(1e-13)); // b^3/4
    }
    SUBCASE("beta: quadrature path at complex s equals the lgamma closed form") {
        const auto w = WeightLaw::beta_scaled(2.0, 3.0, 1.5);
        const auto via_quad = w.moment(complex_t(0.8, 1e-30)); // forces quadrature
        CHECK(via_quad.real() == doctest::Approx(w.moment(0.8)).epsilon(1e-9));
    }
    SUBCASE("custom tail: min(1, x^-3) has E[Theta^s] = 3/(3-s)") {
        const auto w = WeightLaw::custom_tail(
            [](double x) { return std::min(1.0, std::pow(x, -3.0)); },
            TailDecay::polynomial_like, 3.0);
        CHECK(w.moment(1.0) == doctest::Approx(1.5).epsilon(1e-8));
        CHECK(w.moment(2.0) == doctest::Approx(3.0).epsilon(1e-8));
    }
}

TEST_CASE("moment strip violations") {
    const auto zero_atom = WeightLaw::two_point(0.0, 0.5, 1.0, 0.5);
    CHECK_THROWS_AS(zero_atom.moment(-0.5), strip_error);
    const auto unif0 = WeightLaw::uniform(0.0, 1.0);
    CHECK_THROWS_AS(unif0.moment(-1.5), strip_error);
    const auto custom = WeightLaw::custom_tail(
        [](double x) { return std::min(1.0, std::pow(x, -3.0)); },
        TailDecay::polynomial_like, 3.0);
    CHECK_THROWS_AS(custom.moment(3.5), strip_error);
}

TEST_CASE("atom construction errors") {
    CHECK_THROWS_AS(WeightLaw::atoms({}), domain_error);
    CHECK_THROWS_AS(WeightLaw::two_point(1.0, 0.5, 2.0, 0.4), domain_error);
    CHECK_THROWS_AS(WeightLaw::degenerate(0.0), domain_error);
    CHECK_THROWS_AS(WeightLaw::uniform(2.0, 1.0), domain_error);
}

TEST_CASE("weight tails") {
    const auto w = WeightLaw::two_point(1.0, 0.25, 4.0, 0.75);
    CHECK(w.tail(0.5) == doctest::Approx(1.0));
    CHECK(w.tail(1.0) == doctest::Approx(0.75));
    CHECK(w.tail(4.0) == 0.0);
    const auto u = WeightLaw::uniform(1.0, 3.0);
    CHECK(u.tail(2.0) == doctest::Approx(0.5));
    CHECK(u.essential_sup() == 3.0);
}

TEST_CASE("weight sampling matches atom frequencies") {
    const auto w = WeightLaw::two_point(0.0, 0.3, 2.0, 0.7);
    std::size_t hits = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 g(derive_seed(555, i));
        if (w.sample(g) == 2.0) ++hits;
    }
    // 99.9% binomial band around 0.7
    CHECK(std::fabs(double(hits) / double(n) - 0.7) <
          3.3 * std::sqrt(0.7 * 0.3 / double(n)));
}

TEST_CASE("sequence indexing and bounds") {
    const auto fin = WeightSequence::iid(WeightLaw::degenerate(1.0), 3);
    CHECK(fin.finite_size() == 3);
    CHECK_THROWS_AS(fin.law(4), domain_error);
    CHECK_THROWS_AS(fin.law(0), domain_error);
    const auto inf = WeightSequence::pathological(0.5);
    CHECK(inf.is_infinite());
    CHECK(inf.law(12).atom_list()[0].prob ==
          doctest::Approx(std::pow(2.0, -6.0)).epsilon(1e-14));
}

TEST_CASE("tail sum bound is rigorous for the pathological rule") {
    const auto seq = WeightSequence::pathological(0.5);
    for (std::size_t t0 : {10u, 100u, 1000u}) {
        double exact = 0.0; // sum_{t>t0} t^-2 summed far enough out
        for (std::size_t t = t0 + 1; t <= t0 * 2000; ++t)
            exact += 1.0 / double(t) / double(t);
        const double bound = seq.tail_sum_bound(0.5, t0);
        CHECK(bound >= exact);
        CHECK(bound <= 1.2 / double(t0));
    }
}
