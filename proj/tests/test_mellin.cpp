// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "rwt/mellin.hpp"

using namespace rwt;

namespace {

// atoms {1, e} with masses {e/(1+e), 1/(1+e)}: at alpha = 1 the line is
// (e/(1+e)) (1 + e^{i beta}), which vanishes exactly at beta = pi
WeightSequence mellin_zero_pair() {
    const double e = std::exp(1.0);
    return WeightSequence::explicit_list(
        {WeightLaw::two_point(1.0, e / (1.0 + e), e, 1.0 / (1.0 + e))}, 1.0);
}

} // namespace

TEST_CASE("degenerate unit weight has a flat line") {
    const auto seq = WeightSequence::explicit_list({WeightLaw::degenerate(1.0)});
    for (double beta : {0.0, 0.5, 3.0, 100.0}) {
        const auto m = mellin_line(seq, 1.0, beta, 10);
        CHECK(std::abs(m.value - complex_t(1.0, 0.0)) < 1e-14);
        CHECK(m.remainder_bound == 0.0);
    }
}

TEST_CASE("two-atom line: value at 0, zero at pi") {
    const auto seq = mellin_zero_pair();
    const double e = std::exp(1.0);
    const auto at0 = mellin_line(seq, 1.0, 0.0, 4);
    CHECK(at0.value.real() ==
          doctest::Approx(2.0 * e / (1.0 + e)).epsilon(1e-14));
    CHECK(at0.value.real() == doctest::Approx(1.462117).epsilon(1e-6));
    const auto atpi = mellin_line(seq, 1.0, M_PI, 4);
    CHECK(std::abs(atpi.value) < 1e-14);
}

TEST_CASE("zero finding refines pi to 1e-9") {
    const auto zeros = find_mellin_zeros(mellin_zero_pair(), 1.0, 0.1, 6.0, 1e-9);
    REQUIRE(zeros.size() == 1);
    CHECK(std::fabs(zeros[0] - M_PI) <= 1e-9);
}

TEST_CASE("unit weight yields no zeros") {
    const auto seq = WeightSequence::explicit_list({WeightLaw::degenerate(1.0)});
    CHECK(find_mellin_zeros(seq, 1.0, 0.1, 6.0, 1e-9).empty());
}

TEST_CASE("zero set is invariant under scaling Theta -> c Theta") {
    const double e = std::exp(1.0);
    for (double c : {0.2, 3.0, 17.0}) {
        const auto scaled = WeightSequence::explicit_list(
            {WeightLaw::two_point(c, e / (1.0 + e), c * e, 1.0 / (1.0 + e))}, 1.0);
        const auto zeros = find_mellin_zeros(scaled, 1.0, 0.1, 6.0, 1e-9);
        REQUIRE(zeros.size() == 1);
        CHECK(std::fabs(zeros[0] - M_PI) <= 1e-9);
    }
}

TEST_CASE("line modulus bound |M(beta)| <= M(0)") {
    const auto seqs = {mellin_zero_pair(), WeightSequence::geometric(1.0, 0.5, 1.0)};
    SplitMix64 rng(99);
    for (const auto& seq : seqs) {
        const double m0 = mellin_line(seq, 1.0, 0.0, 64).value.real();
        for (int i = 0; i < 40; ++i) {
            const double beta = (rng.next_open01() - 0.5) * 50.0;
            CHECK(std::abs(mellin_line(seq, 1.0, beta, 64).value) <=
                  m0 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("ill-defined line is rejected") {
    // pathological(0.5) evaluated on the line Re s = 0.7: the alpha-moment
    // sum diverges there
    const auto seq = WeightSequence::pathological(0.5);
    CHECK_THROWS_AS(mellin_line(seq, 0.7, 0.0, 100), strip_error);
}

TEST_CASE("truncation remainder bound covers the dropped tail") {
    const auto seq = WeightSequence::pathological(0.5);
    const auto m = mellin_line(seq, 0.5, 1.3, 1000);
    double dropped = 0.0; // |remainder| <= sum_{t>1000} t^-2 for real evidence
    for (std::size_t t = 1001; t <= 2000000; ++t)
        dropped += 1.0 / double(t) / double(t);
    CHECK(m.remainder_bound >= dropped);
    CHECK(m.remainder_bound <= 1.2e-3);
    CHECK(m.terms_used == 1000);
}

TEST_CASE("finite sequences have zero remainder and capped terms") {
    const auto m = mellin_line(mellin_zero_pair(), 1.0, 2.0, 50);
    CHECK(m.remainder_bound == 0.0);
    CHECK(m.terms_used == 1);
}

TEST_CASE("degenerate weights at any c have the unit weight's empty zero set") {
    for (double c : {1.0, 0.5, 7.0}) {
        const auto seq =
            WeightSequence::explicit_list({WeightLaw::degenerate(c)}, 1.0);
        CHECK(find_mellin_zeros(seq, 1.0, 0.1, 6.0, 1e-9).empty());
    }
}
