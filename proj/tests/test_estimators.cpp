// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "rwt/estimators.hpp"
#include "rwt/regvar.hpp"

using namespace rwt;

TEST_CASE("empirical tail on a constant sample") {
    const std::vector<double> sample{5.0, 5.0, 5.0};
    const auto est = empirical_tail(sample, {4.0, 6.0}, 0.95);
    CHECK(est.p_hat[0] == 1.0);
    CHECK(est.p_hat[1] == 0.0);
    // one-sided edges
    CHECK(est.ci_low[0] == doctest::Approx(std::pow(0.05, 1.0 / 3.0)));
    CHECK(est.ci_high[0] == 1.0);
    CHECK(est.ci_low[1] == 0.0);
    CHECK(est.ci_high[1] == doctest::Approx(1.0 - std::pow(0.05, 1.0 / 3.0)));
}

TEST_CASE("empirical tail invariants on a real sample") {
    const auto law = RegVarLaw::pareto(1.0);
    const auto sample = law.sample(100000, 4242);
    const auto levels = log_grid(1.0, 1000.0, 25);
    const auto est = empirical_tail(sample, levels, 0.99);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) CHECK(est.p_hat[i] <= est.p_hat[i - 1]);
        CHECK(est.ci_low[i] <= est.p_hat[i]);
        CHECK(est.ci_high[i] >= est.p_hat[i]);
        CHECK(est.ci_high[i] - est.ci_low[i] <= 1.0);
    }
}

TEST_CASE("pareto exceedance at x=100 concentrates around 0.01") {
    const auto law = RegVarLaw::pareto(1.0);
    const auto sample = law.sample(1000000, 777);
    const auto est = empirical_tail(sample, {100.0}, 0.999);
    CHECK(std::fabs(est.p_hat[0] - 0.01) < 3.3e-4);
    CHECK(est.ci_low[0] <= 0.01);
    CHECK(est.ci_high[0] >= 0.01);
}

TEST_CASE("empirical tail error paths") {
    CHECK_THROWS_AS(empirical_tail({}, {1.0}, 0.95), domain_error);
    CHECK_THROWS_AS(empirical_tail({1.0}, {}, 0.95), domain_error);
}

TEST_CASE("tail ratio") {
    const std::vector<double> sample{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    const auto est = empirical_tail(sample, {2.5, 4.5}, 0.95);
    SUBCASE("identical numerator and denominator give ratio 1") {
        const auto rc = tail_ratio(est, est);
        for (double r : rc.ratio) CHECK(r == doctest::Approx(1.0));
        CHECK(rc.brackets(1.0));
    }
    SUBCASE("analytic denominator") {
        const auto rc = tail_ratio(est, {est.p_hat[0], est.p_hat[1]});
        CHECK(rc.ratio[0] == doctest::Approx(1.0));
        CHECK(rc.lo[0] < 1.0);
        CHECK(rc.hi[0] > 1.0);
    }
    SUBCASE("grid mismatch and zero denominators are rejected") {
        CHECK_THROWS_AS(tail_ratio(est, {1.0}), domain_error);
        CHECK_THROWS_AS(tail_ratio(est, {0.5, 0.0}), domain_error);
    }
}

TEST_CASE("hill estimator on exact pareto samples") {
    const double alpha0 = 1.6;
    const auto law = RegVarLaw::pareto(alpha0);
    const auto sample = law.sample(100000, 31337);
    const auto est = hill(sample, 1000);
    CHECK(std::fabs(est.alpha_hat - alpha0) < 3.0 * est.se);
    CHECK(est.se == doctest::Approx(est.alpha_hat / std::sqrt(1000.0)));
}

TEST_CASE("hill on pareto(1): alpha in [0.9, 1.1] at n=1e5, k=1e3") {
    const auto law = RegVarLaw::pareto(1.0);
    const auto sample = law.sample(100000, 999);
    const auto est = hill(sample, 1000);
    CHECK(est.alpha_hat > 0.9);
    CHECK(est.alpha_hat < 1.1);
}

TEST_CASE("hill error paths") {
    std::vector<double> equal(100, 3.0);
    CHECK_THROWS_AS(hill(equal, 20), domain_error);
    std::vector<double> small{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(hill(small, 2), domain_error);  // k < 10
    std::vector<double> sample(50, 0.0);
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = double(i + 1);
    CHECK_THROWS_AS(hill(sample, 50), domain_error); // k >= n
}

TEST_CASE("hill sweep uses k, k/2, 2k") {
    const auto law = RegVarLaw::pareto(0.8);
    const auto sample = law.sample(20000, 11);
    const auto sw = hill_sweep(sample);
    const auto k = static_cast<std::size_t>(std::ceil(std::pow(20000.0, 0.6)));
    CHECK(sw.base.k == k);
    CHECK(sw.half.k == k / 2);
    CHECK(sw.twice.k == 2 * k);
    for (const auto& e : {sw.half, sw.base, sw.twice})
        CHECK(std::fabs(e.alpha_hat - 0.8) < 4.0 * e.se);
}
