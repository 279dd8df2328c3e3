// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "rwt/montecarlo.hpp"
#include "support/discrete_enum.hpp"

using namespace rwt;

TEST_CASE("truncation level with an exactly geometric bound") {
    // E[Theta_t^1] E[X^1] = 2^-t: Theta_t = 2^-(t+1) degenerate, X pareto(2)
    const auto seq = WeightSequence::geometric(0.5, 0.5);
    const auto law = RegVarLaw::pareto(2.0);
    const auto cert =
        truncation_level(seq, law, std::pow(2.0, -10.0), 1.0, 1.0);
    CHECK(cert.m == 10);
    CHECK(cert.bound == doctest::Approx(std::pow(2.0, -10.0)).epsilon(1e-12));
    CHECK(cert.p == 1.0);
}

TEST_CASE("vacuous epsilon gives m = 0") {
    const auto seq = WeightSequence::geometric(0.5, 0.5);
    const auto law = RegVarLaw::pareto(2.0);
    const auto cert = truncation_level(seq, law, 1.0, 1.0, 1.0);
    CHECK(cert.m == 0);
    CHECK(cert.bound <= 1.0);
}

TEST_CASE("truncation for the pathological sequence searches a valid p") {
    const auto seq = WeightSequence::pathological(0.5);
    const auto law = RegVarLaw::pareto(0.5);
    const auto cert = truncation_level(seq, law, 1e-4, 2.7e6);
    CHECK(cert.p < 0.5);
    CHECK(cert.bound <= 1e-4);
    CHECK(cert.m >= 10);
    CHECK(cert.m < 4000);
}

TEST_CASE("truncation errors") {
    const auto seq = WeightSequence::pathological(0.3);
    SUBCASE("requested moment order out of range") {
        CHECK_THROWS_AS(
            truncation_level(seq, RegVarLaw::pareto(0.3), 1e-3, 10.0, 0.5),
            domain_error);
    }
    SUBCASE("no candidate certificate when the rule is too heavy for the law") {
        // all candidate p < 0.8 that the search tries exceed 0.3, where the
        // pathological moment sums diverge
        CHECK_THROWS_AS(
            truncation_level(seq, RegVarLaw::pareto(0.8), 1e-3, 10.0),
            strip_error);
    }
}

TEST_CASE("single-term series reproduces the law") {
    const auto law = RegVarLaw::pareto(1.0);
    const auto seq = WeightSequence::iid(WeightLaw::degenerate(1.0), 1);
    const auto s = simulate_series(law, seq, 1, 100000, 77);
    // DKW band against the analytic tail
    auto xs = s.values;
    std::sort(xs.begin(), xs.end());
    const double eps = dkw_epsilon(xs.size(), 1e-3);
    double sup = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = 1.0 - law.tail(xs[i]);
        sup = std::max(sup, std::fabs((i + 1.0) / xs.size() - f));
        sup = std::max(sup, std::fabs(double(i) / xs.size() - f));
    }
    CHECK(sup <= eps);
    // positive X: running max equals the positive-part sum
    for (std::size_t i = 0; i < 1000; ++i)
        CHECK(s.running_max[i] == doctest::Approx(s.values[i]).epsilon(1e-15));
}

TEST_CASE("series draws are deterministic and coupled across m") {
    const auto law = RegVarLaw::pareto(0.7);
    const auto seq = WeightSequence::iid(WeightLaw::two_point(0.5, 0.5, 2.0, 0.5), 8);
    const auto a = simulate_series(law, seq, 5, 400, 123);
    const auto b = simulate_series(law, seq, 5, 400, 123);
    CHECK(a.values == b.values);
    CHECK(a.running_max == b.running_max);
    // positive parts: S_m is nondecreasing in m realization by realization
    const auto longer = simulate_series(law, seq, 8, 400, 123);
    for (std::size_t i = 0; i < 400; ++i)
        CHECK(a.values[i] <= longer.values[i] * (1.0 + 1e-15));
    const auto other = simulate_series(law, seq, 5, 400, 124);
    CHECK(a.values != other.values);
}

TEST_CASE("zero weights contribute nothing") {
    const auto law = RegVarLaw::pareto(1.0);
    // Theta_1 == 1, Theta_2 identically 0 via a two-point with full mass at 0
    const auto seq = WeightSequence::explicit_list(
        {WeightLaw::degenerate(1.0), WeightLaw::atoms({{0.0, 1.0}})});
    const auto two = simulate_series(law, seq, 2, 300, 5);
    for (std::size_t i = 0; i < 300; ++i)
        CHECK(two.running_max[i] == doctest::Approx(two.values[i]));
}

TEST_CASE("simulate_series preconditions") {
    const auto law = RegVarLaw::pareto(1.0);
    const auto seq = WeightSequence::iid(WeightLaw::degenerate(1.0), 2);
    CHECK_THROWS_AS(simulate_series(law, seq, 0, 10, 1), domain_error);
    CHECK_THROWS_AS(simulate_series(law, seq, 1, 0, 1), domain_error);
    CHECK_THROWS_AS(simulate_series(law, seq, 3, 10, 1), domain_error);
}

TEST_CASE("asymptotic independence diagnostic") {
    const auto law = RegVarLaw::pareto(1.0);
    SUBCASE("independent pair: ratio brackets the marginal tail") {
        auto sampler = [&](SplitMix64& g) {
            return std::make_pair(law.quantile(1.0 - g.next_open01()),
                                  law.quantile(1.0 - g.next_open01()));
        };
        const auto curve =
            asymp_indep_diag(sampler, {2.0, 10.0, 50.0}, 400000, 99, 0.99, 0.25);
        CHECK(std::fabs(curve.ratio[1] - 0.1) < 0.02);
        CHECK(curve.flag);
    }
    SUBCASE("comonotone pair: ratio pinned at 1, no flag") {
        auto sampler = [&](SplitMix64& g) {
            const double x = law.quantile(1.0 - g.next_open01());
            return std::make_pair(x, x);
        };
        const auto curve =
            asymp_indep_diag(sampler, {2.0, 10.0, 50.0}, 100000, 7, 0.99, 0.25);
        for (double r : curve.ratio) CHECK(r == doctest::Approx(1.0));
        CHECK_FALSE(curve.flag);
    }
    SUBCASE("level below the support: ratio is 1") {
        auto sampler = [&](SplitMix64& g) {
            return std::make_pair(law.quantile(1.0 - g.next_open01()),
                                  law.quantile(1.0 - g.next_open01()));
        };
        const auto curve = asymp_indep_diag(sampler, {0.5}, 2000, 1, 0.99, 0.25);
        CHECK(curve.ratio[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("left tail diagnostic") {
    SUBCASE("positive law: identically zero") {
        const auto curve =
            left_tail_diag(RegVarLaw::pareto(1.0), 1.0, {1.0, 10.0, 100.0});
        for (double r : curve.ratio) CHECK(r == 0.0);
        CHECK(curve.flag);
    }
    SUBCASE("symmetric two-sided law: ratio 1, negligibility fails") {
        auto law = RegVarLaw::pareto(1.0);
        law.set_left_tail([law](double x) { return law.tail(x); });
        const auto curve = left_tail_diag(law, 1.0, {2.0, 20.0, 200.0});
        for (double r : curve.ratio) CHECK(r == doctest::Approx(1.0));
        CHECK_FALSE(curve.flag);
    }
    SUBCASE("lighter left tail: ratio vanishes along the grid") {
        auto law = RegVarLaw::pareto(1.0);
        law.set_left_tail(
            [](double x) { return std::min(1.0, std::pow(x, -2.0)); });
        const auto curve = left_tail_diag(law, 1.0, {2.0, 20.0, 200.0});
        CHECK(curve.ratio.back() < 0.01);
        CHECK(curve.flag);
    }
    SUBCASE("empirical variant on a signed sample") {
        std::vector<double> signed_sample;
        SplitMix64 g(3);
        for (int i = 0; i < 20000; ++i) {
            const double mag = std::pow(g.next_open01(), -1.0);
            signed_sample.push_back(g.next_u64() % 2 ? mag : -mag);
        }
        const auto curve = left_tail_diag(signed_sample, 1.0, {2.0, 10.0});
        CHECK(curve.ratio[0] == doctest::Approx(1.0).epsilon(0.1));
    }
}

TEST_CASE("finite sum experiment") {
    const auto law = RegVarLaw::pareto(0.7);
    SUBCASE("single unit weight: everything coincides") {
        const auto seq = WeightSequence::iid(WeightLaw::degenerate(1.0), 1);
        const auto rep = finite_sum_experiment(
            law, seq, 1, 200000, 42, levels_from_tail([&](double x) {
                return law.tail(x);
            }, {1e-1, 1e-2}, 1.0));
        CHECK(rep.moment_sum == doctest::Approx(1.0));
        CHECK(rep.sum_ratio.brackets(1.0));
        CHECK(rep.max_ratio.brackets(1.0));
        for (std::size_t i = 0; i < rep.x_levels.size(); ++i)
            CHECK(rep.sum_tail.p_hat[i] == rep.max_tail.p_hat[i]);
    }
    SUBCASE("three-term two-point weights bracket the additivity constant") {
        const auto seq =
            WeightSequence::iid(WeightLaw::two_point(0.5, 0.5, 2.0, 0.5), 3);
        const double c3 = 3.0 * 0.5 * (std::pow(0.5, 0.7) + std::pow(2.0, 0.7));
        auto comparison = [&](double x) { return c3 * law.tail(x); };
        const auto rep = finite_sum_experiment(
            law, seq, 3, 400000, 2024, levels_from_tail(comparison, {1e-2}, 1.0));
        CHECK(rep.moment_sum == doctest::Approx(c3 / 1.0).epsilon(1e-12));
        CHECK(rep.sum_ratio.brackets(1.0));
        CHECK(rep.max_ratio.brackets(1.0));
        CHECK(rep.asymp_indep_flag);
        CHECK_FALSE(rep.contract_violation);
    }
    SUBCASE("comonotone X breaks the contract and the report says so") {
        const auto seq =
            WeightSequence::iid(WeightLaw::two_point(0.5, 0.5, 2.0, 0.5), 2);
        const auto rep = finite_sum_experiment(
            law, seq, 2, 50000, 11, {10.0, 100.0}, 0.99, true);
        CHECK(rep.contract_violation);
        CHECK_FALSE(rep.asymp_indep_flag);
    }
}

TEST_CASE("series experiment on the pathological sequence (reduced n)") {
    const auto law = RegVarLaw::pareto(0.5);
    const auto seq = WeightSequence::pathological(0.5);
    const auto rep =
        series_experiment(law, seq, 200000, 31415, {1e-2, 1e-3}, 1e-3);
    CHECK(rep.all_finite);
    CHECK(rep.moment_sum == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-9));
    CHECK(rep.truncation.bound <= 1e-3);
    // the CI must bracket the target at the deepest level; shallower levels
    // carry the (certified) truncation deficit, so only a loose band applies
    CHECK(rep.ratio.lo.back() <= 1.0);
    CHECK(rep.ratio.hi.back() >= 1.0);
    for (double r : rep.ratio.ratio) {
        CHECK(r > 0.85);
        CHECK(r < 1.1);
    }
    CHECK(rep.hill.base.alpha_hat > 0.4);
    CHECK(rep.hill.base.alpha_hat < 0.6);
}

TEST_CASE("converse experiment (reduced n)") {
    const auto nu = TailMeasure::oscillating(1.0, M_PI, 0.5, 0.0);
    const auto mu = make_counterexample_mu(nu, default_b_threshold(1.0));
    const double e = std::exp(1.0);
    const std::vector<MeasureAtom> rho{{1.0, e / (1.0 + e)}, {e, 1.0 / (1.0 + e)}};
    const auto rep = converse_experiment(mu, rho, 1.0, 300000, 2718, {1e-1, 1e-2});
    CHECK(rep.rho_alpha_norm == doctest::Approx(2.0 * e / (1.0 + e)).epsilon(1e-12));
    CHECK(rep.ratio.brackets(1.0));
    CHECK(rep.hill.base.alpha_hat > 0.85);
    CHECK(rep.hill.base.alpha_hat < 1.15);
    CHECK(rep.input_profile.amplitude > 0.25);
    CHECK_THROWS_AS(converse_experiment(mu, rho, 1.0, 0, 1, {1e-1}), domain_error);
    CHECK_THROWS_AS(converse_experiment(mu, {{1.0, 0.3}, {2.0, 0.4}}, 1.0, 10, 1,
                                        {1e-1}),
                    domain_error);
}

TEST_CASE("deterministic weight list variant of the converse experiment") {
    const auto nu = TailMeasure::oscillating(1.0, M_PI, 0.5, 0.0);
    const auto mu = make_counterexample_mu(nu, 2.0);
    const std::vector<MeasureAtom> rho{{0.5, 1.0}, {1.5, 1.0}};
    const auto rep = converse_experiment(mu, rho, 1.0, 100000, 555, {1e-2});
    CHECK(rep.rho_alpha_norm == doctest::Approx(2.0));
    CHECK(rep.hill.base.alpha_hat > 0.8);
    CHECK(rep.hill.base.alpha_hat < 1.2);
}

TEST_CASE("comparison inequalities hold exactly on enumerated toy models") {
    SplitMix64 g(20250808u);
    const double delta = 0.75;
    std::size_t models_checked = 0, levels_checked = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto model = rwt_test::random_model(g);
        ++models_checked;
        for (double x : rwt_test::probe_levels(model)) {
            ++levels_checked;
            CHECK(rwt_test::check_comp_up(model, x));
            CHECK(rwt_test::check_comp_dn(model, x, delta));
        }
    }
    CHECK(models_checked == 50);
    CHECK(levels_checked == 250);
}

TEST_CASE("replaying a report reproduces identical values bitwise") {
    const auto law = RegVarLaw::pareto(0.7);
    const auto seq = WeightSequence::iid(WeightLaw::two_point(0.5, 0.5, 2.0, 0.5), 2);
    const auto a = finite_sum_experiment(law, seq, 2, 30000, 99, {5.0, 50.0});
    const auto b = finite_sum_experiment(law, seq, 2, 30000, 99, {5.0, 50.0});
    CHECK(a.sum_tail.p_hat == b.sum_tail.p_hat);
    CHECK(a.max_tail.p_hat == b.max_tail.p_hat);
    CHECK(a.sum_ratio.ratio == b.sum_ratio.ratio);
}

TEST_CASE("degenerate weight exposes the oscillating input to Hill") {
    // with rho = unit atom at 1 the "sum" is X ~ mu itself: its tail never
    // settles into a power law and the Hill sweep disperses; mixing with the
    // Mellin-zero weight law restores a clean -alpha tail and a tight sweep
    const auto nu = TailMeasure::oscillating(1.0, M_PI, 0.5, 0.0);
    const auto mu = make_counterexample_mu(nu, 2.0);
    const double e = std::exp(1.0);
    auto spread = [](const HillSweep& s) {
        return std::max({s.half.alpha_hat, s.base.alpha_hat, s.twice.alpha_hat}) -
               std::min({s.half.alpha_hat, s.base.alpha_hat, s.twice.alpha_hat});
    };
    for (std::uint64_t seed : {11u, 42u}) {
        const auto raw =
            converse_experiment(mu, {{1.0, 1.0}}, 1.0, 300000, seed, {1e-1, 1e-2});
        const auto mixed = converse_experiment(
            mu, {{1.0, e / (1.0 + e)}, {e, 1.0 / (1.0 + e)}}, 1.0, 300000, seed,
            {1e-1, 1e-2});
        CHECK(spread(raw.hill) > 0.12);
        CHECK(spread(mixed.hill) < 0.08);
        CHECK(spread(raw.hill) > 2.0 * spread(mixed.hill));
    }
}

TEST_CASE("worker count does not change results") {
    std::vector<double> one(20000), many(20000);
    parallel_for_indexed(one.size(), [&](std::size_t i) {
        SplitMix64 g(derive_seed(7, i));
        one[i] = g.next_open01();
    }, 1);
    parallel_for_indexed(many.size(), [&](std::size_t i) {
        SplitMix64 g(derive_seed(7, i));
        many[i] = g.next_open01();
    }, 8);
    CHECK(one == many);
}
