#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "brute_force.hpp"
#include "gexp/discrete_expectation.hpp"
#include "gexp/rng.hpp"

using namespace gexp;

namespace {

const VolatilityDomain kQuarterOne(0.25, 1.0, 1.0);

AdaptedIntegrand const_integrand(const VolatilityDomain& d, int n, int numerator) {
    return AdaptedIntegrand::constant(admissible_sigmas(d, n), numerator);
}

} // namespace

TEST_CASE("law of a single coin toss") {
    const auto law = law_from_integrand(const_integrand(kQuarterOne, 1, 1), kQuarterOne);
    REQUIRE(law.support.size() == 2);
    // sigma = 1, one step: x_1 = +-sigma*sqrt(T) = +-1, i.e. index +-1.
    CHECK(law.support[0].indices == std::vector<long long>{0, 1});
    CHECK(law.support[1].indices == std::vector<long long>{0, -1});
    CHECK(law.support[0].probability == 0.5);
    CHECK(law.support[1].probability == 0.5);
    CHECK(law.lattice.value(1) == doctest::Approx(std::sqrt(kQuarterOne.T)));
}

TEST_CASE("two-step law has variance sigma^2 T") {
    // Independent oracle: sum over the four sign paths by hand.
    for (int numerator : {1, 2, 3}) {
        const double sigma = numerator / 2.0; // exact binary fractions
        const VolatilityDomain d(sigma * sigma, sigma * sigma, 2.0);
        const auto law = law_from_integrand(const_integrand(d, 2, numerator), d);
        REQUIRE(law.support.size() == 4);
        double var = 0.0;
        double mass = 0.0;
        for (const auto& wp : law.support) {
            const double x2 = law.lattice.value(wp.indices[2]);
            var += wp.probability * x2 * x2;
            mass += wp.probability;
        }
        CHECK(mass == 1.0);
        CHECK(var == doctest::Approx(sigma * sigma * d.T).epsilon(1e-13));
    }
}

TEST_CASE("sign-dependent integrand still has zero conditional means") {
    const SigmaSet sigmas = admissible_sigmas(kQuarterOne, 2);
    AdaptedIntegrand f;
    f.n = 2;
    f.sigmas = sigmas;
    f.numerator_at = [](int step, std::span<const long long> prefix) {
        if (step == 0) return 1;
        return prefix.back() > 0 ? 2 : 1; // depends on the first move
    };
    const auto law = law_from_integrand(f, kQuarterOne);
    const auto report = validate_law(law, kQuarterOne);
    CHECK(report.all_ok());
    CHECK(report.worst_conditional_mean == 0.0);
}

TEST_CASE("every integrand law passes validation") {
    for (int n : {2, 3, 5, 8}) {
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            const auto f = AdaptedIntegrand::randomized(admissible_sigmas(kQuarterOne, n), seed);
            const auto report = validate_law(law_from_integrand(f, kQuarterOne), kQuarterOne);
            CHECK(report.probabilities_ok);
            CHECK(report.martingale_ok);
            CHECK(report.bounds_ok);
            CHECK(report.total_probability == 1.0);
        }
    }
}

TEST_CASE("merging at zero volatility keeps the law tight") {
    const VolatilityDomain d(0.0, 1.0, 1.0);
    const SigmaSet sigmas = admissible_sigmas(d, 3);
    AdaptedIntegrand f;
    f.n = 3;
    f.sigmas = sigmas;
    f.numerator_at = [](int step, std::span<const long long>) { return step == 1 ? 0 : 3; };
    const auto law = law_from_integrand(f, d);
    // Step 1 is frozen: 2 choices at step 0 times 2 at step 2.
    CHECK(law.support.size() == 4);
    CHECK(validate_law(law, d).all_ok());
}

TEST_CASE("hand-built drifted law fails the martingale check") {
    const Lattice lattice(kQuarterOne, 1);
    MartingaleLaw law;
    law.lattice = lattice;
    law.support.push_back({{0, 2}, 1.0}); // always moves up by 2 slots
    const auto report = validate_law(law, kQuarterOne);
    CHECK(report.probabilities_ok);
    CHECK_FALSE(report.martingale_ok);
    CHECK(report.worst_conditional_mean == doctest::Approx(lattice.value(2)));
    // |delta|^2 * n / T = 4 > R_d: the bounds check fails too.
    CHECK_FALSE(report.bounds_ok);
}

TEST_CASE("oversized increments fail the bounds check exactly") {
    const int n = 4;
    const Lattice lattice(kQuarterOne, n);
    // Full binary tree with |index delta| = 2 * max numerator: a perfectly
    // good martingale whose volatility is out of bounds.
    MartingaleLaw law;
    law.lattice = lattice;
    const long long big = 2LL * admissible_sigmas(kQuarterOne, n).max_numerator();
    for (unsigned signs = 0; signs < 16; ++signs) {
        std::vector<long long> idx{0};
        for (int k = 0; k < n; ++k) {
            idx.push_back(idx.back() + (((signs >> k) & 1u) ? big : -big));
        }
        law.support.push_back({std::move(idx), 1.0 / 16.0});
    }
    const auto report = validate_law(law, kQuarterOne);
    CHECK(report.probabilities_ok);
    CHECK(report.martingale_ok);
    CHECK_FALSE(report.bounds_ok);
    CHECK(report.worst_bound_violation == doctest::Approx(3.0)); // (2)^2 - R_d = 3
}

TEST_CASE("markov dp on the closed-form payoffs") {
    SUBCASE("identity prices to zero") {
        // Zero up to the rounding creep of the argmax over equal-in-reals
        // candidates (the spacing sqrt(T)/(n sqrt n) is irrational).
        for (int n : {1, 3, 8, 50}) {
            const auto report = value_markov_dp(payoffs::identity(), n, kQuarterOne);
            CHECK(std::fabs(report.value) <= 1e-13);
        }
    }
    SUBCASE("square prices to R_d * T") {
        for (int n : {1, 2, 3, 8, 17}) {
            const auto report = value_markov_dp(payoffs::square(), n, kQuarterOne);
            CHECK(report.value == doctest::Approx(1.0).epsilon(1e-13));
        }
        // Independent check at n=3: literal enumeration over all integrands.
        const double brute = testing::brute_force_max(payoffs::square(), 3, kQuarterOne);
        CHECK(std::fabs(brute - value_markov_dp(payoffs::square(), 3, kQuarterOne).value) <=
              1e-12);
    }
    SUBCASE("negative square prices to -r_d * T") {
        const auto report = value_markov_dp(payoffs::neg_square(), 4, kQuarterOne);
        CHECK(report.value == doctest::Approx(-0.25).epsilon(1e-13));
        const double brute = testing::brute_force_max(payoffs::neg_square(), 4,
                                                      VolatilityDomain(0.5, 1.0, 1.0));
        CHECK(std::fabs(brute -
                        value_markov_dp(payoffs::neg_square(), 4, VolatilityDomain(0.5, 1.0, 1.0))
                            .value) <= 1e-12);
    }
    SUBCASE("wrong payoff kind is rejected") {
        CHECK_THROWS_AS(value_markov_dp(payoffs::lookback_max(), 4, kQuarterOne), DomainError);
    }
}

TEST_CASE("argmax policy matches convexity") {
    DpOptions opts;
    opts.with_policy = true;
    SUBCASE("strictly convex: largest level everywhere") {
        const auto report = value_markov_dp(payoffs::square(), 6, kQuarterOne, opts);
        REQUIRE(report.policy.has_value());
        const int kmax = report.policy->max_numerator;
        for (int k = 0; k < 6; ++k) {
            for (int entry : report.policy->rows[k]) CHECK(entry == kmax);
        }
    }
    SUBCASE("strictly concave: smallest level everywhere") {
        const auto report = value_markov_dp(payoffs::neg_square(), 6, kQuarterOne, opts);
        const SigmaSet sigmas = admissible_sigmas(kQuarterOne, 6);
        for (int k = 0; k < 6; ++k) {
            for (int entry : report.policy->rows[k]) CHECK(entry == sigmas.min_numerator());
        }
    }
    SUBCASE("weakly convex: the largest level is among the argmaxes") {
        // Deep in the linear regions every level ties; assert the max level
        // attains the nodal value rather than asserting it is chosen.
        const int n = 5;
        const auto report = value_markov_dp(payoffs::call(0.0), n, kQuarterOne, opts);
        const auto constant = value_markov_dp(payoffs::call(0.0), n, kQuarterOne);
        const SigmaSet sigmas = admissible_sigmas(kQuarterOne, n);
        AdaptedIntegrand top = AdaptedIntegrand::constant(sigmas, sigmas.max_numerator());
        const auto law = law_from_integrand(top, kQuarterOne);
        double expectation = 0.0;
        for (const auto& wp : law.support) {
            LatticePath path{law.lattice, wp.indices};
            expectation += wp.probability * evaluate_payoff(payoffs::call(0.0), path);
        }
        CHECK(expectation == doctest::Approx(constant.value).epsilon(1e-13));
        CHECK(report.policy.has_value());
    }
}

TEST_CASE("max-augmented dp") {
    SUBCASE("single level lookback at n=1") {
        const VolatilityDomain d(1.0, 1.0, 1.0);
        const auto report = value_maxaug_dp(payoffs::lookback_max(), 1, d);
        CHECK(report.value == 0.5); // max(0, +-1) averaged
    }
    SUBCASE("running-max payoff that ignores the max reduces to identity") {
        Payoff g;
        g.kind = PayoffKind::RunningMax;
        g.name = "terminal-via-max";
        g.growth_a = 1.0;
        g.growth_b = 1.0;
        g.terminal_max = [](double x, double) { return x; };
        for (int n : {1, 2, 5, 9}) {
            CHECK(std::fabs(value_maxaug_dp(g, n, kQuarterOne).value) <= 1e-13);
        }
    }
    SUBCASE("larger control set can only help") {
        const VolatilityDomain tight(0.25, 0.25, 1.0);
        const auto wide = value_maxaug_dp(payoffs::lookback_max(), 4, kQuarterOne);
        const auto narrow = value_maxaug_dp(payoffs::lookback_max(), 4, tight);
        CHECK(wide.value >= narrow.value);
    }
    SUBCASE("state cap is enforced") {
        DpOptions opts;
        opts.maxaug_state_cap = 10;
        CHECK_THROWS_AS(value_maxaug_dp(payoffs::lookback_max(), 6, kQuarterOne, opts),
                        BudgetExceeded);
    }
    SUBCASE("wrong payoff kind is rejected") {
        CHECK_THROWS_AS(value_maxaug_dp(payoffs::square(), 4, kQuarterOne), DomainError);
    }
}

TEST_CASE("enumeration agrees with dp and with the literal oracle") {
    SUBCASE("terminal payoffs vs markov dp, n <= 5") {
        const VolatilityDomain d(0.25, 1.0, 1.0);
        for (int n = 2; n <= 5; ++n) {
            REQUIRE(admissible_sigmas(d, n).size() <= 3);
            for (const Payoff& payoff :
                 {payoffs::square(), payoffs::neg_square(), payoffs::call(0.0),
                  payoffs::put(0.1), payoffs::butterfly(0.0, 0.5), payoffs::identity()}) {
                const auto en = value_enumerate(payoff, n, d);
                const auto dp = value_markov_dp(payoff, n, d);
                CHECK(std::fabs(en.report.value - dp.value) <= 1e-12);
            }
        }
    }
    SUBCASE("running max vs max-augmented dp") {
        for (int n = 2; n <= 5; ++n) {
            const auto en = value_enumerate(payoffs::lookback_max(), n, kQuarterOne);
            const auto dp = value_maxaug_dp(payoffs::lookback_max(), n, kQuarterOne);
            CHECK(std::fabs(en.report.value - dp.value) <= 1e-12);
        }
    }
    SUBCASE("literal product-space enumeration at tiny n") {
        // 2 levels at n=3/n=4 under [0.5, 1]; 3 levels at n=3 under [0.09, 1].
        const VolatilityDomain half(0.5, 1.0, 1.0);
        const VolatilityDomain wide(0.09, 1.0, 1.0);
        for (const Payoff& payoff :
             {payoffs::butterfly(0.0, 0.5), payoffs::call(0.2), payoffs::lookback_max()}) {
            CHECK(std::fabs(testing::brute_force_max(payoff, 3, half) -
                            value_enumerate(payoff, 3, half).report.value) <= 1e-12);
            CHECK(std::fabs(testing::brute_force_max(payoff, 4, half) -
                            value_enumerate(payoff, 4, half).report.value) <= 1e-12);
            CHECK(std::fabs(testing::brute_force_max(payoff, 3, wide) -
                            value_enumerate(payoff, 3, wide).report.value) <= 1e-12);
        }
    }
    SUBCASE("singleton sigma set is a plain expectation") {
        const VolatilityDomain point(1.0, 1.0, 1.0);
        const auto en = value_enumerate(payoffs::butterfly(0.0, 0.5), 4, point);
        const auto law = law_from_integrand(const_integrand(point, 4, 4), point);
        double expectation = 0.0;
        for (const auto& wp : law.support) {
            LatticePath path{law.lattice, wp.indices};
            expectation += wp.probability * evaluate_payoff(payoffs::butterfly(0.0, 0.5), path);
        }
        CHECK(en.report.value == doctest::Approx(expectation).epsilon(1e-14));
    }
    SUBCASE("budget guard") {
        CHECK_THROWS_AS(value_enumerate(payoffs::square(), 7, kQuarterOne), BudgetExceeded);
        // 5 levels at n=16 under [0.5, 1]
        CHECK_THROWS_AS(value_enumerate(payoffs::square(), 6, VolatilityDomain(0.09, 1.0, 1.0)),
                        BudgetExceeded);
    }
}

TEST_CASE("enumeration argmax integrand reproduces the maximum") {
    for (const Payoff& payoff : {payoffs::butterfly(0.0, 0.5), payoffs::call(0.0)}) {
        const auto en = value_enumerate(payoff, 4, kQuarterOne);
        const auto f = en.argmax.as_integrand();
        const auto law = law_from_integrand(f, kQuarterOne);
        CHECK(validate_law(law, kQuarterOne).all_ok());
        double expectation = 0.0;
        for (const auto& wp : law.support) {
            LatticePath path{law.lattice, wp.indices};
            expectation += wp.probability * evaluate_payoff(payoff, path);
        }
        CHECK(expectation == doctest::Approx(en.report.value).epsilon(1e-13));
    }
}

TEST_CASE("argmax integrand csv shape") {
    const auto en = value_enumerate(payoffs::square(), 3, kQuarterOne);
    const std::string csv = en.argmax.to_csv();
    CHECK(csv.rfind("step,prefix-id,sigma\n", 0) == 0);
    // 1 + 2 + 4 nodes plus header.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
    // Convex payoff: every entry is the top level 3/3 = 1.
    CHECK(csv.find(",0.666") == std::string::npos);
}

TEST_CASE("discrete value functional is sublinear, monotone, constant-invariant") {
    const VolatilityDomain d(0.25, 1.0, 1.0);
    const int n = 3;
    std::uint64_t seed = 99;

    auto random_terminal = [&](std::uint64_t id) {
        const double a = static_cast<double>(rng::at(seed, id, 0) % 2001) / 1000.0 - 1.0;
        const double b = static_cast<double>(rng::at(seed, id, 1) % 2001) / 1000.0 - 1.0;
        const double k = static_cast<double>(rng::at(seed, id, 2) % 1001) / 1000.0 - 0.5;
        Payoff p;
        p.kind = PayoffKind::Terminal;
        p.name = "random";
        p.growth_a = 4.0;
        p.growth_b = 2.0;
        p.terminal = [a, b, k](double x) { return a * x + b * std::max(x - k, 0.0); };
        return p;
    };
    auto value_of = [&](const Payoff& p) { return value_enumerate(p, n, d).report.value; };

    for (std::uint64_t id = 0; id < 60; ++id) {
        const Payoff p1 = random_terminal(2 * id);
        const Payoff p2 = random_terminal(2 * id + 1);

        Payoff sum;
        sum.kind = PayoffKind::Terminal;
        sum.name = "sum";
        sum.growth_a = 8.0;
        sum.growth_b = 2.0;
        sum.terminal = [&p1, &p2](double x) { return p1.terminal(x) + p2.terminal(x); };

        const double v1 = value_of(p1);
        const double v2 = value_of(p2);
        CHECK(value_of(sum) <= v1 + v2 + 1e-12);

        const double lambda = static_cast<double>(rng::at(seed, 1000 + id, 0) % 3000) / 1000.0;
        Payoff scaled = p1;
        scaled.terminal = [&p1, lambda](double x) { return lambda * p1.terminal(x); };
        CHECK(value_of(scaled) == doctest::Approx(lambda * v1).epsilon(1e-12));

        Payoff shifted = p1;
        const double c = 0.37;
        shifted.terminal = [&p1, c](double x) { return p1.terminal(x) + c; };
        CHECK(value_of(shifted) == doctest::Approx(v1 + c).epsilon(1e-12));

        Payoff bigger = p1;
        bigger.terminal = [&p1](double x) { return p1.terminal(x) + std::fabs(x); };
        CHECK(value_of(p1) <= value_of(bigger) + 1e-12);
    }
}

TEST_CASE("value functional axioms also hold along the dp route") {
    // Same axioms at an n far beyond enumeration reach, valued by backward
    // induction on terminal payoffs.
    const VolatilityDomain d(0.25, 1.0, 1.0);
    const int n = 24;
    std::uint64_t seed = 314;
    auto value_of = [&](const Payoff& p) { return value_markov_dp(p, n, d).value; };

    for (std::uint64_t id = 0; id < 20; ++id) {
        const double a = static_cast<double>(rng::at(seed, id, 0) % 2001) / 1000.0 - 1.0;
        const double b = static_cast<double>(rng::at(seed, id, 1) % 2001) / 1000.0 - 1.0;
        const double k = static_cast<double>(rng::at(seed, id, 2) % 1001) / 500.0 - 1.0;
        Payoff p1;
        p1.kind = PayoffKind::Terminal;
        p1.name = "dp-random-1";
        p1.growth_a = 4.0;
        p1.growth_b = 2.0;
        p1.terminal = [a, k](double x) { return a * x + std::max(x - k, 0.0); };
        Payoff p2;
        p2.kind = PayoffKind::Terminal;
        p2.name = "dp-random-2";
        p2.growth_a = 4.0;
        p2.growth_b = 2.0;
        p2.terminal = [b, k](double x) { return b * x * x + std::max(k - x, 0.0); };

        Payoff sum = p1;
        sum.terminal = [&p1, &p2](double x) { return p1.terminal(x) + p2.terminal(x); };
        const double v1 = value_of(p1);
        const double v2 = value_of(p2);
        CHECK(value_of(sum) <= v1 + v2 + 1e-12);

        Payoff shifted = p1;
        shifted.terminal = [&p1](double x) { return p1.terminal(x) + 0.5; };
        CHECK(value_of(shifted) == doctest::Approx(v1 + 0.5).epsilon(1e-12));

        Payoff scaled = p1;
        scaled.terminal = [&p1](double x) { return 2.25 * p1.terminal(x); };
        CHECK(value_of(scaled) == doctest::Approx(2.25 * v1).epsilon(1e-12));

        Payoff dominating = p1;
        dominating.terminal = [&p1](double x) { return p1.terminal(x) + 0.1 * x * x; };
        CHECK(v1 <= value_of(dominating) + 1e-12);
    }
}

TEST_CASE("law budget guard") {
    SigmaSet sigmas = admissible_sigmas(kQuarterOne, 21);
    CHECK_THROWS_AS(law_from_integrand(AdaptedIntegrand::constant(sigmas, 21), kQuarterOne),
                    BudgetExceeded);
}

TEST_CASE("compute_value dispatches by payoff kind") {
    CHECK(compute_value(payoffs::square(), 4, kQuarterOne).engine == Engine::MarkovDP);
    CHECK(compute_value(payoffs::lookback_max(), 4, kQuarterOne).engine ==
          Engine::MaxAugmentedDP);

    Payoff pf;
    pf.kind = PayoffKind::PathFunctional;
    pf.name = "quarter-point";
    pf.growth_a = 1.0;
    pf.growth_b = 1.0;
    pf.functional = [](const LatticePath& path) {
        return std::fabs(interpolate(path, path.lattice.T / 4.0));
    };
    CHECK(compute_value(pf, 4, kQuarterOne).engine == Engine::Enumeration);
    CHECK(compute_value(payoffs::square(), 4, kQuarterOne, Engine::Enumeration).engine ==
          Engine::Enumeration);
}
