#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "barrierlab/nonlinearity.hpp"

using namespace barrierlab;

namespace {

/// Composite-Simpson quadrature of the decaying profile for phi(s) = s^k, used
/// as the independent cross-check of the closed-form integral.
double quadrature_of_profile(double k, double nu, double eps, int panels) {
    double sum = 0.0;
    const double h = eps / panels;
    for (int i = 0; i < panels; ++i) {
        const double a = i * h;
        sum += (power_law_profile(k, nu, a) +
                4.0 * power_law_profile(k, nu, a + 0.5 * h) +
                power_law_profile(k, nu, a + h)) *
               (h / 6.0);
    }
    return sum;
}

} // namespace

TEST_CASE("pointwise evaluation") {
    CHECK(eval_phi(GrowthFunction::power_law(1.0), 0.5) == 0.5);
    CHECK(eval_phi(GrowthFunction::var_exp_log(1.0), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_phi(GrowthFunction::var_exp_log(1.0), std::exp(-1.0)) ==
          doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    // Continuity at 0 for the built-in kinds.
    CHECK(eval_phi(GrowthFunction::power_law(2.0), 0.0) == 0.0);
    CHECK(eval_phi(GrowthFunction::var_exp_log(1.0), 0.0) == 0.0);
    // Truncated sub-linear kind: power on [0,1], linear continuation beyond.
    auto half = GrowthFunction::power_law(0.5);
    CHECK(eval_phi(half, 0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval_phi(half, 4.0) == doctest::Approx(4.0).epsilon(1e-14));

    SUBCASE("strict monotonicity on sample points") {
        for (const auto& phi :
             {GrowthFunction::power_law(1.5), GrowthFunction::var_exp_log(0.7),
              GrowthFunction::power_law(0.5, 2.0)}) {
            double prev = eval_phi(phi, 1e-6);
            for (double t = 0.01; t < 3.0; t += 0.07) {
                const double cur = eval_phi(phi, t);
                CHECK(cur > prev);
                prev = cur;
            }
        }
    }
    SUBCASE("argument guards") {
        CHECK_THROWS_AS(eval_phi(GrowthFunction::power_law(1.0), -0.1), DomainError);
        CHECK_THROWS_AS(eval_phi(GrowthFunction::power_law(1.0),
                                 std::numeric_limits<double>::quiet_NaN()),
                        DomainError);
        CHECK_THROWS_AS(eval_phi(GrowthFunction::power_law(1.0),
                                 std::numeric_limits<double>::infinity()),
                        DomainError);
    }
    SUBCASE("constructor guards") {
        CHECK_THROWS_AS(GrowthFunction::power_law(-1.0), InvalidNonlinearity);
        CHECK_THROWS_AS(GrowthFunction::power_law(1.0, 0.0), InvalidNonlinearity);
        CHECK_THROWS_AS(GrowthFunction::var_exp_log(0.0), InvalidNonlinearity);
        CHECK_THROWS_AS(GrowthFunction::var_exp_log(-2.0), InvalidNonlinearity);
    }
}

TEST_CASE("tabulated growth functions") {
    std::vector<double> ts, vs;
    for (int i = 0; i <= 20; ++i) {
        const double t = 0.1 + 1.9 * i / 20.0;
        ts.push_back(t);
        vs.push_back(t * t);
    }
    auto tab = GrowthFunction::tabulated(ts, vs, "square");
    CHECK(tab.kind() == PhiKind::Tabulated);
    CHECK(tab.table_min() == 0.1);
    CHECK(tab.table_max() == 2.0);
    CHECK(tab(1.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(tab(0.37) == doctest::Approx(0.37 * 0.37).epsilon(1e-3));
    // Exact at nodes by construction.
    CHECK(tab(0.1) == doctest::Approx(0.01).epsilon(1e-14));
    // Extrapolation is refused.
    CHECK_THROWS_AS(tab(0.05), DomainError);
    CHECK_THROWS_AS(tab(2.5), DomainError);
    // The integral conditions need phi near the range ends, which the table
    // cannot reach.
    CHECK_THROWS_AS(
        check_integral_condition(tab, IntegralCondition::Osgood), DomainError);

    CHECK_THROWS_AS(GrowthFunction::tabulated({0.1, 0.2}, {0.2, 0.1}),
                    InvalidNonlinearity);
    CHECK_THROWS_AS(GrowthFunction::tabulated({0.2, 0.1}, {0.1, 0.2}),
                    InvalidNonlinearity);
    CHECK_THROWS_AS(GrowthFunction::tabulated({0.1}, {0.1}), InvalidNonlinearity);
}

TEST_CASE("improper integral decisions") {
    SUBCASE("divergent near zero for every admissible power") {
        for (double k : {1.0, 1.5, 2.0, 2.5, 3.0}) {
            auto v = check_integral_condition(GrowthFunction::power_law(k),
                                              IntegralCondition::Osgood);
            CHECK(v.holds());
            CHECK(std::isinf(v.limit));
        }
    }
    SUBCASE("log-corrected growth diverges on both ranges") {
        auto phi = GrowthFunction::var_exp_log(1.0);
        CHECK(check_integral_condition(phi, IntegralCondition::Osgood).holds());
        CHECK(check_integral_condition(phi, IntegralCondition::KellerOsserman).holds());
    }
    SUBCASE("truncated square root converges near zero with limit 2") {
        auto v = check_integral_condition(GrowthFunction::power_law(0.5),
                                          IntegralCondition::Osgood);
        REQUIRE(v.convergent());
        CHECK(v.limit == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(v.limit_error > 0.0);
        CHECK(v.limit_error < 1e-9);
        CHECK(v.trace.size() > 20);
        // Trace partial sums are nondecreasing and end at the limit.
        for (std::size_t i = 1; i < v.trace.size(); ++i)
            CHECK(v.trace[i].partial_sum >= v.trace[i - 1].partial_sum);
        CHECK(v.trace.back().partial_sum <= v.limit + 1e-12);
    }
    SUBCASE("cubic growth converges at infinity with limit 1/2") {
        auto v = check_integral_condition(GrowthFunction::power_law(3.0),
                                          IntegralCondition::KellerOsserman);
        REQUIRE(v.convergent());
        CHECK(v.limit == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(v.limit_error < 1e-9);
    }
    SUBCASE("tail condition diverges exactly up to linear growth") {
        for (double k : {1.0, 1.5, 2.0, 2.5, 3.0}) {
            auto v = check_integral_condition(GrowthFunction::power_law(k),
                                              IntegralCondition::KellerOsserman);
            CHECK(v.holds() == (k <= 1.0));
        }
    }
    SUBCASE("pointwise domination orders convergent limits") {
        auto v1 = check_integral_condition(GrowthFunction::power_law(0.5, 1.0),
                                           IntegralCondition::Osgood);
        auto v2 = check_integral_condition(GrowthFunction::power_law(0.5, 2.0),
                                           IntegralCondition::Osgood);
        REQUIRE(v1.convergent());
        REQUIRE(v2.convergent());
        CHECK(v2.limit == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(v2.limit < v1.limit);
    }
    SUBCASE("the decay-profile condition is routed to its own entry point") {
        CHECK_THROWS_AS(check_integral_condition(GrowthFunction::power_law(2.0),
                                                 IntegralCondition::PhiB),
                        DomainError);
    }
}

TEST_CASE("decay-profile condition") {
    SUBCASE("holds exactly up to quadratic growth") {
        for (double k : {1.0, 1.5, 2.0, 2.5, 3.0}) {
            auto v = check_phi_B(GrowthFunction::power_law(k), 1.0);
            CHECK(v.holds() == (k <= 2.0));
        }
    }
    SUBCASE("cubic plateau matches the closed-form limit sqrt(2)") {
        auto v = check_phi_B(GrowthFunction::power_law(3.0), 1.0);
        REQUIRE(v.convergent());
        // I(nu) = sqrt(2 eps + nu^{-2}) - 1/nu -> sqrt(2 eps) as nu grows.
        CHECK(std::abs(v.limit - std::sqrt(2.0)) < 1e-6);
        CHECK(!v.trace.empty());
    }
    SUBCASE("k = 2.5 plateau matches 2 * 1.5^(1/3)") {
        auto v = check_phi_B(GrowthFunction::power_law(2.5), 1.0);
        REQUIRE(v.convergent());
        CHECK(std::abs(v.limit - 2.0 * std::cbrt(1.5)) < 1e-6);
    }
    SUBCASE("log-corrected growth satisfies the condition") {
        CHECK(check_phi_B(GrowthFunction::var_exp_log(1.0), 1.0).holds());
    }
}

TEST_CASE("closed-form decay integrals") {
    CHECK(power_law_closed_form(1.0, 1.0, 10.0) ==
          doctest::Approx(10.0 * (1.0 - std::exp(-1.0))).epsilon(1e-13));
    CHECK(power_law_closed_form(2.0, 1.0, 10.0) ==
          doctest::Approx(std::log(11.0)).epsilon(1e-13));
    // f(t) = (2t + 1)^{-1/2}, whose integral over [0, 1] is sqrt(3) - 1.
    CHECK(power_law_closed_form(3.0, 1.0, 1.0) ==
          doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-13));
    CHECK_THROWS_AS(power_law_closed_form(0.5, 1.0, 1.0), DomainError);

    SUBCASE("profile formulas") {
        CHECK(power_law_profile(1.0, 7.0, 0.3) ==
              doctest::Approx(7.0 * std::exp(-0.3)).epsilon(1e-13));
        CHECK(power_law_profile(2.0, 10.0, 0.5) ==
              doctest::Approx(1.0 / (0.5 + 0.1)).epsilon(1e-13));
        CHECK(power_law_profile(3.0, 10.0, 0.2) ==
              doctest::Approx(1.0 / std::sqrt(0.4 + 0.01)).epsilon(1e-13));
    }
    SUBCASE("quadrature of the exact profile matches the closed form") {
        for (double k : {1.0, 1.5, 2.0, 3.0}) {
            const double exact = power_law_closed_form(k, 1.0, 10.0);
            const double quad = quadrature_of_profile(k, 10.0, 1.0, 4096);
            CHECK(std::abs(quad - exact) <= 1e-8 * std::abs(exact));
        }
    }
}
