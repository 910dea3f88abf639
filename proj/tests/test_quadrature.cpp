#include "doctest.h"

#include "dopkey/error.hpp"
#include "dopkey/quadrature.hpp"
#include "dopkey/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

using namespace dopkey;
using namespace dopkey::specfun;

namespace {

// worst relative moment error over k = 0..2M-1, exact value Gamma(a+k+1)
double worst_moment_error(const QuadratureRule& rule) {
    const double a = rule.exponent();
    double worst = 0.0;
    for (int k = 0; k <= 2 * rule.order() - 1; ++k) {
        // sum_m w_m x_m^k / Gamma(a+k+1), accumulated in log space to avoid overflow
        const double log_exact = ln_gamma(a + k + 1.0);
        double ratio = 0.0;
        for (std::size_t i = 0; i < rule.nodes().size(); ++i) {
            ratio += std::exp(rule.log_weights()[i] + k * std::log(rule.nodes()[i]) - log_exact);
        }
        worst = std::max(worst, std::fabs(ratio - 1.0));
    }
    return worst;
}

} // namespace

TEST_CASE("one-point rule") {
    const auto rule = gauss_laguerre_rule(1, 0.0);
    REQUIRE(rule.nodes().size() == 1);
    CHECK(rule.nodes()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rule.weights()[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-point rule matches the closed form") {
    const auto rule = gauss_laguerre_rule(2, 0.0);
    const double r2 = std::sqrt(2.0);
    CHECK(rule.nodes()[0] == doctest::Approx(2.0 - r2).epsilon(1e-15));
    CHECK(rule.nodes()[1] == doctest::Approx(2.0 + r2).epsilon(1e-15));
    CHECK(rule.weights()[0] == doctest::Approx((2.0 + r2) / 4.0).epsilon(1e-14));
    CHECK(rule.weights()[1] == doctest::Approx((2.0 - r2) / 4.0).epsilon(1e-14));
}

TEST_CASE("rules are exact for monomials up to degree 2M-1") {
    for (double a : {0.0, 0.5, 9.0, 19.0, 49.0}) {
        for (int m = 1; m <= 30; ++m) {
            const auto rule = gauss_laguerre_rule(m, a);
            INFO("M=" << m << " a=" << a);
            CHECK(worst_moment_error(rule) <= 1e-9);
            double total = 0.0;
            for (double w : rule.weights()) total += w;
            CHECK(std::fabs(total - std::exp(ln_gamma(a + 1.0))) <= 1e-9 * std::exp(ln_gamma(a + 1.0)));
        }
    }
}

TEST_CASE("nodes are zeros of L_M and satisfy the rule invariants for large orders") {
    for (int m : {50, 100, 150, 200}) {
        for (double a : {0.0, 9.0, 19.0, 49.0, 99.0}) {
            const auto rule = gauss_laguerre_rule(m, a);
            INFO("M=" << m << " a=" << a);
            double total = 0.0;
            for (std::size_t i = 0; i < rule.nodes().size(); ++i) {
                const double x = rule.nodes()[i];
                CHECK(x > 0.0);
                if (i > 0) CHECK(x > rule.nodes()[i - 1]);
                CHECK(std::isfinite(rule.log_weights()[i]));
                CHECK(rule.weights()[i] >= 0.0);
                CHECK(laguerre_zeros_below(m, a, x * (1.0 - 1e-10)) == static_cast<int>(i));
                CHECK(laguerre_zeros_below(m, a, x * (1.0 + 1e-10)) == static_cast<int>(i) + 1);
                total += rule.weights()[i];
            }
            CHECK(std::fabs(total / std::exp(ln_gamma(a + 1.0)) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("order 100 moment accuracy used by the key-agreement closed form") {
    for (double a : {9.0, 19.0, 49.0}) {
        const auto rule = gauss_laguerre_rule(100, a);
        INFO("a=" << a);
        CHECK(worst_moment_error(rule) <= 1e-9);
    }
}

TEST_CASE("zero counting brackets the known two-point zeros") {
    const double r2 = std::sqrt(2.0);
    CHECK(laguerre_zeros_below(2, 0.0, 0.5) == 0);
    CHECK(laguerre_zeros_below(2, 0.0, 2.0 - r2 + 1e-9) == 1);
    CHECK(laguerre_zeros_below(2, 0.0, 2.0) == 1);
    CHECK(laguerre_zeros_below(2, 0.0, 3.5) == 2);
}

TEST_CASE("rule construction rejects invalid orders and exponents") {
    CHECK_THROWS_AS(gauss_laguerre_rule(0, 0.0), DomainError);
    CHECK_THROWS_AS(gauss_laguerre_rule(5, -1.0), DomainError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(QuadratureRule(2, 0.0, {1.0, 0.5}, {-0.5, -0.5}), NumericError);
    CHECK_THROWS_AS(QuadratureRule(2, 0.0, {1.0, 2.0}, {-0.5, -inf}), NumericError);
    CHECK_THROWS_AS(QuadratureRule(2, 0.0, {0.0, 2.0}, {-0.5, -0.5}), NumericError);
    CHECK_THROWS_AS(QuadratureRule(2, 0.0, {1.0}, {-0.5}), DomainError);
}

TEST_CASE("cached rules are shared and identical under concurrent access") {
    std::vector<std::shared_ptr<const QuadratureRule>> seen(8);
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < seen.size(); ++i) {
        workers.emplace_back([&seen, i] { seen[i] = cached_gauss_laguerre_rule(40, 19.0); });
    }
    for (auto& w : workers) w.join();
    const auto direct = gauss_laguerre_rule(40, 19.0);
    for (const auto& rule : seen) {
        REQUIRE(rule);
        CHECK(rule == cached_gauss_laguerre_rule(40, 19.0));
        for (std::size_t i = 0; i < direct.nodes().size(); ++i) CHECK(rule->nodes()[i] == direct.nodes()[i]);
    }
}

TEST_CASE("adaptive integration of smooth and kinked integrands") {
    const auto r1 = integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, 40.0, 1e-14);
    CHECK(r1.value == doctest::Approx(1.0 - std::exp(-40.0)).epsilon(1e-13));
    const auto r2 = integrate_adaptive([](double x) { return std::fabs(x - 0.3); }, 0.0, 1.0, 1e-12);
    CHECK(r2.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-11));
    const auto r3 = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-14);
    CHECK(r3.value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0, 1e-12).value == 0.0);
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::sqrt(std::fabs(x)); }, -1.0, 1.0, 1e-15,
                                       0.0, 20),
                    NumericError);
}
