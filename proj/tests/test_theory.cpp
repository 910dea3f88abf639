#include "doctest.h"

#include "dopkey/error.hpp"
#include "dopkey/quadrature.hpp"
#include "dopkey/specfun.hpp"
#include "dopkey/theory.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

using namespace dopkey;
using specfun::integrate_adaptive;

namespace {

const std::vector<int> kPilotLengths{10, 20, 50};
const std::vector<double> kGammas{0.02, 0.05, 0.1, 0.2, 0.35, 0.5};

// key-match probability assembled from Boost distributions and Boost quadrature
double boost_p_c(int n, double step) {
    namespace bm = boost::math;
    const bm::gamma_distribution<double> prior(n, 1.0);
    const double upper = bm::quantile(bm::complement(prior, 1e-16));
    double total = 0.0;
    for (int l = 0; l * step < upper; ++l) {
        const double lo = l * step, hi = std::min((l + 1) * step, upper);
        auto f = [&](double t) {
            if (t <= 0.0) return 0.0;
            const bm::non_central_chi_squared_distribution<double> cond(2.0 * n, t);
            const double p = bm::cdf(cond, (l + 1) * step) - (l == 0 ? 0.0 : bm::cdf(cond, lo));
            return p * bm::pdf(prior, t);
        };
        total += bm::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-12);
    }
    return total;
}

} // namespace

TEST_CASE("noncentral chi-square density") {
    for (double x : {0.0, 0.3, 1.0, 5.0, 20.0}) {
        CHECK(noncentral_chi2_pdf(2, 0.0, x) == doctest::Approx(0.5 * std::exp(-0.5 * x)).epsilon(1e-14));
    }
    namespace bm = boost::math;
    for (int k : {2, 4, 20, 100}) {
        for (double lambda : {0.5, 15.0, 150.0}) {
            const bm::non_central_chi_squared_distribution<double> d(k, lambda);
            for (double x : {0.1, 3.0, 30.0, 160.0, 400.0}) {
                INFO("k=" << k << " lambda=" << lambda << " x=" << x);
                const double ref = bm::pdf(d, x);
                CHECK(std::fabs(noncentral_chi2_pdf(k, lambda, x) - ref) <= 1e-10 * ref + 1e-300);
            }
        }
    }
    auto pdf = [](double x) { return noncentral_chi2_pdf(20, 15.0, x); };
    CHECK(integrate_adaptive(pdf, 0.0, 400.0, 1e-12).value == doctest::Approx(1.0).epsilon(1e-9));
    auto first_moment = [](double x) { return x * noncentral_chi2_pdf(20, 15.0, x); };
    CHECK(integrate_adaptive(first_moment, 0.0, 400.0, 1e-11).value == doctest::Approx(35.0).epsilon(1e-9));
    CHECK_THROWS_AS(noncentral_chi2_pdf(3, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(noncentral_chi2_pdf(2, -1.0, 1.0), DomainError);
}

TEST_CASE("interval probability matches direct integration of the density") {
    const TheoryParams p{10, 10.0, 100};
    const double pl = p_l_given_theta(20.0, 1, p);
    auto pdf = [](double x) { return noncentral_chi2_pdf(20, 20.0, x); };
    const double direct = integrate_adaptive(pdf, 10.0, 20.0, 1e-13).value;
    CHECK(pl > 0.0);
    CHECK(pl < 1.0);
    CHECK(std::fabs(pl - direct) <= 1e-9);
    for (double theta : {0.5, 8.0, 60.0}) {
        for (std::uint64_t l : {0u, 3u, 9u}) {
            const TheoryParams q{20, 2.5, 100};
            auto f = [theta](double x) { return noncentral_chi2_pdf(40, theta, x); };
            const double ref = integrate_adaptive(f, l * 2.5, (l + 1) * 2.5, 1e-14).value;
            CHECK(std::fabs(p_l_given_theta(theta, l, q) - ref) <= 1e-9);
        }
    }
}

TEST_CASE("interval probabilities telescope") {
    for (int n : {10, 20, 50}) {
        for (double theta : {1.0, 20.0, 80.0}) {
            const TheoryParams p{n, 0.7, 100};
            // mean 2N + theta, variance 4N + 4 theta; 12 sd above the mean is deep in the tail
            const double reach = 2.0 * n + theta + 12.0 * std::sqrt(4.0 * n + 4.0 * theta);
            const auto last = static_cast<std::uint64_t>(reach / 0.7);
            double sum = 0.0;
            for (std::uint64_t l = 0; l <= last; ++l) sum += p_l_given_theta(theta, l, p);
            const double tail = specfun::marcum_q(n, std::sqrt(theta), std::sqrt((last + 1) * 0.7));
            CHECK(std::fabs(sum - (1.0 - tail)) <= 1e-12);
            CHECK(sum >= 1.0 - 1e-6);
        }
    }
    CHECK(p_l_given_theta(5.0, 0, TheoryParams{10, 1e6, 100}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Gamma(N, 1) density") {
    for (double x : {0.0, 0.5, 3.0}) CHECK(gamma_pdf_shape_n(x, 1) == doctest::Approx(std::exp(-x)));
    for (int n : {2, 10, 50}) {
        const double mode = gamma_pdf_shape_n(n - 1.0, n);
        CHECK(gamma_pdf_shape_n(n - 1.0 - 1e-3, n) < mode);
        CHECK(gamma_pdf_shape_n(n - 1.0 + 1e-3, n) < mode);
    }
    auto f = [](double x) { return gamma_pdf_shape_n(x, 20); };
    CHECK(integrate_adaptive(f, 0.0, 200.0, 1e-13).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact key-match probability agrees with a Boost-built oracle") {
    for (int n : kPilotLengths) {
        for (double g : {0.05, 0.2, 0.5}) {
            INFO("N=" << n << " gamma=" << g);
            const double ours = p_c_exact(TheoryParams{n, g * n, 100});
            CHECK(std::fabs(ours - boost_p_c(n, g * n)) <= 1e-9);
        }
    }
}

TEST_CASE("exact key-match probability limits") {
    for (int n : kPilotLengths) {
        CHECK(p_c_exact(TheoryParams{n, 100.0 * n, 100}) >= 1.0 - 1e-4);
        CHECK(p_c_exact(TheoryParams{n, 1e-6 * n, 100}) <= 1e-3);
        CHECK(p_c_glq(TheoryParams{n, 100.0 * n, 100}) >= 1.0 - 1e-4);
        CHECK(kdr_theory(TheoryParams{n, 100.0 * n, 100}) == doctest::Approx(0.0).epsilon(1e-4));
        CHECK(kdr_theory(TheoryParams{n, 1e-6 * n, 100}) >= 1.0 - 1e-3);
    }
}

TEST_CASE("closed form stays in [0, 1]") {
    for (int n : {1, 2, 10, 50, 100}) {
        for (int m : {1, 5, 50, 200}) {
            for (double step : {1e-4, 0.3, 7.0, 1e4}) {
                const double v = p_c_glq(TheoryParams{n, step, m});
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("closed form converges towards the exact value on average") {
    const std::vector<int> orders{20, 50, 100, 200};
    std::vector<double> mean_error;
    for (int m : orders) {
        double sum = 0.0;
        for (int n : kPilotLengths) {
            for (double g : kGammas) {
                const TheoryParams p{n, g * n, m};
                sum += std::fabs(p_c_glq(p) - p_c_exact(p));
            }
        }
        mean_error.push_back(sum / (kPilotLengths.size() * kGammas.size()));
    }
    for (std::size_t i = 1; i < mean_error.size(); ++i) {
        INFO("M=" << orders[i] << " mean error " << mean_error[i] << " vs " << mean_error[i - 1]);
        CHECK(mean_error[i] <= mean_error[i - 1]);
    }
}

TEST_CASE("theory KDR is nonincreasing in the step on the grid") {
    for (int n : kPilotLengths) {
        double last_exact = 2.0;
        for (double g : kGammas) {
            const double k = 1.0 - p_c_exact(TheoryParams{n, g * n, 100});
            CHECK(k <= last_exact);
            last_exact = k;
        }
    }
}

TEST_CASE("hierarchical sampler reproduces the exact key-match probability") {
    // N = 10, gamma = 0.5 has the largest match probability on the grid
    const int n = 10;
    const double step = 5.0;
    const double exact = p_c_exact(TheoryParams{n, step, 100});
    RandomStream rng(41);
    const int draws = 1000000;
    long long matches = 0;
    double sum_first = 0.0, sum_second = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto [a, b] = draw_hierarchical_pair(n, rng);
        matches += std::floor(a / step) == std::floor(b / step);
        sum_first += a;
        sum_second += b;
    }
    const double rate = static_cast<double>(matches) / draws;
    const double se = std::sqrt(exact * (1.0 - exact) / draws);
    CHECK(std::fabs(rate - exact) <= 3.0 * se);
    // marginal means N and 3N
    CHECK(sum_first / draws == doctest::Approx(10.0).epsilon(0.01));
    CHECK(sum_second / draws == doctest::Approx(30.0).epsilon(0.01));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(p_c_glq(TheoryParams{0, 1.0, 100}), DomainError);
    CHECK_THROWS_AS(p_c_exact(TheoryParams{10, 0.0, 100}), DomainError);
    CHECK_THROWS_AS(p_c_glq(TheoryParams{10, 1.0, 0}), DomainError);
}
