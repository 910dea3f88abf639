#include "doctest.h"

#include "dopkey/error.hpp"
#include "dopkey/estimator.hpp"
#include "dopkey/experiments.hpp"
#include "dopkey/theory.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace dopkey;

namespace {

Scenario shipped(std::uint64_t durations) {
    Scenario s;
    s.durations = durations;
    s.seed = 2024;
    return s;
}

bool same(const DurationEstimates& a, const DurationEstimates& b) {
    return a.at_bob == b.at_bob && a.at_alice == b.at_alice && a.at_eve_from_a == b.at_eve_from_a &&
           a.at_eve_from_b == b.at_eve_from_b;
}

const std::vector<double> kGammas{0.02, 0.05, 0.1, 0.2, 0.35, 0.5};

} // namespace

TEST_CASE("reverse links negate the Doppler shift") {
    const Scenario s;
    CHECK(s.link_ba().doppler_shift == -s.link_ab.doppler_shift);
    CHECK(s.link_ea().doppler_shift == -s.link_ae.doppler_shift);
    CHECK(s.link_eb().doppler_shift == -s.link_be.doppler_shift);
    CHECK(s.violations().empty());
    Scenario bad;
    bad.durations = 0;
    bad.system.pilot_length = 0;
    bad.link_ae.distance = -1.0;
    CHECK(bad.violations().size() == 3);
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK(backend_from_string("waveform") == Backend::waveform);
    CHECK(to_string(Backend::generative) == "generative");
    CHECK_THROWS_AS(backend_from_string("fft"), UsageError);
}

TEST_CASE("one duration yields four keys and four estimates, deterministically") {
    for (Backend b : {Backend::generative, Backend::waveform}) {
        Scenario s = shipped(10);
        s.backend = b;
        const auto r1 = run_key_duration(s, 3, 2.0);
        const auto r2 = run_key_duration(s, 3, 2.0);
        CHECK(r1.q_a == r2.q_a);
        CHECK(r1.q_b == r2.q_b);
        CHECK(r1.q_e_from_a == r2.q_e_from_a);
        CHECK(r1.q_e_from_b == r2.q_e_from_b);
        CHECK(same(r1.estimates, r2.estimates));
        for (double v : {r1.estimates.at_alice, r1.estimates.at_bob, r1.estimates.at_eve_from_a,
                         r1.estimates.at_eve_from_b}) {
            CHECK(v > 0.0);
        }
        CHECK(r1.q_a.step == 2.0);
        CHECK_FALSE(same(observe_duration(s, 4), r1.estimates));
    }
}

TEST_CASE("per-duration streams do not depend on evaluation order") {
    const Scenario s = shipped(10);
    const auto first = observe_duration(s, 7);
    for (std::uint64_t d = 0; d < 7; ++d) observe_duration(s, d);
    CHECK(same(observe_duration(s, 7), first));
    Scenario other = s;
    other.seed = 2025;
    CHECK_FALSE(same(observe_duration(other, 7), first));
}

TEST_CASE("noiseless generative links with a shared Theta give equal keys when estimates share a cell") {
    Scenario s = shipped(200);
    s.system.noise_variance = 0.0;
    const double theta = theoretical_npsds(s.link_ab, s.system);
    CHECK(theta == theoretical_npsds(s.link_ba(), s.system));
    for (std::uint64_t d = 0; d < 200; ++d) {
        const auto r = run_key_duration(s, d, 4.0);
        const double ta = normalize(r.estimates.at_alice, theta, 20).normalized;
        const double tb = normalize(r.estimates.at_bob, theta, 20).normalized;
        CHECK((std::floor(ta / 4.0) == std::floor(tb / 4.0)) == (r.q_a == r.q_b));
    }
}

TEST_CASE("noiseless waveform receivers recover E_s") {
    Scenario s = shipped(5);
    s.backend = Backend::waveform;
    s.system.noise_variance = 0.0;
    const auto e = observe_duration(s, 0);
    for (double v : {e.at_alice, e.at_bob, e.at_eve_from_a, e.at_eve_from_b}) {
        CHECK(v == doctest::Approx(s.system.symbol_energy).epsilon(1e-13));
    }
}

TEST_CASE("parallel_for visits each index once and propagates errors") {
    std::vector<std::atomic<int>> hits(5000);
    parallel_for(hits.size(), 4, [&](std::uint64_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(1000, 3,
                                 [](std::uint64_t i) {
                                     if (i == 600) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("fig4 histograms and trends") {
    const auto r = run_fig4(shipped(5000), {10, 20, 50}, 40);
    REQUIRE(r.summary.size() == 3);
    REQUIRE(r.bins.size() == 3u * 4u * 40u);
    for (std::size_t start = 0; start < r.bins.size(); start += 40) {
        double total = 0.0;
        for (std::size_t b = start; b < start + 40; ++b) total += r.bins[b].mass;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(r.summary[0].var_alice > r.summary[1].var_alice);
    CHECK(r.summary[1].var_alice > r.summary[2].var_alice);
    for (const auto& s : r.summary) {
        CHECK(s.ks_alice_bob.p_value > 0.01);
        // Gamma variance Theta^2 / N
        CHECK(s.var_bob == doctest::Approx(s.theta_ab * s.theta_ab / s.pilot_length).epsilon(0.06));
    }
}

TEST_CASE("fig5 MSE follows Theta^2 / N and decreases in N") {
    const auto rows = run_fig5(shipped(10000), {2, 5, 10, 20, 50});
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        for (double m : {r.mse_ab, r.mse_ba, r.mse_ae, r.mse_be}) CHECK(m >= 0.0);
        CHECK(std::fabs(r.mse_ab - r.theta_ab * r.theta_ab / r.pilot_length) <= 4.0 * r.se_ab);
        if (i > 0) CHECK(rows[i].mse_ab + 3.0 * rows[i].se_ab < rows[i - 1].mse_ab - 3.0 * rows[i - 1].se_ab);
    }
}

TEST_CASE("fig6 simulation agrees with the exact model and is thread-count independent") {
    Scenario s = shipped(20000);
    s.threads = 1;
    const auto one = run_fig6(s, {10}, kGammas, 100);
    s.threads = 3;
    const auto three = run_fig6(s, {10}, kGammas, 100);
    REQUIRE(one.size() == kGammas.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].kdr_sim == three[i].kdr_sim);
        CHECK(one[i].kdr_theory == three[i].kdr_theory);
        CHECK(one[i].durations == 20000);
        CHECK(one[i].quadrature_order == 100);
        const double p = 1.0 - p_c_exact(TheoryParams{10, one[i].gamma * 10, 100});
        CHECK(std::fabs(one[i].kdr_sim - p) <= 3.0 * std::sqrt(p * (1.0 - p) / 20000.0));
        if (i > 0) CHECK(one[i].kdr_sim <= one[i - 1].kdr_sim);
    }
    CHECK_THROWS_AS(run_fig6(s, {10}, {0.0}, 100), DomainError);
}

TEST_SUITE("eve-divergence") {
    TEST_CASE("Eve's keys disagree with Bob's more often than Alice's do") {
        for (int n : {10, 20, 50}) {
            const auto points = run_key_agreement(shipped(20000).with_pilot_length(n), kGammas);
            for (const auto& p : points) {
                INFO("N=" << n << " gamma=" << p.gamma << " KDR(b, e<-a)=" << p.bob_eve_from_a.rate
                          << " KDR(a, b)=" << p.alice_bob.rate);
                const double se = std::hypot(p.bob_eve_from_a.std_error, p.alice_bob.std_error);
                CHECK(p.bob_eve_from_a.rate - p.alice_bob.rate > 3.0 * se);
            }
        }
    }

    TEST_CASE("Eve's MSE exceeds the legitimate MSE once Theta_ae differs from Theta_ab") {
        Scenario s = shipped(10000);
        s.system.symbol_period = 1.234e-10;  // shipped Doppler values off the bin grid
        const auto rows = run_fig5(s, {50});
        const auto& r = rows.front();
        REQUIRE(r.theta_ae != r.theta_ab);
        INFO("MSE_ae=" << r.mse_ae << " MSE_ab=" << r.mse_ab);
        CHECK(r.mse_ae > r.mse_ab);
    }
}
