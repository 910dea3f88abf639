#pragma once

#include "dopkey/keygen.hpp"
#include "dopkey/signal.hpp"
#include "dopkey/stats.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dopkey {

enum class Backend { waveform, generative };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& name);

/// Three-node setup. Reverse directions are derived with negated Doppler shifts.
struct Scenario {
    SystemConfig system;
    LinkConfig link_ab{2e8, 1.0};
    LinkConfig link_ae{5e8, 1.0};
    LinkConfig link_be{4e8, 1.0};
    std::uint64_t durations = 10000;  // D
    std::uint64_t seed = 1;
    Backend backend = Backend::generative;
    int threads = 0;  // 0: hardware concurrency

    LinkConfig link_ba() const { return link_ab.reciprocal(); }
    LinkConfig link_ea() const { return link_ae.reciprocal(); }
    LinkConfig link_eb() const { return link_be.reciprocal(); }

    std::vector<std::string> violations() const;
    void validate() const;
    Scenario with_pilot_length(int n) const;
};

/// Raw NPSDS estimates from one pilot exchange.
struct DurationEstimates {
    double at_bob = 0.0;         // Alice -> Bob, link ab
    double at_alice = 0.0;       // Bob -> Alice, link ba
    double at_eve_from_a = 0.0;  // Alice -> Eve, link ae
    double at_eve_from_b = 0.0;  // Bob -> Eve, link be
};

struct DurationRecord {
    KeyIndex q_b, q_a, q_e_from_a, q_e_from_b;
    DurationEstimates estimates;
};

/// Estimates of one TDD round; depends only on (seed, N, duration_index).
DurationEstimates observe_duration(const Scenario& scn, std::uint64_t duration_index);

/// One TDD round quantized with step delta on the normalized scale eta * estimate,
/// eta = N / Theta_ab for every receiver.
DurationRecord run_key_duration(const Scenario& scn, std::uint64_t duration_index, double delta);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions propagate.
void parallel_for(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body);

struct HistogramBin {
    int pilot_length = 0;
    std::string node;
    double lo = 0.0, hi = 0.0, mass = 0.0;
};

struct Fig4Summary {
    int pilot_length = 0;
    double theta_ab = 0.0;
    double var_alice = 0.0, var_bob = 0.0, var_eve_from_a = 0.0, var_eve_from_b = 0.0;
    KsResult ks_alice_bob;
};

struct Fig4Result {
    std::vector<HistogramBin> bins;
    std::vector<Fig4Summary> summary;
};

/// Normalized histograms of the raw estimates at all four receivers, over a
/// common range per N.
Fig4Result run_fig4(const Scenario& scn, const std::vector<int>& pilot_lengths, int bin_count = 50);

struct Fig5Row {
    int pilot_length = 0;
    double theta_ab = 0.0, theta_ae = 0.0, theta_be = 0.0;
    double mse_ab = 0.0, mse_ba = 0.0, mse_ae = 0.0, mse_be = 0.0;
    // standard errors of the MSE values: sd of the squared errors / sqrt(D)
    double se_ab = 0.0, se_ba = 0.0, se_ae = 0.0, se_be = 0.0;
};

/// MSE per link against Theta_ab, the value every party tries to match.
std::vector<Fig5Row> run_fig5(const Scenario& scn, const std::vector<int>& pilot_lengths);

struct KdrCurvePoint {
    int pilot_length = 0;
    double gamma = 0.0;
    double kdr_theory = 0.0;
    double kdr_sim = 0.0;
    double std_error = 0.0;
    std::uint64_t durations = 0;
    int quadrature_order = 0;
};

/// Theory KDR via the Gauss-Laguerre closed form and simulated KDR from the
/// hierarchical sampler at Delta = gamma N. One pair per duration is shared
/// across the gamma grid.
std::vector<KdrCurvePoint> run_fig6(const Scenario& scn, const std::vector<int>& pilot_lengths,
                                    const std::vector<double>& gammas, int quadrature_order);

struct KeyAgreementPoint {
    int pilot_length = 0;
    double gamma = 0.0;
    KdrEstimate alice_bob, bob_eve_from_a, alice_eve_from_b;
};

/// Empirical KDR between all key pairs through run_key_duration at the scenario's N.
std::vector<KeyAgreementPoint> run_key_agreement(const Scenario& scn, const std::vector<double>& gammas);

} // namespace dopkey
