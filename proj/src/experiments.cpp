#include "dopkey/experiments.hpp"

#include "dopkey/error.hpp"
#include "dopkey/estimator.hpp"
#include "dopkey/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace dopkey {

namespace {

// stream tags
constexpr std::uint64_t kPilots = 1;
constexpr std::uint64_t kLinkNoise = 2;
constexpr std::uint64_t kSpectrum = 3;
constexpr std::uint64_t kHierarchy = 4;

enum NodeId : std::uint64_t { kAlice = 0, kBob = 1 };
enum LinkId : std::uint64_t { kAB = 0, kBA = 1, kAE = 2, kBE = 3 };

} // namespace

std::string to_string(Backend b) { return b == Backend::waveform ? "waveform" : "generative"; }

Backend backend_from_string(const std::string& name) {
    if (name == "waveform") return Backend::waveform;
    if (name == "generative") return Backend::generative;
    throw UsageError("unknown backend '" + name + "' (expected waveform or generative)");
}

std::vector<std::string> Scenario::violations() const {
    auto out = system.violations();
    if (durations < 1) out.push_back("durations D must be at least 1");
    for (const auto* link : {&link_ab, &link_ae, &link_be}) {
        if (!(link->distance > 0.0) || !std::isfinite(link->distance)) {
            out.push_back("link distances must be positive");
            break;
        }
    }
    for (const auto* link : {&link_ab, &link_ae, &link_be}) {
        if (!std::isfinite(link->doppler_shift)) {
            out.push_back("Doppler shifts must be finite");
            break;
        }
    }
    if (threads < 0) out.push_back("threads must be >= 0");
    return out;
}

void Scenario::validate() const {
    const auto problems = violations();
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw DomainError(msg.str());
}

Scenario Scenario::with_pilot_length(int n) const {
    Scenario copy = *this;
    copy.system.pilot_length = n;
    return copy;
}

void parallel_for(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    constexpr std::uint64_t kChunk = 256;
    auto work = [&] {
        try {
            for (;;) {
                if (failed.load()) return;
                const std::uint64_t begin = next.fetch_add(kChunk);
                if (begin >= count) return;
                const std::uint64_t end = std::min(count, begin + kChunk);
                for (std::uint64_t i = begin; i < end; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

DurationEstimates observe_duration(const Scenario& scn, std::uint64_t duration_index) {
    const SystemConfig& cfg = scn.system;
    const auto n = static_cast<std::uint64_t>(cfg.pilot_length);
    auto stream = [&](std::uint64_t tag, std::uint64_t id) {
        return RandomStream::derive(scn.seed, {tag, n, duration_index, id});
    };
    DurationEstimates out;
    if (scn.backend == Backend::generative) {
        auto draw = [&](const LinkConfig& link, LinkId id) {
            auto rng = stream(kSpectrum, id);
            return estimate_npsds(draw_spectrum_generative(theoretical_npsds(link, cfg), cfg, rng));
        };
        out.at_bob = draw(scn.link_ab, kAB);
        out.at_alice = draw(scn.link_ba(), kBA);
        out.at_eve_from_a = draw(scn.link_ae, kAE);
        out.at_eve_from_b = draw(scn.link_be, kBE);
        return out;
    }
    auto pilots_rng_a = stream(kPilots, kAlice);
    auto pilots_rng_b = stream(kPilots, kBob);
    const auto pilots_a = generate_pilots(cfg, pilots_rng_a);
    const auto pilots_b = generate_pilots(cfg, pilots_rng_b);
    auto receive = [&](const ComplexSequence& pilots, const LinkConfig& link, LinkId id) {
        auto rng = stream(kLinkNoise, id);
        const auto burst = apply_link(pilots, link, cfg, rng);
        return estimate_npsds(power_spectrum(burst, cfg.bin_spacing()));
    };
    out.at_bob = receive(pilots_a, scn.link_ab, kAB);
    out.at_alice = receive(pilots_b, scn.link_ba(), kBA);
    out.at_eve_from_a = receive(pilots_a, scn.link_ae, kAE);
    out.at_eve_from_b = receive(pilots_b, scn.link_be, kBE);
    return out;
}

DurationRecord run_key_duration(const Scenario& scn, std::uint64_t duration_index, double delta) {
    if (!(delta > 0.0)) throw DomainError("run_key_duration: step must be positive");
    const auto est = observe_duration(scn, duration_index);
    const double theta_ab = theoretical_npsds(scn.link_ab, scn.system);
    const int n = scn.system.pilot_length;
    auto key = [&](double raw) { return quantize(normalize(raw, theta_ab, n).normalized, delta); };
    return {key(est.at_bob), key(est.at_alice), key(est.at_eve_from_a), key(est.at_eve_from_b), est};
}

namespace {

std::vector<DurationEstimates> observe_all(const Scenario& scn) {
    std::vector<DurationEstimates> out(scn.durations);
    parallel_for(scn.durations, scn.threads, [&](std::uint64_t d) { out[d] = observe_duration(scn, d); });
    return out;
}

template <class Field>
std::vector<double> column(const std::vector<DurationEstimates>& rows, Field field) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.*field);
    return out;
}

} // namespace

Fig4Result run_fig4(const Scenario& scn, const std::vector<int>& pilot_lengths, int bin_count) {
    scn.validate();
    if (bin_count < 1) throw DomainError("run_fig4: bin count must be >= 1");
    Fig4Result result;
    for (int n : pilot_lengths) {
        const Scenario s = scn.with_pilot_length(n);
        s.validate();
        const auto rows = observe_all(s);
        const std::vector<std::pair<std::string, std::vector<double>>> nodes{
            {"alice", column(rows, &DurationEstimates::at_alice)},
            {"bob", column(rows, &DurationEstimates::at_bob)},
            {"eve_from_a", column(rows, &DurationEstimates::at_eve_from_a)},
            {"eve_from_b", column(rows, &DurationEstimates::at_eve_from_b)}};
        double lo = nodes[0].second.front(), hi = lo;
        for (const auto& [name, v] : nodes) {
            const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
            lo = std::min(lo, *mn);
            hi = std::max(hi, *mx);
        }
        if (hi <= lo) hi = lo + 1.0;
        const double width = (hi - lo) / bin_count;
        for (const auto& [name, v] : nodes) {
            std::vector<std::uint64_t> counts(static_cast<std::size_t>(bin_count), 0);
            for (double x : v) {
                auto b = static_cast<std::size_t>((x - lo) / width);
                counts[std::min(b, counts.size() - 1)] += 1;
            }
            for (int b = 0; b < bin_count; ++b) {
                result.bins.push_back({n, name, lo + b * width, b + 1 == bin_count ? hi : lo + (b + 1) * width,
                                       static_cast<double>(counts[b]) / static_cast<double>(v.size())});
            }
        }
        Fig4Summary summary;
        summary.pilot_length = n;
        summary.theta_ab = theoretical_npsds(s.link_ab, s.system);
        if (rows.size() >= 2) {
            summary.var_alice = sample_variance(nodes[0].second);
            summary.var_bob = sample_variance(nodes[1].second);
            summary.var_eve_from_a = sample_variance(nodes[2].second);
            summary.var_eve_from_b = sample_variance(nodes[3].second);
        }
        summary.ks_alice_bob = ks_two_sample(nodes[0].second, nodes[1].second);
        result.summary.push_back(summary);
    }
    return result;
}

std::vector<Fig5Row> run_fig5(const Scenario& scn, const std::vector<int>& pilot_lengths) {
    scn.validate();
    std::vector<Fig5Row> out;
    for (int n : pilot_lengths) {
        const Scenario s = scn.with_pilot_length(n);
        s.validate();
        const auto rows = observe_all(s);
        Fig5Row row;
        row.pilot_length = n;
        row.theta_ab = theoretical_npsds(s.link_ab, s.system);
        row.theta_ae = theoretical_npsds(s.link_ae, s.system);
        row.theta_be = theoretical_npsds(s.link_be, s.system);
        auto stat = [&](auto field, double& mse_out, double& se_out) {
            const auto v = column(rows, field);
            mse_out = mse(v, row.theta_ab);
            if (v.size() < 2) return;
            std::vector<double> sq;
            sq.reserve(v.size());
            for (double x : v) sq.push_back((x - row.theta_ab) * (x - row.theta_ab));
            se_out = std::sqrt(sample_variance(sq) / static_cast<double>(v.size()));
        };
        stat(&DurationEstimates::at_bob, row.mse_ab, row.se_ab);
        stat(&DurationEstimates::at_alice, row.mse_ba, row.se_ba);
        stat(&DurationEstimates::at_eve_from_a, row.mse_ae, row.se_ae);
        stat(&DurationEstimates::at_eve_from_b, row.mse_be, row.se_be);
        out.push_back(row);
    }
    return out;
}

std::vector<KdrCurvePoint> run_fig6(const Scenario& scn, const std::vector<int>& pilot_lengths,
                                    const std::vector<double>& gammas, int quadrature_order) {
    scn.validate();
    for (double g : gammas) {
        if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("run_fig6: gamma values must be positive");
    }
    std::vector<KdrCurvePoint> out;
    for (int n : pilot_lengths) {
        if (n < 1) throw DomainError("run_fig6: pilot lengths must be >= 1");
        // per-duration mismatch bitmask over the gamma grid, reduced in index order
        std::vector<std::vector<char>> mismatch(scn.durations, std::vector<char>(gammas.size(), 0));
        parallel_for(scn.durations, scn.threads, [&](std::uint64_t d) {
            auto rng = RandomStream::derive(scn.seed, {kHierarchy, static_cast<std::uint64_t>(n), d});
            const auto [first, second] = draw_hierarchical_pair(n, rng);
            for (std::size_t g = 0; g < gammas.size(); ++g) {
                const double step = gammas[g] * n;
                mismatch[d][g] = static_cast<char>(key_match(quantize(first, step), quantize(second, step)));
            }
        });
        for (std::size_t g = 0; g < gammas.size(); ++g) {
            std::uint64_t count = 0;
            for (const auto& row : mismatch) count += static_cast<std::uint64_t>(row[g]);
            const auto sim = kdr_from_counts(count, scn.durations);
            KdrCurvePoint p;
            p.pilot_length = n;
            p.gamma = gammas[g];
            p.kdr_theory = kdr_theory(TheoryParams{n, gammas[g] * n, quadrature_order});
            p.kdr_sim = sim.rate;
            p.std_error = sim.std_error;
            p.durations = scn.durations;
            p.quadrature_order = quadrature_order;
            out.push_back(p);
        }
    }
    return out;
}

std::vector<KeyAgreementPoint> run_key_agreement(const Scenario& scn, const std::vector<double>& gammas) {
    scn.validate();
    const int n = scn.system.pilot_length;
    const auto rows = observe_all(scn);
    const double theta_ab = theoretical_npsds(scn.link_ab, scn.system);
    std::vector<KeyAgreementPoint> out;
    for (double g : gammas) {
        if (!(g > 0.0)) throw DomainError("run_key_agreement: gamma values must be positive");
        const double step = g * n;
        auto key = [&](double raw) { return quantize(normalize(raw, theta_ab, n).normalized, step); };
        std::uint64_t ab = 0, b_ea = 0, a_eb = 0;
        for (const auto& r : rows) {
            const auto qa = key(r.at_alice), qb = key(r.at_bob);
            ab += key_match(qa, qb);
            b_ea += key_match(qb, key(r.at_eve_from_a));
            a_eb += key_match(qa, key(r.at_eve_from_b));
        }
        out.push_back({n, g, kdr_from_counts(ab, rows.size()), kdr_from_counts(b_ea, rows.size()),
                       kdr_from_counts(a_eb, rows.size())});
    }
    return out;
}

} // namespace dopkey
