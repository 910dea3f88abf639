#include "dopkey/signal.hpp"

#include "dopkey/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dopkey {

std::vector<std::string> SystemConfig::violations() const {
    std::vector<std::string> out;
    auto require = [&out](bool ok, const std::string& what) {
        if (!ok) out.push_back(what);
    };
    require(carrier_freq > 0.0 && std::isfinite(carrier_freq), "carrier frequency must be positive");
    require(symbol_period > 0.0 && std::isfinite(symbol_period), "symbol period T must be positive");
    require(symbol_energy > 0.0 && std::isfinite(symbol_energy), "symbol energy E_s must be positive");
    require(noise_variance >= 0.0 && std::isfinite(noise_variance), "noise variance must be non-negative");
    require(std::isfinite(path_loss_exponent), "path loss exponent must be finite");
    require(pilot_length >= 1, "pilot length N must be at least 1");
    return out;
}

void SystemConfig::validate() const {
    const auto problems = violations();
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid system configuration:";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw DomainError(msg.str());
}

double LinkConfig::gain(double path_loss_exponent) const {
    if (!(distance > 0.0)) throw DomainError("link distance must be positive");
    return 1.0 / std::pow(distance, path_loss_exponent);
}

LinkConfig LinkConfig::from_relative_velocity(double velocity, double carrier_freq, double distance) {
    return {velocity * carrier_freq / kSpeedOfLight, distance};
}

ComplexSequence generate_pilots(const SystemConfig& cfg, RandomStream& rng) {
    if (cfg.modulation != Modulation::bpsk) throw UsageError("generate_pilots: only BPSK is supported");
    const double amplitude = std::sqrt(cfg.symbol_energy);
    ComplexSequence pilots(static_cast<std::size_t>(cfg.pilot_length));
    for (auto& p : pilots) p = rng.fair_coin() ? amplitude : -amplitude;
    return pilots;
}

ComplexSequence apply_link(std::span<const std::complex<double>> pilots, const LinkConfig& link,
                           const SystemConfig& cfg, RandomStream& rng) {
    if (pilots.size() != static_cast<std::size_t>(cfg.pilot_length)) {
        throw DomainError("apply_link: burst length differs from the configured pilot length");
    }
    const double zeta = link.gain(cfg.path_loss_exponent);
    const double noise_std = std::sqrt(cfg.noise_variance / 2.0);
    ComplexSequence out(pilots.size());
    for (std::size_t n = 0; n < pilots.size(); ++n) {
        // phase reduced modulo one cycle before scaling by 2 pi
        const double cycles = link.doppler_shift * cfg.symbol_period * static_cast<double>(n + 1);
        const double phase = 2.0 * std::numbers::pi * (cycles - std::round(cycles));
        std::complex<double> y = zeta * pilots[n] * std::complex<double>(std::cos(phase), std::sin(phase));
        if (cfg.noise_variance > 0.0) {
            const double re = rng.normal(0.0, noise_std);
            const double im = rng.normal(0.0, noise_std);
            y += std::complex<double>(re, im);
        }
        out[n] = y;
    }
    return out;
}

SpectrumSamples power_spectrum(std::span<const std::complex<double>> burst, double bin_spacing) {
    const std::size_t n = burst.size();
    SpectrumSamples out;
    out.bin_spacing = bin_spacing;
    out.values.resize(n);
    if (n == 0) return out;
    std::vector<std::complex<double>> twiddle(n);
    for (std::size_t m = 0; m < n; ++m) {
        twiddle[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) acc += burst[t] * twiddle[(k * t) % n];
        out.values[k] = std::norm(acc) * scale;
    }
    return out;
}

double nominal_psd_bpsk(double freq, const SystemConfig& cfg) {
    const double u = std::fabs(freq * cfg.symbol_period);
    const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
    return cfg.symbol_energy * cfg.symbol_period * sinc * sinc;
}

double subbin_offset(double doppler_shift, double bin_spacing) {
    if (!(bin_spacing > 0.0)) throw DomainError("subbin_offset: bin spacing must be positive");
    const double bins = doppler_shift / bin_spacing;
    return (bins - std::round(bins)) * bin_spacing;
}

double theoretical_npsds(const LinkConfig& link, const SystemConfig& cfg) {
    // omega / df = omega N T; forming the product avoids the rounding in 1 / (N T)
    const double frame = static_cast<double>(cfg.pilot_length) * cfg.symbol_period;
    const double bins = std::fabs(link.doppler_shift) * frame;
    const double offset = std::fabs(bins - std::round(bins)) / frame;
    const double zeta = link.gain(cfg.path_loss_exponent);
    return zeta * zeta * nominal_psd_bpsk(offset, cfg) + cfg.noise_variance;
}

SpectrumSamples draw_spectrum_generative(double theta, const SystemConfig& cfg, RandomStream& rng) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw DomainError("draw_spectrum_generative: theta must be positive");
    }
    std::exponential_distribution<double> exponential(1.0 / theta);
    SpectrumSamples out;
    out.bin_spacing = cfg.bin_spacing();
    out.values.resize(static_cast<std::size_t>(cfg.pilot_length));
    for (auto& v : out.values) v = exponential(rng.engine());
    return out;
}

} // namespace dopkey
