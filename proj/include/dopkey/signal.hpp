#pragma once

#include "dopkey/random.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace dopkey {

enum class Modulation { bpsk };

/// Link-budget and pilot parameters shared by every node.
struct SystemConfig {
    double carrier_freq = 1e9;       // f_0 [Hz]
    double symbol_period = 1.0;      // T [s]
    double symbol_energy = 10.0;     // E_s, linear
    double noise_variance = 1.2589254117941673;  // sigma^2, linear (1 dB)
    double path_loss_exponent = 2.0;
    int pilot_length = 20;           // N
    Modulation modulation = Modulation::bpsk;

    /// Frequency sampling interval 1 / (N T).
    double bin_spacing() const { return 1.0 / (pilot_length * symbol_period); }

    /// Returns every violated invariant; empty when the config is valid.
    std::vector<std::string> violations() const;
    /// Throws DomainError listing all violations.
    void validate() const;

    SystemConfig with_pilot_length(int n) const {
        SystemConfig copy = *this;
        copy.pilot_length = n;
        return copy;
    }
};

/// One directed spacecraft link.
struct LinkConfig {
    double doppler_shift = 0.0;  // omega_jk [Hz], signed
    double distance = 1.0;       // d_jk

    /// Path-loss amplitude gain 1 / d^PL.
    double gain(double path_loss_exponent) const;

    /// The opposite direction j <- k: same distance, negated Doppler shift.
    LinkConfig reciprocal() const { return {-doppler_shift, distance}; }

    /// Doppler shift v f_0 / c for a relative velocity v [m/s].
    static LinkConfig from_relative_velocity(double velocity, double carrier_freq, double distance = 1.0);
};

inline constexpr double kSpeedOfLight = 299792458.0;

using ComplexSequence = std::vector<std::complex<double>>;

/// Power-spectrum observations S(i) = |Y(i)|^2 of one pilot burst.
struct SpectrumSamples {
    std::vector<double> values;
    double bin_spacing = 0.0;
};

/// N equiprobable BPSK pilots, each +-sqrt(E_s).
ComplexSequence generate_pilots(const SystemConfig& cfg, RandomStream& rng);

/// Received burst y(i) = zeta x(i) exp(j 2 pi omega i T) + kappa(i), i = 1..N,
/// with kappa ~ CN(0, sigma^2).
ComplexSequence apply_link(std::span<const std::complex<double>> pilots, const LinkConfig& link,
                           const SystemConfig& cfg, RandomStream& rng);

/// Orthonormal DFT followed by |.|^2, so sum S(i) = sum |y(i)|^2.
SpectrumSamples power_spectrum(std::span<const std::complex<double>> burst, double bin_spacing);

/// Nominal BPSK power spectral density E_s T sinc^2(f T) for rectangular pulses.
double nominal_psd_bpsk(double freq, const SystemConfig& cfg);

/// omega folded into one bin: omega - round(omega / df) * df, in [-df/2, df/2].
double subbin_offset(double doppler_shift, double bin_spacing);

/// Nominal power spectral density sample zeta^2 A^x(delta) + sigma^2, where
/// delta is the sub-bin Doppler offset. Even in the Doppler shift, so the two
/// directions of a reciprocal link agree bit for bit.
double theoretical_npsds(const LinkConfig& link, const SystemConfig& cfg);

/// N i.i.d. Exponential(mean theta) spectrum samples.
SpectrumSamples draw_spectrum_generative(double theta, const SystemConfig& cfg, RandomStream& rng);

} // namespace dopkey
