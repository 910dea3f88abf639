#pragma once

#include "dopkey/signal.hpp"

#include <span>

namespace dopkey {

/// Sample-mean NPSDS estimate and its normalized form eta * raw.
struct NpsdsEstimate {
    double raw = 0.0;
    double normalized = 0.0;
    double normalizer = 0.0;  // eta = N / Theta
};

/// Maximum-likelihood NPSDS estimate: the arithmetic mean of the spectrum samples.
double estimate_npsds(std::span<const double> samples);
inline double estimate_npsds(const SpectrumSamples& s) { return estimate_npsds(s.values); }

/// Scales raw by eta = N / theta_true.
NpsdsEstimate normalize(double raw, double theta_true, int pilot_length);

/// Mean squared deviation of per-duration estimates from theta_true.
double mse(std::span<const double> estimates, double theta_true);

} // namespace dopkey
