#include "dopkey/estimator.hpp"

#include "dopkey/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dopkey {

double estimate_npsds(std::span<const double> samples) {
    if (samples.empty()) throw DomainError("estimate_npsds: no spectrum samples");
    // summing in sorted order makes the result independent of sample order
    std::vector<double> sorted(samples.begin(), samples.end());
    for (double s : sorted) {
        if (!(s >= 0.0)) throw DomainError("estimate_npsds: spectrum samples must be non-negative");
    }
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double s : sorted) sum += s;
    return sum / static_cast<double>(sorted.size());
}

NpsdsEstimate normalize(double raw, double theta_true, int pilot_length) {
    if (!(theta_true > 0.0) || !std::isfinite(theta_true)) throw DomainError("normalize: theta must be positive");
    if (pilot_length < 1) throw DomainError("normalize: pilot length must be at least 1");
    const double eta = pilot_length / theta_true;
    return {raw, eta * raw, eta};
}

double mse(std::span<const double> estimates, double theta_true) {
    if (estimates.empty()) throw DomainError("mse: no estimates");
    double sum = 0.0;
    for (double e : estimates) sum += (e - theta_true) * (e - theta_true);
    return sum / static_cast<double>(estimates.size());
}

} // namespace dopkey
