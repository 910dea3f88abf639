#include "dopkey/stats.hpp"

#include "dopkey/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dopkey {

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // series terms cancel; Q is 1 to double precision here
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17 * sum) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Stephens' finite-sample correction
double ks_p_value(double d, double n_eff) {
    const double root = std::sqrt(n_eff);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

} // namespace

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("ks_one_sample: no samples");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: both samples must be non-empty");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::fabs(i / nx - j / ny));
    }
    return {d, ks_p_value(d, nx * ny / (nx + ny))};
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw DomainError("sample_variance: need at least two values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

} // namespace dopkey
