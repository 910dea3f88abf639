#pragma once

#include <functional>
#include <span>

namespace dopkey {

struct KsResult {
    double statistic = 0.0;  // sup |F_1 - F_2|
    double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q_KS(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Sample variance with denominator n - 1.
double sample_variance(std::span<const double> values);

} // namespace dopkey
