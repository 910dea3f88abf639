#pragma once

#include "dopkey/random.hpp"

#include <cstdint>
#include <utility>

namespace dopkey {

/// Parameters of the analytic key-agreement model.
struct TheoryParams {
    int pilot_length = 10;     // N
    double step = 1.0;         // Delta, on the normalized scale
    int quadrature_order = 100;  // M

    /// Throws DomainError unless N >= 1, Delta > 0 and M >= 1.
    void validate() const;
    int degrees_of_freedom() const { return 2 * pilot_length; }
    double laguerre_exponent() const { return pilot_length - 1.0; }
};

/// Noncentral chi-square density with k degrees of freedom (k >= 2 even) and
/// noncentrality lambda, evaluated through the exponentially scaled Bessel function.
double noncentral_chi2_pdf(int dof, double lambda, double x);

/// Probability that the conditional 2N-dof noncentral chi-square variate with
/// noncentrality theta falls in [l Delta, (l+1) Delta).
double p_l_given_theta(double theta, std::uint64_t l, const TheoryParams& params);

/// Gamma(shape N, scale 1) density.
double gamma_pdf_shape_n(double x, int n);

/// Key-match probability by adaptive integration, split at every cell boundary.
/// Absolute error target 1e-8.
double p_c_exact(const TheoryParams& params);

/// Gauss-Laguerre approximation of the key-match probability of order M,
/// with the cell index evaluated per node.
double p_c_glq(const TheoryParams& params);

/// 1 - p_c_glq.
double kdr_theory(const TheoryParams& params);

/// Smallest x on a doubling grid with Gamma(N,1) upper tail below tail.
double gamma_tail_bound(int n, double tail);

/// One draw of the hierarchy: first ~ Gamma(N, 1), second ~ noncentral
/// chi-square(2N, first). The second draw is a Poisson(first / 2) mixture of
/// 2 Gamma(N + K, 1) variates.
std::pair<double, double> draw_hierarchical_pair(int n, RandomStream& rng);

} // namespace dopkey
