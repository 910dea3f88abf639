#pragma once

// Special functions used by the key-disagreement analysis. Everything here is
// a pure function of its arguments and safe to call from any thread.

namespace dopkey::specfun {

/// Natural log of the gamma function for x > 0.
double ln_gamma(double x);

/// Modified Bessel function of the first kind I_nu(x), nu >= 0, x >= 0.
///
/// Power series below x = 20, uniform (Debye) asymptotic expansion above.
/// Overflows to +inf for large x; use bessel_i_scaled there.
double bessel_i(double nu, double x);

/// exp(-x) * I_nu(x). Finite for all x >= 0.
double bessel_i_scaled(double nu, double x);

/// Regularized lower incomplete gamma P(s, x) for s > 0, x >= 0.
double regularized_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), computed
/// without cancellation in the upper tail.
double regularized_gamma_upper(double s, double x);

/// Generalized Marcum Q function Q_N(a, b).
///
/// Survival function of a noncentral chi-square variable with 2N degrees of
/// freedom and noncentrality a^2, evaluated at b^2. Computed as a
/// Poisson(a^2/2)-weighted sum of regularized upper incomplete gammas; the
/// sum stops once the unvisited Poisson mass drops below 1e-14.
double marcum_q(int order, double a, double b);

/// Generalized Laguerre polynomial L_n^{(a)}(x) via the three-term recurrence.
double laguerre(int n, double a, double x);

} // namespace dopkey::specfun
