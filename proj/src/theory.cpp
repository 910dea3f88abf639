#include "dopkey/theory.hpp"

#include "dopkey/error.hpp"
#include "dopkey/quadrature.hpp"
#include "dopkey/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dopkey {

using specfun::integrate_adaptive;
using specfun::ln_gamma;
using specfun::marcum_q;

void TheoryParams::validate() const {
    std::ostringstream msg;
    if (pilot_length < 1) msg << " N must be >= 1;";
    if (!(step > 0.0) || !std::isfinite(step)) msg << " step must be positive;";
    if (quadrature_order < 1) msg << " quadrature order must be >= 1;";
    if (!msg.str().empty()) throw DomainError("invalid theory parameters:" + msg.str());
}

double noncentral_chi2_pdf(int dof, double lambda, double x) {
    if (dof < 2 || dof % 2 != 0) throw DomainError("noncentral_chi2_pdf: dof must be even and >= 2");
    if (!(lambda >= 0.0) || !(x >= 0.0)) throw DomainError("noncentral_chi2_pdf: lambda and x must be >= 0");
    const double nu = dof / 2.0 - 1.0;
    if (x == 0.0) {
        if (nu > 0.0) return 0.0;
        return 0.5 * std::exp(-0.5 * lambda);
    }
    if (lambda == 0.0) {
        return std::exp(nu * std::log(x) - 0.5 * x - (nu + 1.0) * std::log(2.0) - ln_gamma(nu + 1.0));
    }
    const double z = std::sqrt(lambda * x);
    const double scaled = specfun::bessel_i_scaled(nu, z);
    if (scaled == 0.0) return 0.0;
    // e^{-(x+lambda)/2} e^{z} = e^{-(sqrt x - sqrt lambda)^2 / 2}
    const double d = std::sqrt(x) - std::sqrt(lambda);
    return 0.5 * std::exp(-0.5 * d * d + 0.5 * nu * std::log(x / lambda) + std::log(scaled));
}

double p_l_given_theta(double theta, std::uint64_t l, const TheoryParams& params) {
    params.validate();
    if (!(theta >= 0.0)) throw DomainError("p_l_given_theta: theta must be >= 0");
    const double a = std::sqrt(theta);
    const double lo = static_cast<double>(l) * params.step;
    const double hi = static_cast<double>(l + 1) * params.step;
    const double q_lo = marcum_q(params.pilot_length, a, std::sqrt(lo));
    const double q_hi = std::isfinite(hi) ? marcum_q(params.pilot_length, a, std::sqrt(hi)) : 0.0;
    return std::clamp(q_lo - q_hi, 0.0, 1.0);
}

double gamma_pdf_shape_n(double x, int n) {
    if (n < 1) throw DomainError("gamma_pdf_shape_n: N must be >= 1");
    if (!(x >= 0.0)) throw DomainError("gamma_pdf_shape_n: x must be >= 0");
    if (x == 0.0) return n == 1 ? 1.0 : 0.0;
    return std::exp((n - 1.0) * std::log(x) - x - ln_gamma(n));
}

double gamma_tail_bound(int n, double tail) {
    if (n < 1 || !(tail > 0.0 && tail < 1.0)) throw DomainError("gamma_tail_bound: bad arguments");
    double x = n + 1.0;
    while (specfun::regularized_gamma_upper(n, x) > tail) x *= 1.25;
    return x;
}

namespace {

std::uint64_t cell_of(double theta, double step) {
    auto l = static_cast<std::uint64_t>(std::floor(theta / step));
    while (l > 0 && static_cast<double>(l) * step > theta) --l;
    while (static_cast<double>(l + 1) * step <= theta) ++l;
    return l;
}

constexpr double kTail = 1e-16;
constexpr std::uint64_t kMaxSplitCells = 5000;

} // namespace

double p_c_exact(const TheoryParams& params) {
    params.validate();
    const int n = params.pilot_length;
    const double step = params.step;
    const double upper = gamma_tail_bound(n, kTail);
    auto integrand = [&](double theta) {
        return p_l_given_theta(theta, cell_of(theta, step), params) * gamma_pdf_shape_n(theta, n);
    };
    auto fail = [&](const NumericError& e) {
        std::ostringstream msg;
        msg << "p_c_exact(N=" << n << ", step=" << step << "): " << e.what();
        return NumericError(msg.str());
    };

    const double cells = std::ceil(upper / step);
    double total = 0.0;
    try {
        if (cells > static_cast<double>(kMaxSplitCells)) {
            // cells far narrower than the density: the integrand is nearly smooth at this scale
            total = integrate_adaptive(integrand, 0.0, upper, 1e-10, 1e-9, 200000).value;
        } else {
            const auto count = static_cast<std::uint64_t>(cells);
            const double cell_tol = 1e-11 / static_cast<double>(count);
            for (std::uint64_t l = 0; l < count; ++l) {
                const double lo = static_cast<double>(l) * step;
                const double hi = std::min(static_cast<double>(l + 1) * step, upper);
                // the cell index is fixed on the open cell; evaluate it once
                auto cell = [&, l](double theta) {
                    return p_l_given_theta(theta, l, params) * gamma_pdf_shape_n(theta, n);
                };
                total += integrate_adaptive(cell, lo, hi, cell_tol, 1e-10, 4000).value;
            }
        }
    } catch (const NumericError& e) {
        throw fail(e);
    }
    return std::clamp(total, 0.0, 1.0);
}

double p_c_glq(const TheoryParams& params) {
    params.validate();
    const int n = params.pilot_length;
    const auto rule = specfun::cached_gauss_laguerre_rule(params.quadrature_order, params.laguerre_exponent());
    const double log_norm = ln_gamma(n);
    double total = 0.0;
    for (std::size_t m = 0; m < rule->nodes().size(); ++m) {
        const double psi = rule->nodes()[m];
        const double weight = std::exp(rule->log_weights()[m] - log_norm);
        if (weight == 0.0) continue;
        total += weight * p_l_given_theta(psi, cell_of(psi, params.step), params);
    }
    return std::clamp(total, 0.0, 1.0);
}

double kdr_theory(const TheoryParams& params) { return 1.0 - p_c_glq(params); }

std::pair<double, double> draw_hierarchical_pair(int n, RandomStream& rng) {
    if (n < 1) throw DomainError("draw_hierarchical_pair: N must be >= 1");
    auto& engine = rng.engine();
    const double first = std::gamma_distribution<double>(n, 1.0)(engine);
    const auto k = std::poisson_distribution<long long>(0.5 * first)(engine);
    const double second = 2.0 * std::gamma_distribution<double>(static_cast<double>(n + k), 1.0)(engine);
    return {first, second};
}

} // namespace dopkey
