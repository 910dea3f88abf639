#include "dopkey/quadrature.hpp"

#include "dopkey/error.hpp"
#include "dopkey/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>

namespace dopkey::specfun {

QuadratureRule::QuadratureRule(int order, double exponent, std::vector<double> nodes,
                               std::vector<double> log_weights)
    : order_(order), exponent_(exponent), nodes_(std::move(nodes)), log_weights_(std::move(log_weights)) {
    if (order_ < 1) throw DomainError("QuadratureRule: order must be >= 1");
    if (nodes_.size() != static_cast<std::size_t>(order_) || log_weights_.size() != nodes_.size()) {
        throw DomainError("QuadratureRule: expected " + std::to_string(order_) + " nodes and weights");
    }
    weights_.reserve(log_weights_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > 0.0) || !std::isfinite(nodes_[i])) throw NumericError("QuadratureRule: non-positive node");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw NumericError("QuadratureRule: nodes not increasing");
        if (!std::isfinite(log_weights_[i])) {
            throw NumericError("QuadratureRule: weight " + std::to_string(i) + " is not positive and finite");
        }
        weights_.push_back(std::exp(log_weights_[i]));
    }
}

double QuadratureRule::apply(const std::function<double(double)>& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
    return sum;
}

namespace {

// Orthonormal generalized Laguerre recurrence, scaled so that q_0 = 1 and every
// q_k has positive leading coefficient:
//   beta_{k+1} q_{k+1} = (x - alpha_k) q_k - beta_k q_{k-1}
//   alpha_k = 2k + 1 + a,  beta_k = sqrt(k (k + a))
struct RecurrenceValue {
    double value;       // q_M(x) * exp(-log_scale)
    double derivative;  // q_M'(x) * exp(-log_scale)
    double previous;    // q_{M-1}(x) * exp(-log_scale)
    double log_scale;
};

double alpha(int k, double a) { return 2.0 * k + 1.0 + a; }
double beta(int k, double a) { return std::sqrt(static_cast<double>(k) * (k + a)); }

RecurrenceValue evaluate_orthonormal(int order, double a, double x) {
    constexpr double kBig = 1e150;
    double q_prev = 0.0, q = 1.0;
    double d_prev = 0.0, d = 0.0;
    double log_scale = 0.0;
    for (int k = 0; k < order; ++k) {
        const double bk = beta(k, a);
        const double bk1 = beta(k + 1, a);
        const double q_next = ((x - alpha(k, a)) * q - bk * q_prev) / bk1;
        const double d_next = (q + (x - alpha(k, a)) * d - bk * d_prev) / bk1;
        q_prev = q;
        q = q_next;
        d_prev = d;
        d = d_next;
        const double magnitude = std::max({std::fabs(q), std::fabs(d), std::fabs(q_prev), std::fabs(d_prev)});
        if (magnitude > kBig) {
            q /= magnitude;
            q_prev /= magnitude;
            d /= magnitude;
            d_prev /= magnitude;
            log_scale += std::log(magnitude);
        }
    }
    return {q, d, q_prev, log_scale};
}

double upper_zero_bound(int order, double a) { return 4.0 * order + 2.0 * a + 10.0; }

} // namespace

int laguerre_zeros_below(int order, double exponent, double x) {
    // Pivots of the LDL^T factorisation of (x I - J); each negative pivot is an
    // eigenvalue of the Jacobi matrix J above x.
    int above = 0;
    double pivot = 1.0;
    for (int k = 0; k < order; ++k) {
        const double b2 = k == 0 ? 0.0 : static_cast<double>(k) * (k + exponent);
        pivot = (x - alpha(k, exponent)) - (k == 0 ? 0.0 : b2 / pivot);
        if (pivot == 0.0) pivot = -std::numeric_limits<double>::min();
        if (pivot < 0.0) ++above;
    }
    return order - above;
}

QuadratureRule gauss_laguerre_rule(int order, double exponent) {
    if (order < 1) throw DomainError("gauss_laguerre_rule: order must be >= 1");
    if (!(exponent >= 0.0) || exponent > 170.0) {
        throw DomainError("gauss_laguerre_rule: exponent must lie in [0, 170]");
    }
    const double a = exponent;
    const double upper = upper_zero_bound(order, a);
    if (laguerre_zeros_below(order, a, upper) != order) {
        throw NumericError("gauss_laguerre_rule: zero bound too small for M=" + std::to_string(order));
    }
    const double log_mass = ln_gamma(a + 1.0);
    const double log_beta_m = std::log(beta(order, a));

    std::vector<double> nodes(order), weights(order);
    double lo = 0.0;
    for (int m = 0; m < order; ++m) {
        // isolate the m-th zero: zeros_below(lo) == m, zeros_below(hi) == m + 1
        double hi = upper;
        int bisections = 0;
        while (laguerre_zeros_below(order, a, hi) != m + 1) {
            const double mid = 0.5 * (lo + hi);
            if (laguerre_zeros_below(order, a, mid) <= m) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (++bisections > 200) {
                std::ostringstream msg;
                msg << "gauss_laguerre_rule: could not isolate zero " << m << " of L_" << order << "^(" << a
                    << ") in [" << lo << ", " << hi << "]";
                throw NumericError(msg.str());
            }
        }

        // safeguarded Newton inside (lo, hi)
        const bool negative_at_lo = evaluate_orthonormal(order, a, lo).value < 0.0;
        double a_end = lo, b_end = hi;
        double x = 0.5 * (lo + hi);
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            const auto r = evaluate_orthonormal(order, a, x);
            if (r.value == 0.0) {
                converged = true;
                break;
            }
            if ((r.value < 0.0) == negative_at_lo) {
                a_end = x;
            } else {
                b_end = x;
            }
            double next = x - r.value / r.derivative;
            if (!(next > a_end && next < b_end)) next = 0.5 * (a_end + b_end);
            const double step = std::fabs(next - x);
            x = next;
            if (step <= 4.0 * std::numeric_limits<double>::epsilon() * x || b_end - a_end <= 1e-15 * x) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "gauss_laguerre_rule: Newton iteration did not converge for zero " << m << " of L_" << order
                << "^(" << a << "), last iterate " << x;
            throw NumericError(msg.str());
        }

        const auto r = evaluate_orthonormal(order, a, x);
        nodes[m] = x;
        // w = Gamma(a+1) / (beta_M q_M'(x) q_{M-1}(x)); the product is positive at a zero
        weights[m] = log_mass - log_beta_m - std::log(std::fabs(r.derivative)) - std::log(std::fabs(r.previous)) -
                     2.0 * r.log_scale;
        lo = hi;
    }
    return QuadratureRule(order, exponent, std::move(nodes), std::move(weights));
}

std::shared_ptr<const QuadratureRule> cached_gauss_laguerre_rule(int order, double exponent) {
    static std::shared_mutex mutex;
    static std::map<std::pair<int, double>, std::shared_ptr<const QuadratureRule>> cache;
    const auto key = std::make_pair(order, exponent);
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(gauss_laguerre_rule(order, exponent));
    std::unique_lock lock(mutex);
    return cache.try_emplace(key, std::move(rule)).first->second;
}

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for Kronrod nodes 1, 3, 5, 7
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod_panel(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {lo, hi, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

} // namespace

IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double abs_tol,
                                     double rel_tol, int max_intervals) {
    if (!(hi >= lo)) throw DomainError("integrate_adaptive: requires lo <= hi");
    if (hi == lo) return {};
    std::priority_queue<Panel> panels;
    const Panel first = kronrod_panel(f, lo, hi);
    panels.push(first);
    double value = first.value;
    double error = first.error;
    int count = 1;
    for (;;) {
        if (!std::isfinite(value) || !std::isfinite(error)) {
            std::ostringstream msg;
            msg << "integrate_adaptive: non-finite integrand on [" << lo << ", " << hi << "]";
            throw NumericError(msg.str());
        }
        if (error <= std::max(abs_tol, rel_tol * std::fabs(value))) break;
        if (count >= max_intervals) {
            std::ostringstream msg;
            msg << "integrate_adaptive: no convergence on [" << lo << ", " << hi << "] after " << count
                << " intervals (value " << value << ", error estimate " << error << ")";
            throw NumericError(msg.str());
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Panel left = kronrod_panel(f, worst.lo, mid);
        const Panel right = kronrod_panel(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // re-sum to shed accumulated rounding from the incremental updates
    double total = 0.0, total_error = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        total_error += panels.top().error;
        panels.pop();
    }
    return {total, total_error, count};
}

} // namespace dopkey::specfun
