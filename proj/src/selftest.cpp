#include "dopkey/selftest.hpp"

#include "dopkey/quadrature.hpp"
#include "dopkey/specfun.hpp"
#include "dopkey/theory.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

namespace dopkey {

namespace {

using namespace specfun;

std::string sci(double v) {
    std::ostringstream o;
    o.precision(3);
    o << std::scientific << v;
    return o.str();
}

SelftestResult check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        return {name, ok, detail};
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

} // namespace

std::vector<SelftestResult> run_selftest() {
    std::vector<SelftestResult> out;

    out.push_back(check("gauss-laguerre moments (M in {5,10,30}, a in {0,9,19,49})", [] {
        double worst = 0.0;
        for (int m : {5, 10, 30}) {
            for (double a : {0.0, 9.0, 19.0, 49.0}) {
                const auto rule = gauss_laguerre_rule(m, a);
                for (int k = 0; k <= 2 * m - 1; ++k) {
                    double ratio = 0.0;
                    for (std::size_t i = 0; i < rule.nodes().size(); ++i) {
                        ratio += std::exp(rule.log_weights()[i] + k * std::log(rule.nodes()[i]) - ln_gamma(a + k + 1.0));
                    }
                    worst = std::max(worst, std::fabs(ratio - 1.0));
                }
            }
        }
        return std::pair{worst <= 1e-9, "worst relative error " + sci(worst)};
    }));

    out.push_back(check("marcum Q_1(0,b) = exp(-b^2/2)", [] {
        double worst = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double b = 0.1 * i;
            worst = std::max(worst, std::fabs(marcum_q(1, 0.0, b) - std::exp(-0.5 * b * b)));
        }
        return std::pair{worst <= 1e-12, "worst abs error " + sci(worst)};
    }));

    out.push_back(check("marcum Q_N is a survival function in b", [] {
        bool ok = true;
        for (int n : {1, 10, 50}) {
            double last = 1.0;
            for (int i = 0; i <= 60; ++i) {
                const double q = marcum_q(n, 3.0, 0.25 * i);
                ok = ok && q >= 0.0 && q <= last + 1e-14;
                last = q;
            }
            ok = ok && marcum_q(n, 3.0, 0.0) == 1.0;
        }
        return std::pair{ok, std::string(ok ? "monotone, Q(a,0)=1" : "violated")};
    }));

    out.push_back(check("interval probabilities telescope", [] {
        double worst = 0.0;
        for (int n : {10, 20, 50}) {
            for (double theta : {1.0, 20.0, 80.0}) {
                const TheoryParams p{n, 1.3, 100};
                double sum = 0.0;
                const int last = 400;
                for (int l = 0; l <= last; ++l) sum += p_l_given_theta(theta, l, p);
                const double tail = marcum_q(n, std::sqrt(theta), std::sqrt((last + 1) * 1.3));
                worst = std::max(worst, std::fabs(sum - (1.0 - tail)));
            }
        }
        return std::pair{worst <= 1e-12, "worst abs error " + sci(worst)};
    }));

    out.push_back(check("key-match probability limits", [] {
        bool ok = true;
        for (int n : {10, 20, 50}) {
            ok = ok && p_c_exact(TheoryParams{n, 100.0 * n, 100}) >= 1.0 - 1e-4;
            ok = ok && p_c_exact(TheoryParams{n, 1e-6 * n, 100}) <= 1e-3;
            ok = ok && p_c_glq(TheoryParams{n, 100.0 * n, 100}) >= 1.0 - 1e-4;
        }
        return std::pair{ok, std::string("large-step -> 1, small-step -> 0")};
    }));

    out.push_back(check("closed form within [0,1]", [] {
        bool ok = true;
        for (int n : {1, 10, 100}) {
            for (int m : {1, 50, 200}) {
                for (double step : {1e-3, 1.0, 1e3}) {
                    const double v = p_c_glq(TheoryParams{n, step, m});
                    ok = ok && v >= 0.0 && v <= 1.0;
                }
            }
        }
        return std::pair{ok, std::string(ok ? "bounded" : "out of range")};
    }));

    out.push_back(check("closed form vs exact at M=100 (<= 1e-6)", [] {
        double worst = 0.0;
        std::string where;
        for (int n : {10, 20, 50}) {
            for (double g : {0.02, 0.05, 0.1, 0.2, 0.35, 0.5}) {
                const TheoryParams p{n, g * n, 100};
                const double err = std::fabs(p_c_glq(p) - p_c_exact(p));
                if (err > worst) {
                    worst = err;
                    std::ostringstream w;
                    w << " at N=" << n << " gamma=" << g;
                    where = w.str();
                }
            }
        }
        return std::pair{worst <= 1e-6, "worst abs error " + sci(worst) + where};
    }));

    return out;
}

int report_selftest(const std::vector<SelftestResult>& results, std::ostream& out) {
    int failures = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        failures += r.passed ? 0 : 1;
    }
    return failures;
}

} // namespace dopkey
