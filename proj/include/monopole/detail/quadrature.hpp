#pragma once

// Gauss-Legendre rules plus adaptive composite integration for complex-valued
// integrands on real segments.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "monopole/matrix.hpp"

namespace monopole::detail {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

// Nodes by Newton iteration on Legendre polynomials.
inline const GaussRule& gauss_legendre(int n) {
    static std::vector<GaussRule> cache(129);
    GaussRule& rule = cache.at(size_t(n));
    if (!rule.x.empty()) return rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.x[n - 1 - i] = x;
        rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

template <typename F>
cplx gauss_segment(const F& f, double a, double b, int n = 32) {
    const GaussRule& g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx s = 0;
    for (int i = 0; i < n; ++i) s += g.w[i] * f(mid + half * g.x[i]);
    return s * half;
}

// Adaptive bisection with an embedded error estimate (n vs 2 half panels).
template <typename F>
cplx gauss_adaptive(const F& f, double a, double b, double tol, int depth = 0) {
    cplx whole = gauss_segment(f, a, b, 24);
    cplx left = gauss_segment(f, a, 0.5 * (a + b), 24);
    cplx right = gauss_segment(f, 0.5 * (a + b), b, 24);
    if (std::abs(whole - left - right) <= tol || depth > 24) return left + right;
    return gauss_adaptive(f, a, 0.5 * (a + b), 0.5 * tol, depth + 1) +
           gauss_adaptive(f, 0.5 * (a + b), b, 0.5 * tol, depth + 1);
}

}  // namespace monopole::detail
