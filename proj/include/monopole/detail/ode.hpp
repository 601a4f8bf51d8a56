#pragma once

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for complex matrix
// ODEs, with cubic-Hermite dense output between accepted steps. Step control
// is plain PI-free error scaling; the flow integrations here are small and
// smooth away from the interval endpoints.

#include <cmath>
#include <functional>
#include <vector>

#include "monopole/errors.hpp"
#include "monopole/matrix.hpp"

namespace monopole::detail {

struct OdeSolution {
    // accepted nodes, values and derivatives for Hermite interpolation
    std::vector<double> t;
    std::vector<CMatrix> y;
    std::vector<CMatrix> dy;

    bool empty() const { return t.empty(); }
    double t_front() const { return t.front(); }
    double t_back() const { return t.back(); }

    CMatrix eval(double s) const {
        if (t.size() == 1) return y.front();
        // nodes are monotone (increasing or decreasing)
        const bool inc = t.back() > t.front();
        size_t lo = 0, hi = t.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if ((t[mid] <= s) == inc)
                lo = mid;
            else
                hi = mid;
        }
        const double h = t[hi] - t[lo];
        const double u = (s - t[lo]) / h;
        const double u2 = u * u, u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
        CMatrix out = h00 * y[lo] + (h10 * h) * dy[lo] + h01 * y[hi] + (h11 * h) * dy[hi];
        return out;
    }
};

using MatrixRhs = std::function<CMatrix(double, const CMatrix&)>;

// Integrate y' = f(t, y) from t0 to t1 (either direction). max_step also
// bounds the dense-output error: the cubic Hermite reconstruction between
// accepted nodes is O(h^4).
inline OdeSolution integrate_rk45(const MatrixRhs& f, double t0, double t1, CMatrix y0,
                                  double tol, double max_step = 1e-2,
                                  double hmin_abs = 1e-13) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeSolution sol;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    CMatrix y = std::move(y0);
    CMatrix k1 = f(t, y);
    sol.t.push_back(t);
    sol.y.push_back(y);
    sol.dy.push_back(k1);

    double h = dir * std::min(max_step, std::abs(t1 - t0));
    const double span = std::abs(t1 - t0);
    if (span == 0.0) return sol;

    int steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > 2000000) throw ConvergenceFailure("integrate_rk45: step budget exhausted");
        if (std::abs(h) < hmin_abs) throw StepSizeUnderflow("integrate_rk45");
        if (dir * (t + h - t1) > 0) h = t1 - t;

        CMatrix k2 = f(t + c2 * h, y + (h * a21) * k1);
        CMatrix k3 = f(t + c3 * h, y + (h * a31) * k1 + (h * a32) * k2);
        CMatrix k4 = f(t + c4 * h, y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3);
        CMatrix k5 = f(t + c5 * h,
                       y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4);
        CMatrix k6 = f(t + h, y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 +
                                  (h * a64) * k4 + (h * a65) * k5);
        CMatrix y5 = y + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 +
                     (h * b6) * k6;
        CMatrix k7 = f(t + h, y5);
        CMatrix err = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 +
                      (h * e6) * k6 + (h * e7) * k7;

        const double scale = std::max(1.0, std::max(y.max_abs(), y5.max_abs()));
        const double errnorm = err.max_abs() / (tol * scale);
        if (errnorm <= 1.0) {
            t += h;
            y = std::move(y5);
            k1 = std::move(k7);  // FSAL
            sol.t.push_back(t);
            sol.y.push_back(y);
            sol.dy.push_back(k1);
        }
        const double fac = (errnorm > 0) ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
        if (std::abs(h) > max_step) h = dir * max_step;
    }
    return sol;
}

}  // namespace monopole::detail
