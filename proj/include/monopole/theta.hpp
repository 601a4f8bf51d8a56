#pragma once

// Genus-g Riemann theta function
//
//   theta(w | tau) = sum_{k in Z^g} exp( i pi k^T tau k + 2 i pi w^T k )
//
// evaluated by truncating the lattice sum to the ellipsoid
// (k - k0)^T Im(tau) (k - k0) <= R^2, where k0 recenters the dominant terms
// and R comes from a Gaussian tail bound for the requested eps. Characteristic
// evaluation goes through the argument-shift identity rather than a second
// kernel.

#include <array>
#include <cmath>
#include <vector>

#include "monopole/detail/eigen_bridge.hpp"
#include "monopole/errors.hpp"
#include "monopole/matrix.hpp"

namespace monopole {

struct PeriodMatrix {
    int g = 0;
    CMatrix tau;  // g x g

    // invariants: tau symmetric to 1e-10, Im tau positive definite
    void validate() const {
        if (tau.rows() != g || tau.cols() != g) throw SchemaError("PeriodMatrix: shape");
        double asym = 0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) asym = std::max(asym, std::abs(tau(i, j) - tau(j, i)));
        if (asym > 1e-10) throw SchemaError("PeriodMatrix: tau not symmetric");
        if (g > 0 && smallest_im_eigenvalue() <= 0)
            throw SchemaError("PeriodMatrix: Im tau not positive definite");
    }

    double smallest_im_eigenvalue() const {
        if (g == 0) return 1.0;
        CMatrix y(g, g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) y(i, j) = tau(i, j).imag();
        auto eig = detail::hermitian_eig(y);
        return eig.values.front();
    }
};

struct ThetaChar {
    std::vector<int> p, q;  // half-characteristic (1/2)p + (1/2)tau q
};

struct ThetaOptions {
    double eps = 1e-12;
    double radius_cap = 12.0;
};

struct ThetaValue {
    cplx value{0.0};
    cplx max_term{0.0};  // largest |term| encountered, for divisor residuals
    std::vector<cplx> gradient;  // filled when requested
};

namespace detail {

struct ThetaWorkspace {
    std::vector<double> Y;     // Im tau, row-major g x g
    std::vector<double> Yinv;  // inverse of Y
    double lambda_min = 1.0;
};

inline ThetaWorkspace theta_workspace(const PeriodMatrix& pm) {
    const int g = pm.g;
    ThetaWorkspace ws;
    ws.Y.resize(size_t(g) * g);
    CMatrix y(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            ws.Y[size_t(i) * g + j] = pm.tau(i, j).imag();
            y(i, j) = pm.tau(i, j).imag();
        }
    if (g > 0) {
        auto inv = invert(y);
        ws.Yinv.resize(size_t(g) * g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) ws.Yinv[size_t(i) * g + j] = inv.inv(i, j).real();
        ws.lambda_min = pm.smallest_im_eigenvalue();
    }
    return ws;
}

// Enumerate integer points with (k-k0)^T Y (k-k0) <= R^2 (box superset, then
// filter) and accumulate the sum and optionally the gradient.
template <typename Accumulate>
void theta_enumerate(const PeriodMatrix& pm, const ThetaWorkspace& ws, double R,
                     const std::vector<double>& center, const Accumulate& acc) {
    const int g = pm.g;
    const double half_width = R / std::sqrt(ws.lambda_min);
    std::vector<int> lo(g), hi(g), k(g);
    for (int i = 0; i < g; ++i) {
        lo[i] = int(std::floor(center[i] - half_width));
        hi[i] = int(std::ceil(center[i] + half_width));
        k[i] = lo[i];
    }
    if (g == 0) {
        acc(k);
        return;
    }
    while (true) {
        acc(k);
        int i = 0;
        while (i < g && ++k[i] > hi[i]) {
            k[i] = lo[i];
            ++i;
        }
        if (i == g) break;
    }
}

}  // namespace detail

// Truncated theta sum with tail bound < eps * (|partial sum| + 1).
// Throws ConvergenceFailure when the required radius exceeds the cap.
inline ThetaValue theta_full(const std::vector<cplx>& w, const PeriodMatrix& pm,
                             const ThetaOptions& opt = {}, bool want_gradient = false) {
    const int g = pm.g;
    ThetaValue out;
    if (g == 0) {
        out.value = 1.0;
        out.max_term = 1.0;
        if (want_gradient) out.gradient = {};
        return out;
    }
    auto ws = detail::theta_workspace(pm);

    // recenter: dominant terms near k0 = -Yinv * Im(w)
    std::vector<double> center(g, 0.0);
    for (int i = 0; i < g; ++i) {
        double s = 0;
        for (int j = 0; j < g; ++j) s += ws.Yinv[size_t(i) * g + j] * w[j].imag();
        center[i] = -s;
    }

    // Gaussian tail: |term| ~ exp(-pi (k-c)^T Y (k-c) + pi Im(w)^T Yinv Im(w));
    // request exp(-pi lambda_min (R - |c_frac|)^2) <= eps with margin.
    const double R = std::sqrt(std::log(1.0 / opt.eps) / (M_PI * ws.lambda_min)) + 2.5;
    if (R > opt.radius_cap)
        throw ConvergenceFailure("theta: required radius exceeds cap (near-degenerate tau)");

    // peak magnitude offset exp(pi b^T Yinv b), factored out for stability
    double peak = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            peak += w[i].imag() * ws.Yinv[size_t(i) * g + j] * w[j].imag();
    peak *= M_PI;

    cplx sum = 0;
    std::vector<cplx> grad(want_gradient ? g : 0, 0.0);
    double max_term = 0;
    detail::theta_enumerate(pm, ws, R, center, [&](const std::vector<int>& k) {
        cplx e = 0;
        for (int i = 0; i < g; ++i) {
            cplx row = 0;
            for (int j = 0; j < g; ++j) row += pm.tau(i, j) * double(k[j]);
            e += double(k[i]) * (M_PI * I * row) + 2.0 * M_PI * I * w[i] * double(k[i]);
        }
        const cplx term = std::exp(e - peak);
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        if (want_gradient)
            for (int i = 0; i < g; ++i) grad[i] += term * (2.0 * M_PI * I * double(k[i]));
    });

    const cplx rescale = std::exp(cplx(peak));
    out.value = sum * rescale;
    out.max_term = max_term * rescale;
    if (want_gradient) {
        out.gradient.resize(g);
        for (int i = 0; i < g; ++i) out.gradient[i] = grad[i] * rescale;
    }
    return out;
}

inline cplx theta(const std::vector<cplx>& w, const PeriodMatrix& pm,
                  const ThetaOptions& opt = {}) {
    return theta_full(w, pm, opt).value;
}

// exp(-i pi m^T tau m - 2 i pi w^T m) * theta(w): equals theta(w + tau m).
inline cplx theta_shifted(const std::vector<cplx>& w, const PeriodMatrix& pm,
                          const std::vector<int>& m, const ThetaOptions& opt = {}) {
    const int g = pm.g;
    cplx e = 0;
    for (int i = 0; i < g; ++i) {
        cplx row = 0;
        for (int j = 0; j < g; ++j) row += pm.tau(i, j) * double(m[j]);
        e += -M_PI * I * double(m[i]) * row - 2.0 * M_PI * I * w[i] * double(m[i]);
    }
    return std::exp(e) * theta(w, pm, opt);
}

struct DivisorTest {
    bool on_divisor = false;
    double residual = 0;  // |theta(w)| / max |term|
};

inline DivisorTest on_theta_divisor(const std::vector<cplx>& w, const PeriodMatrix& pm,
                                    double tol, const ThetaOptions& opt = {}) {
    auto tv = theta_full(w, pm, opt);
    DivisorTest out;
    out.residual = std::abs(tv.value) / std::max(std::abs(tv.max_term), 1e-300);
    out.on_divisor = out.residual < tol;
    return out;
}

inline std::vector<cplx> theta_gradient(const std::vector<cplx>& w, const PeriodMatrix& pm,
                                        const ThetaOptions& opt = {}) {
    return theta_full(w, pm, opt, /*want_gradient=*/true).gradient;
}

// theta with half-characteristic [p/2, q/2] via argument shift:
//   theta[a,b](w) = exp(i pi a^T tau a + 2 i pi a^T (w + b)) theta(w + b + tau a)
inline cplx theta_char(const ThetaChar& ch, const std::vector<cplx>& w, const PeriodMatrix& pm,
                       const ThetaOptions& opt = {}) {
    const int g = pm.g;
    std::vector<cplx> shifted(w);
    cplx phase = 0;
    for (int i = 0; i < g; ++i) {
        const double ai = 0.5 * ch.p[i], bi = 0.5 * ch.q[i];
        shifted[i] += bi;
        cplx row = 0;
        for (int j = 0; j < g; ++j) row += pm.tau(i, j) * 0.5 * double(ch.p[j]);
        shifted[i] += row;
        phase += M_PI * I * ai * row + 2.0 * M_PI * I * ai * (w[i] + bi);
    }
    return std::exp(phase) * theta(shifted, pm, opt);
}

}  // namespace monopole
