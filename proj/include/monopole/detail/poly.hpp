#pragma once

// Complex polynomials in one variable, coefficients low -> high. Root finding
// goes through the companion matrix with one Newton polish step; roots at
// infinity are reported separately when leading coefficients vanish.

#include <algorithm>
#include <cmath>
#include <vector>

#include "monopole/detail/eigen_bridge.hpp"
#include "monopole/matrix.hpp"

namespace monopole::detail {

struct Poly {
    std::vector<cplx> c;  // c[k] * x^k

    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}

    int degree() const {
        for (int k = int(c.size()) - 1; k >= 0; --k)
            if (c[k] != 0.0) return k;
        return -1;
    }

    cplx eval(cplx x) const {
        cplx v = 0;
        for (int k = int(c.size()) - 1; k >= 0; --k) v = v * x + c[k];
        return v;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly{{}};
        std::vector<cplx> d(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d[k - 1] = double(k) * c[k];
        return Poly{std::move(d)};
    }

    double max_abs_coeff() const {
        double m = 0;
        for (auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
        for (size_t k = 0; k < a.c.size(); ++k) r[k] += a.c[k];
        for (size_t k = 0; k < b.c.size(); ++k) r[k] += b.c[k];
        return Poly{std::move(r)};
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.c.empty() || b.c.empty()) return Poly{{}};
        std::vector<cplx> r(a.c.size() + b.c.size() - 1, 0.0);
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return Poly{std::move(r)};
    }
    friend Poly operator*(cplx s, Poly p) {
        for (auto& v : p.c) v *= s;
        return p;
    }
};

struct PolyRoots {
    std::vector<cplx> finite;  // with multiplicity
    int at_infinity = 0;       // count of roots at zeta = infinity
};

// Roots of a polynomial whose nominal degree is `nominal_degree` (the degree
// it would have with nonzero leading coefficient). Leading coefficients with
// magnitude below tol * |coeffs| each contribute one root at infinity.
inline PolyRoots poly_roots(const Poly& p, int nominal_degree, double tol = 1e-11) {
    PolyRoots out;
    const double scale = p.max_abs_coeff();
    if (scale == 0.0) return out;  // identically zero: caller decides

    std::vector<cplx> c(p.c);
    c.resize(size_t(nominal_degree) + 1, 0.0);
    int deg = nominal_degree;
    while (deg > 0 && std::abs(c[deg]) < tol * scale) {
        --deg;
        ++out.at_infinity;
    }
    if (deg <= 0) return out;

    CMatrix comp(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    out.finite = eigenvalues(comp);

    // one Newton polish step on the original polynomial
    Poly dp = p.derivative();
    for (auto& r : out.finite) {
        const cplx d = dp.eval(r);
        if (std::abs(d) > 1e-300) {
            const cplx step = p.eval(r) / d;
            if (std::abs(step) < 0.5 * (1.0 + std::abs(r))) r -= step;
        }
    }
    std::sort(out.finite.begin(), out.finite.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

}  // namespace monopole::detail
