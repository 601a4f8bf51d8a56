#pragma once

// Monopole spectral curve P(zeta,eta) = eta^n + a_1(zeta) eta^{n-1} + ... +
// a_n(zeta), deg a_k <= 2k, its minitwistor parameterization, the Atiyah-Ward
// constraint and the Lax matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "monopole/detail/poly.hpp"
#include "monopole/errors.hpp"
#include "monopole/matrix.hpp"

namespace monopole {

struct NahmTriple {
    CMatrix t1, t2, t3;  // n x n anti-Hermitian

    int n() const { return t1.rows(); }
    double antihermiticity_residual() const {
        double r = 0;
        for (const CMatrix* t : {&t1, &t2, &t3}) r = std::max(r, (t->dagger() + *t).max_abs());
        return r;
    }
};

struct SpectralCurve {
    int n = 1;
    std::vector<detail::Poly> a;  // a[k-1] = a_k(zeta), deg <= 2k
    bool physical = false;        // set when H1 has been verified

    static SpectralCurve make(int n, std::vector<std::vector<cplx>> coeffs) {
        if (n < 1 || int(coeffs.size()) != n) throw SchemaError("SpectralCurve: need n coefficient rows");
        SpectralCurve c;
        c.n = n;
        for (int k = 1; k <= n; ++k) {
            auto& row = coeffs[k - 1];
            if (int(row.size()) > 2 * k + 1)
                throw SchemaError("SpectralCurve: deg a_k exceeds 2k");
            row.resize(size_t(2 * k + 1), 0.0);
            c.a.emplace_back(row);
        }
        return c;
    }

    double coeff_scale() const {
        double s = 0;
        for (auto& p : a) s = std::max(s, p.max_abs_coeff());
        return std::max(s, 1.0);
    }
};

struct CurvePoint {
    cplx zeta{0.0};
    cplx eta{0.0};
    bool at_infinity = false;
    int sheet = -1;  // for infinite points: index into the rho-vector
};

struct UnitDirection {
    std::array<double, 3> u{0, 0, 1};
};

// y(zeta) = ((1+zeta^2)/2i, (1-zeta^2)/2, -zeta): null for every zeta.
inline std::array<cplx, 3> y_of_zeta(cplx zeta) {
    const cplx z2 = zeta * zeta;
    return {(1.0 + z2) / (2.0 * I), (1.0 - z2) / 2.0, -zeta};
}

inline UnitDirection u_hat(cplx zeta) {
    const double n2 = std::norm(zeta);
    if (!std::isfinite(n2) || n2 > 1e300) return UnitDirection{{0, 0, -1}};
    const double d = 1.0 + n2;
    return UnitDirection{{(I * (zeta - std::conj(zeta))).real() / d,
                          (zeta + std::conj(zeta)).real() / d, (1.0 - n2) / d}};
}
inline UnitDirection u_hat_infinity() { return UnitDirection{{0, 0, -1}}; }

inline cplx eval_curve(const SpectralCurve& c, const CurvePoint& p) {
    cplx v = 1.0;  // Horner in eta: ((eta + a1)eta + a2)eta + ...
    for (int k = 1; k <= c.n; ++k) v = v * p.eta + c.a[k - 1].eval(p.zeta);
    return v;
}

// relative magnitude used to normalize curve residuals at a point
inline double curve_scale_at(const SpectralCurve& c, const CurvePoint& p) {
    double s = std::pow(std::abs(p.eta), c.n);
    for (int k = 1; k <= c.n; ++k)
        s += std::abs(c.a[k - 1].eval(p.zeta)) * std::pow(std::abs(p.eta), c.n - k);
    return std::max(s, 1e-30);
}

// eta-roots of P(zeta, .) for fixed zeta: the n sheets above zeta.
inline std::vector<cplx> sheets_above(const SpectralCurve& c, cplx zeta) {
    std::vector<cplx> coeffs(size_t(c.n) + 1);
    coeffs[c.n] = 1.0;
    for (int k = 1; k <= c.n; ++k) coeffs[c.n - k] = c.a[k - 1].eval(zeta);
    auto roots = detail::poly_roots(detail::Poly{coeffs}, c.n);
    return roots.finite;
}

// Max relative residual of the image of sampled on-curve points under
// (zeta,eta) -> (-1/conj(zeta), -conj(eta)/conj(zeta)^2).
inline double involution_residual(const SpectralCurve& c, int samples = 24) {
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        const double ang = 2.0 * M_PI * (s + 0.37) / samples;
        const double rad = (s % 3 == 0) ? 0.55 : (s % 3 == 1 ? 0.95 : 1.45);
        const cplx zeta = rad * std::exp(I * ang);
        for (cplx eta : sheets_above(c, zeta)) {
            const cplx zi = -1.0 / std::conj(zeta);
            const cplx ei = -std::conj(eta) / std::conj(zeta * zeta);
            CurvePoint img{zi, ei};
            worst = std::max(worst, std::abs(eval_curve(c, img)) / curve_scale_at(c, img));
        }
    }
    return worst;
}

// eta(zeta) = 2 y(zeta).x = -i(1+zeta^2)x1 + (1-zeta^2)x2 - 2 zeta x3
inline detail::Poly atiyah_ward_eta(const SpatialPoint& x) {
    return detail::Poly{{-I * x.x1 + x.x2, cplx(-2.0 * x.x3), -I * x.x1 - x.x2}};
}

// leading coefficient of eta/zeta^2 on each sheet at infinity:
// rho^n + sum_k (top coeff of a_k) rho^{n-k} = 0
inline std::vector<cplx> leading_rho(const SpectralCurve& c) {
    std::vector<cplx> coeffs(size_t(c.n) + 1);
    coeffs[c.n] = 1.0;
    for (int k = 1; k <= c.n; ++k) {
        const auto& p = c.a[k - 1].c;
        coeffs[c.n - k] = (int(p.size()) > 2 * k) ? p[size_t(2 * k)] : cplx(0.0);
    }
    auto roots = detail::poly_roots(detail::Poly{coeffs}, c.n);
    if (int(roots.finite.size()) != c.n)
        throw DegenerateLeadingForm("leading form has infinite roots");
    return roots.finite;
}

// Substitute eta(zeta) into the curve; return all 2n solutions with
// multiplicity, including roots at zeta = infinity.
inline std::vector<CurvePoint> atiyah_ward_roots(const SpectralCurve& c, const SpatialPoint& x,
                                                 double tol = 1e-11) {
    const auto etap = atiyah_ward_eta(x);
    // P(zeta, eta(zeta)) as a polynomial in zeta, degree <= 2n
    detail::Poly acc{{1.0}};
    detail::Poly result{{}};
    // Horner in eta: v_k = v_{k-1} * eta + a_k
    for (int k = 1; k <= c.n; ++k) {
        acc = acc * etap;
        acc = acc + c.a[k - 1];
    }
    result = acc;

    const double scale = result.max_abs_coeff();
    const double ref = std::max(1.0, std::pow(1.0 + x.r(), 2.0 * c.n)) * c.coeff_scale();
    if (scale < 1e-13 * ref)
        throw DegenerateConstraint("atiyah_ward_roots: constraint polynomial vanishes");

    auto roots = detail::poly_roots(result, 2 * c.n, tol);
    std::vector<CurvePoint> pts;
    for (cplx z : roots.finite) pts.push_back(CurvePoint{z, etap.eval(z), false, -1});
    if (roots.at_infinity > 0) {
        // match the direction eta/zeta^2 -> -i x1 - x2 against the sheet data
        const cplx rho_x = -I * x.x1 - x.x2;
        auto rho = leading_rho(c);
        int best = 0;
        double bestd = std::abs(rho[0] - rho_x);
        for (int j = 1; j < c.n; ++j)
            if (std::abs(rho[j] - rho_x) < bestd) { bestd = std::abs(rho[j] - rho_x); best = j; }
        for (int m = 0; m < roots.at_infinity; ++m) {
            CurvePoint p;
            p.at_infinity = true;
            p.zeta = cplx(std::numeric_limits<double>::infinity(), 0.0);
            p.eta = cplx(std::numeric_limits<double>::infinity(), 0.0);
            p.sheet = best;
            pts.push_back(p);
        }
    }
    return pts;
}

// L(zeta) = A_{-1} + A_0 zeta + A_1 zeta^2 with A_{-1} = T1 + i T2,
// A_0 = -2i T3, A_1 = T1 - i T2; M = A_0/2 + A_1 zeta.
struct LaxPair {
    CMatrix l, m;
};

inline CMatrix lax_a_minus1(const NahmTriple& t) { return t.t1 + I * t.t2; }
inline CMatrix lax_a0(const NahmTriple& t) { return -2.0 * I * t.t3; }
inline CMatrix lax_a1(const NahmTriple& t) { return t.t1 - I * t.t2; }

inline LaxPair lax_matrices(const NahmTriple& t, cplx zeta) {
    LaxPair lp;
    lp.l = lax_a_minus1(t) + zeta * lax_a0(t) + (zeta * zeta) * lax_a1(t);
    lp.m = 0.5 * lax_a0(t) + zeta * lax_a1(t);
    return lp;
}

// Characteristic polynomial coefficients of A: det(eta 1 - A) =
// eta^n + c[0] eta^{n-1} + ... + c[n-1], by Faddeev-LeVerrier.
inline std::vector<cplx> char_poly(const CMatrix& A) {
    const int n = A.rows();
    std::vector<cplx> c(n);
    CMatrix M = CMatrix::identity(n);
    for (int k = 1; k <= n; ++k) {
        CMatrix AM = A * M;
        c[k - 1] = -AM.trace() / double(k);
        M = AM;
        for (int i = 0; i < n; ++i) M(i, i) += c[k - 1];
    }
    return c;
}

// Expand det(eta 1 - L(zeta)) into curve coefficients a_k(zeta) by sampling
// zeta on the unit circle and discrete Fourier inversion.
inline SpectralCurve curve_from_nahm(const NahmTriple& t) {
    const int n = t.n();
    const int M = 4 * n + 1;
    std::vector<std::vector<cplx>> samples(static_cast<size_t>(n));  // samples[k-1][j] = a_k(zeta_j)
    for (auto& row : samples) row.resize(M);
    for (int j = 0; j < M; ++j) {
        const cplx zj = std::exp(2.0 * M_PI * I * double(j) / double(M));
        auto c = char_poly(lax_matrices(t, zj).l);
        for (int k = 1; k <= n; ++k) samples[k - 1][j] = c[k - 1];
    }
    std::vector<std::vector<cplx>> coeffs(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k) {
        coeffs[k - 1].resize(size_t(2 * k) + 1);
        for (int m = 0; m <= 2 * k; ++m) {
            cplx s = 0;
            for (int j = 0; j < M; ++j)
                s += samples[k - 1][j] * std::exp(-2.0 * M_PI * I * double(j * m) / double(M));
            coeffs[k - 1][m] = s / double(M);
        }
    }
    return SpectralCurve::make(n, std::move(coeffs));
}

}  // namespace monopole
