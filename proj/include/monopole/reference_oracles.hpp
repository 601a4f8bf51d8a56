#pragma once

// Ground-truth constructions: the charge-1 closed pipeline (no theta
// machinery) and the charge-2 elliptic bundle builder with its H2
// calibration.

#include <cmath>
#include <functional>

#include "monopole/field_reconstruction.hpp"

namespace monopole {

// ---- charge 1 ---------------------------------------------------------------------

// Solutions of Delta^dagger v = 0 for T = 0 are v(z) = exp(z x.sigma) c; the
// orthonormal pair uses the +-r eigenvectors of x.sigma. Everything below is
// quadrature on these closed forms, independent of the pipeline.
namespace detail {

inline CMatrix charge1_pair(const SpatialPoint& x, double z) {
    const double r = x.r();
    const std::array<double, 3> u{x.x1 / r, x.x2 / r, x.x3 / r};
    auto chi_p = plus_spinor(u);
    auto chi_m = plus_spinor({-u[0], -u[1], -u[2]});
    const double norm = std::sqrt(std::sinh(2.0 * r) / r);
    CMatrix v(2, 2);
    for (int i = 0; i < 2; ++i) {
        v(i, 0) = std::exp(r * z) * chi_p[size_t(i)] / norm;
        v(i, 1) = std::exp(-r * z) * chi_m[size_t(i)] / norm;
    }
    return v;
}

}  // namespace detail

inline FieldSample charge1_fields(const SpatialPoint& x) {
    const double r = x.r();
    FieldSample s;
    s.x = x;
    if (r <= 0) throw QSingular("charge1_fields: r = 0");

    const auto& q = detail::gauss_legendre(64);

    CMatrix phi(2, 2);
    std::array<CMatrix, 3> A{CMatrix(2, 2), CMatrix(2, 2), CMatrix(2, 2)};
    const double h = 1e-5 * std::max(1.0, r);
    for (int k = 0; k < 64; ++k) {
        const double z = q.x[k], w = q.w[k];
        const CMatrix v = detail::charge1_pair(x, z);
        phi += (w * z) * (v.dagger() * v);
        for (int i = 0; i < 3; ++i) {
            SpatialPoint xp = x, xm = x;
            (i == 0 ? xp.x1 : i == 1 ? xp.x2 : xp.x3) += h;
            (i == 0 ? xm.x1 : i == 1 ? xm.x2 : xm.x3) -= h;
            const CMatrix dv = (detail::charge1_pair(xp, z) - detail::charge1_pair(xm, z)) *
                               (cplx(1.0) / (2.0 * h));
            A[size_t(i)] += w * (v.dagger() * dv);
        }
    }
    s.Phi = I * phi;
    s.A = A;
    const cplx tr = (s.Phi * s.Phi).trace();
    s.phi_norm = std::sqrt(std::max(0.0, -0.5 * tr.real()));
    return s;
}

// closed-form profile: |Phi|(r) = coth(2r) - 1/(2r)
inline double charge1_phi_norm(double r) { return 1.0 / std::tanh(2.0 * r) - 0.5 / r; }

// FD Bogomolny residual of the oracle fields themselves
inline BogomolnyResult charge1_bogomolny(const SpatialPoint& x, double h = 1e-4) {
    auto fields = [&](const SpatialPoint& xx) { return charge1_fields(xx); };
    std::array<CMatrix, 3> dPhi;
    std::array<std::array<CMatrix, 3>, 3> dA;
    const FieldSample c = fields(x);
    for (int j = 0; j < 3; ++j) {
        SpatialPoint xp = x, xm = x;
        (j == 0 ? xp.x1 : j == 1 ? xp.x2 : xp.x3) += h;
        (j == 0 ? xm.x1 : j == 1 ? xm.x2 : xm.x3) -= h;
        const FieldSample fp = fields(xp), fm = fields(xm);
        dPhi[size_t(j)] = (fp.Phi - fm.Phi) * (cplx(1.0) / (2.0 * h));
        for (int i = 0; i < 3; ++i)
            dA[size_t(j)][size_t(i)] =
                (fp.A[size_t(i)] - fm.A[size_t(i)]) * (cplx(1.0) / (2.0 * h));
    }
    BogomolnyResult out;
    std::array<CMatrix, 3> D, B;
    for (int i = 0; i < 3; ++i) {
        D[size_t(i)] = dPhi[size_t(i)] + c.A[size_t(i)] * c.Phi - c.Phi * c.A[size_t(i)];
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        CMatrix fjk = dA[size_t(j)][size_t(k)] - dA[size_t(k)][size_t(j)] +
                      c.A[size_t(j)] * c.A[size_t(k)] - c.A[size_t(k)] * c.A[size_t(j)];
        B[size_t(i)] = 2.0 * fjk;
        out.field_scale = std::max(out.field_scale, D[size_t(i)].max_abs());
    }
    double best = std::numeric_limits<double>::infinity();
    for (int sgn : {+1, -1})
        for (double fac : {1.0, 0.5}) {
            double r = 0;
            for (int i = 0; i < 3; ++i)
                r = std::max(r, (D[size_t(i)] - (double(sgn) * fac) * B[size_t(i)]).frobenius());
            if (r < best) {
                best = r;
                out.sign = sgn;
                out.factor = fac;
            }
        }
    out.residual = best;
    return out;
}

// n = 1 bundle (centered): curve eta = 0, no abelian content.
inline AbelianBundle builtin_charge1_bundle() {
    using nlohmann::json;
    json doc;
    doc["version"] = "monopole-bundle/1";
    doc["n"] = 1;
    doc["curve"] = json::object();
    doc["curve"]["a"] = json::array({detail::cvec_to_json({0.0, 0.0, 0.0})});
    doc["tau"] = json::array();
    doc["es_n"] = json::array();
    doc["es_m"] = json::array();
    doc["K_tilde"] = json::array();
    doc["abel_inf"] = json::array({json::array()});
    doc["rho"] = detail::cvec_to_json({0.0});
    doc["nu"] = detail::cvec_to_json({0.0});
    doc["prime_inf"] = json::array({json::array({detail::cplx_to_json(0.0)})});
    doc["eps_signs"] = json::array();
    doc["char_p"] = json::array();
    doc["char_q"] = json::array();
    doc["abel_spec"] = json::object();
    doc["abel_spec"]["kind"] = "closed_form_g0";
    return load_bundle(doc);
}

// ---- charge 2 ---------------------------------------------------------------------

struct Charge2Params {
    double k2 = 0.51;   // shape of the quartic zeta^4 + 2(1-2k^2) zeta^2 + 1
    int eps = +1;
};

// Curve family eta^2 = rho^2 (zeta^4 + p zeta^2 + 1), p = 2(1-2k^2). The
// winding number U is linear in rho, so H2 reduces to a one-parameter scaling
// onto a primitive half-period.
inline AbelianBundle build_charge2_bundle(const Charge2Params& prm = {}) {
    using nlohmann::json;
    if (!(prm.k2 > 0.0 && prm.k2 < 1.0)) throw CalibrationFailure("k2 outside (0,1)");
    const double p = 2.0 * (1.0 - 2.0 * prm.k2);

    auto make_curve = [&](double rho) {
        std::vector<std::vector<cplx>> rows(2);
        rows[0] = {0.0, 0.0, 0.0};
        rows[1] = {-rho * rho, 0.0, -rho * rho * p, 0.0, -rho * rho};
        return SpectralCurve::make(2, std::move(rows));
    };

    G1Engine trial(make_curve(1.0), {1.0, -1.0});
    const cplx tau = trial.tau();
    const cplx U1 = trial.winding_U();

    struct Cand {
        cplx target;
        int en, em;
    };
    const Cand cands[] = {{0.5, 1, 0},          {0.5 * tau, 0, 1},
                          {0.5 + 0.5 * tau, 1, 1}, {-0.5, -1, 0},
                          {-0.5 * tau, 0, -1},   {-0.5 - 0.5 * tau, -1, -1}};
    double rho = 0;
    int en = 0, em = 0;
    for (const auto& c : cands) {
        const cplx r = c.target / U1;
        if (std::abs(r.imag()) < 1e-8 * std::abs(r) && r.real() > 0) {
            rho = r.real();
            en = c.en;
            em = c.em;
            break;
        }
    }
    if (rho == 0) throw CalibrationFailure("no real-positive scaling onto a half-period");

    G1Engine eng(make_curve(rho), {rho, -rho});
    const cplx U = 0.5 * double(en) + 0.5 * tau * double(em);
    if (std::abs(eng.winding_U() - U) > 1e-8 * std::max(1.0, std::abs(U)))
        throw CalibrationFailure("calibrated winding misses the half-period");

    const cplx Ktilde = 0.5 * (1.0 + tau);
    const int pt = en - 1, qt = em - 1;
    if (((pt % 2) * (qt % 2)) % 2 != 0) throw CalibrationFailure("odd theta characteristic");

    const cplx u1 = eng.abel_infinity(0), u2 = eng.abel_infinity(1);
    const cplx nu1 = eng.nu_infinity(0), nu2 = eng.nu_infinity(1);
    const cplx E = -I * rho * eng.a_period() * eng.vtheta(u2 - u1) / eng.vtheta_d0();

    json doc;
    doc["version"] = "monopole-bundle/1";
    doc["n"] = 2;
    {
        json rows = json::array();
        const auto curve = make_curve(rho);
        rows.push_back(detail::cvec_to_json(curve.a[0].c));
        rows.push_back(detail::cvec_to_json(curve.a[1].c));
        doc["curve"] = {{"a", rows}};
    }
    doc["tau"] = {{detail::cplx_to_json(tau)}};
    doc["es_n"] = {en};
    doc["es_m"] = {em};
    doc["K_tilde"] = {detail::cplx_to_json(Ktilde)};
    doc["abel_inf"] = {json::array({detail::cplx_to_json(u1)}),
                       json::array({detail::cplx_to_json(u2)})};
    doc["rho"] = detail::cvec_to_json({rho, -rho});
    doc["nu"] = detail::cvec_to_json({nu1, nu2});
    doc["prime_inf"] = {json::array({detail::cplx_to_json(0.0), detail::cplx_to_json(E)}),
                        json::array({detail::cplx_to_json(-E), detail::cplx_to_json(0.0)})};
    doc["eps_signs"] = {prm.eps};
    doc["char_p"] = {pt};
    doc["char_q"] = {qt};
    {
        json spec;
        spec["kind"] = "closed_form_g1";
        std::vector<cplx> bp(eng.branch_points().begin(), eng.branch_points().end());
        spec["branch_points"] = detail::cvec_to_json(bp);
        spec["base_point"] = {{"zeta", detail::cplx_to_json(eng.base_point().zeta)},
                              {"eta", detail::cplx_to_json(eng.base_point().eta)}};
        doc["abel_spec"] = spec;
    }

    AbelianBundle b = load_bundle(doc);
    if (!b.validation.all_pass()) {
        std::string what = "build_charge2_bundle: validation failed:";
        for (auto& c : failed_checks(b.validation)) what += " [" + c.name + "]";
        throw CalibrationFailure(what);
    }

    // theta-convention canary: det(eta - L) must reproduce the curve, which
    // pins q12 q21 at z = 0 to rho^2 (2 + p).
    const CMatrix q0 = q0_matrix(b, 0.0);
    const cplx prod = q0(0, 1) * q0(1, 0);
    const cplx want = rho * rho * (2.0 + p);
    if (std::abs(prod - want) > 1e-6 * std::abs(want))
        throw CalibrationFailure("Q0 off-diagonal product disagrees with the curve");
    return b;
}

}  // namespace monopole
