#pragma once

// AbelianBundle: the curve-derived constants consumed by the Baker-Akhiezer
// formulas, with JSON (de)serialization and load-time validation. For charge 2
// a numeric genus-1 engine recomputes everything checkable; for n >= 3 the
// abelian data is ingested, not derived.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "monopole/curve_g1.hpp"
#include "monopole/report.hpp"
#include "monopole/spectral_curve.hpp"
#include "monopole/theta.hpp"

namespace monopole {

struct ResiduesAtInfinity {
    std::vector<cplx> rho;
    bool degenerate = false;  // coincident leading directions (handled downstream)
};

// rho_m from the degenerate leading form: rho^n + sum_k top(a_k) rho^{n-k} = 0
inline ResiduesAtInfinity residues_at_infinity(const SpectralCurve& c, double tol = 1e-8) {
    ResiduesAtInfinity out;
    out.rho = leading_rho(c);
    double scale = 0;
    for (cplx r : out.rho) scale = std::max(scale, std::abs(r));
    for (size_t i = 0; i < out.rho.size(); ++i)
        for (size_t j = i + 1; j < out.rho.size(); ++j)
            if (std::abs(out.rho[i] - out.rho[j]) < tol * std::max(scale, 1.0))
                out.degenerate = true;
    return out;
}

struct AbelSpec {
    std::string kind;  // closed_form_g0 | closed_form_g1 | quadrature
    std::vector<cplx> branch_points;
    cplx base_zeta{0.0};
    cplx base_eta{0.0};
};

// Closed-form data for the n=2 g-functions (derived at load from the engine;
// see baker_akhiezer).
struct G1GaugeData {
    cplx d1, d2;          // Baker-Akhiezer pole divisor in Abel coordinates
    cplx kappa1, kappa2;  // normalizations of g_1, g_2
    double consistency_residual = 0;
};

struct AbelianBundle {
    int n = 1;
    int g = 0;
    SpectralCurve curve;
    PeriodMatrix tau;
    std::vector<int> es_n, es_m;
    std::vector<cplx> U;        // (1/2) es_n + (1/2) tau es_m
    std::vector<cplx> K_tilde;
    std::vector<std::vector<cplx>> abel_inf;  // phi(inf_j), j = 1..n
    std::vector<cplx> rho;
    std::vector<cplx> nu;
    CMatrix prime_inf;          // E(inf_j, inf_l), off-diagonal
    std::vector<int> eps_signs;  // n-1 signs
    std::vector<int> char_p, char_q;
    AbelSpec abel_spec;

    std::shared_ptr<const G1Engine> engine;  // n == 2 only
    std::optional<G1GaugeData> g1_gauge;     // n == 2 only
    Report validation;

    // epsilon_{jl} = prod of adjacent signs, symmetric, epsilon_{jj} = 1
    int eps(int j, int l) const {
        if (j == l) return 1;
        const int a = std::min(j, l), b = std::max(j, l);
        int e = 1;
        for (int k = a; k < b; ++k) e *= eps_signs[size_t(k)];
        return e;
    }

    std::vector<cplx> z_theta_arg(double z) const {
        // (z+1) U - K_tilde
        std::vector<cplx> w(static_cast<size_t>(g));
        for (int i = 0; i < g; ++i) w[size_t(i)] = (z + 1.0) * U[size_t(i)] - K_tilde[size_t(i)];
        return w;
    }
};

// --- JSON helpers -------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline cplx json_to_cplx(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError("bundle: complex numbers must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}
inline json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline std::vector<cplx> json_to_cvec(const json& j) {
    if (!j.is_array()) throw SchemaError("bundle: expected array");
    std::vector<cplx> v;
    for (auto& e : j) v.push_back(json_to_cplx(e));
    return v;
}
inline json cvec_to_json(const std::vector<cplx>& v) {
    json j = json::array();
    for (cplx z : v) j.push_back(cplx_to_json(z));
    return j;
}

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::set<std::string>& required, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw SchemaError("bundle: unknown field '" + it.key() + "' in " + where);
    for (auto& k : required)
        if (!j.contains(k)) throw SchemaError("bundle: missing field '" + k + "' in " + where);
}

}  // namespace detail

// --- abel map / second-kind integral -------------------------------------------

inline std::vector<cplx> abel_map(const AbelianBundle& b, const CurvePoint& p) {
    if (b.g == 0) return {};
    if (b.n == 2) {
        if (p.at_infinity) return b.abel_inf[size_t(p.sheet)];
        return {b.engine->abel({p.zeta, p.eta})};
    }
    throw Unsupported("abel_map: n >= 3 bundles carry declared data only");
}

inline cplx second_kind_integral(const AbelianBundle& b, const CurvePoint& p) {
    if (b.n == 1) {
        // gamma = -rho_1 dzeta on the rational curve, base point zeta = 0
        return -b.rho[0] * p.zeta;
    }
    if (b.n == 2) {
        if (p.at_infinity)
            throw Unsupported("second_kind_integral diverges at infinity; use nu_j");
        return b.engine->integrate_to({p.zeta, p.eta}).gamma;
    }
    throw Unsupported("second_kind_integral: n >= 3");
}

// Both abelian integrals along the same path (required by the BA formula).
inline void abel_and_gamma(const AbelianBundle& b, const CurvePoint& p, std::vector<cplx>& phi,
                           cplx& gamma) {
    if (b.n == 1) {
        phi.clear();
        gamma = -b.rho[0] * p.zeta;
        return;
    }
    if (b.n == 2) {
        auto pi = b.engine->integrate_to({p.zeta, p.eta});
        phi = {pi.holo / b.engine->a_period()};
        gamma = pi.gamma;
        return;
    }
    throw Unsupported("abel_and_gamma: n >= 3");
}

// --- load / save ---------------------------------------------------------------

namespace detail {

inline void validate_bundle(AbelianBundle& b);

}  // namespace detail

inline AbelianBundle load_bundle(const nlohmann::json& doc) {
    using nlohmann::json;
    detail::require_keys(doc,
                        {"version", "n", "curve", "tau", "es_n", "es_m", "K_tilde", "abel_inf",
                         "rho", "nu", "prime_inf", "eps_signs", "char_p", "char_q", "abel_spec"},
                        {"version", "n", "curve", "tau", "es_n", "es_m", "K_tilde", "abel_inf",
                         "rho", "nu", "prime_inf", "eps_signs", "char_p", "char_q", "abel_spec"},
                        "bundle");
    if (doc["version"].get<std::string>() != "monopole-bundle/1")
        throw SchemaError("bundle: unsupported version");

    AbelianBundle b;
    b.n = doc["n"].get<int>();
    if (b.n < 1) throw SchemaError("bundle: n must be positive");
    b.g = (b.n - 1) * (b.n - 1);

    detail::require_keys(doc["curve"], {"a"}, {"a"}, "curve");
    {
        std::vector<std::vector<cplx>> rows;
        for (auto& row : doc["curve"]["a"]) rows.push_back(detail::json_to_cvec(row));
        b.curve = SpectralCurve::make(b.n, std::move(rows));
    }

    const auto& jt = doc["tau"];
    if (!jt.is_array() || int(jt.size()) != b.g) throw SchemaError("bundle: tau shape");
    b.tau.g = b.g;
    b.tau.tau = CMatrix(b.g, b.g);
    for (int i = 0; i < b.g; ++i) {
        if (int(jt[i].size()) != b.g) throw SchemaError("bundle: tau shape");
        for (int j = 0; j < b.g; ++j) b.tau.tau(i, j) = detail::json_to_cplx(jt[i][j]);
    }
    b.tau.validate();  // symmetry / positivity are schema-level failures

    auto get_ints = [&](const char* key, size_t len) {
        std::vector<int> v = doc[key].get<std::vector<int>>();
        if (v.size() != len) throw SchemaError(std::string("bundle: length of ") + key);
        return v;
    };
    b.es_n = get_ints("es_n", size_t(b.g));
    b.es_m = get_ints("es_m", size_t(b.g));
    b.char_p = get_ints("char_p", size_t(b.g));
    b.char_q = get_ints("char_q", size_t(b.g));

    b.K_tilde = detail::json_to_cvec(doc["K_tilde"]);
    if (int(b.K_tilde.size()) != b.g) throw SchemaError("bundle: K_tilde length");

    if (int(doc["abel_inf"].size()) != b.n) throw SchemaError("bundle: abel_inf length");
    for (auto& row : doc["abel_inf"]) {
        auto v = detail::json_to_cvec(row);
        if (int(v.size()) != b.g) throw SchemaError("bundle: abel_inf vector length");
        b.abel_inf.push_back(std::move(v));
    }

    b.rho = detail::json_to_cvec(doc["rho"]);
    b.nu = detail::json_to_cvec(doc["nu"]);
    if (int(b.rho.size()) != b.n || int(b.nu.size()) != b.n)
        throw SchemaError("bundle: rho/nu length");

    if (int(doc["prime_inf"].size()) != b.n) throw SchemaError("bundle: prime_inf shape");
    b.prime_inf = CMatrix(b.n, b.n);
    for (int i = 0; i < b.n; ++i) {
        if (int(doc["prime_inf"][i].size()) != b.n) throw SchemaError("bundle: prime_inf shape");
        for (int j = 0; j < b.n; ++j)
            b.prime_inf(i, j) = detail::json_to_cplx(doc["prime_inf"][i][j]);
    }

    b.eps_signs = doc["eps_signs"].get<std::vector<int>>();
    if (int(b.eps_signs.size()) != b.n - 1) throw SchemaError("bundle: eps_signs length");
    for (int e : b.eps_signs)
        if (e != 1 && e != -1) throw SchemaError("bundle: eps_signs entries must be +-1");

    const auto& js = doc["abel_spec"];
    detail::require_keys(js, {"kind", "branch_points", "paths", "base_point"}, {"kind"},
                        "abel_spec");
    b.abel_spec.kind = js["kind"].get<std::string>();
    if (b.abel_spec.kind != "closed_form_g0" && b.abel_spec.kind != "closed_form_g1" &&
        b.abel_spec.kind != "quadrature")
        throw SchemaError("bundle: abel_spec.kind");
    if (js.contains("branch_points"))
        b.abel_spec.branch_points = detail::json_to_cvec(js["branch_points"]);
    if (js.contains("base_point")) {
        detail::require_keys(js["base_point"], {"zeta", "eta"}, {"zeta", "eta"}, "base_point");
        b.abel_spec.base_zeta = detail::json_to_cplx(js["base_point"]["zeta"]);
        b.abel_spec.base_eta = detail::json_to_cplx(js["base_point"]["eta"]);
    }

    // derived
    b.U.resize(size_t(b.g));
    for (int i = 0; i < b.g; ++i) {
        cplx u = 0.5 * double(b.es_n[size_t(i)]);
        for (int j = 0; j < b.g; ++j) u += 0.5 * b.tau.tau(i, j) * double(b.es_m[size_t(j)]);
        b.U[size_t(i)] = u;
    }

    detail::validate_bundle(b);
    return b;
}

inline nlohmann::json save_bundle(const AbelianBundle& b) {
    using nlohmann::json;
    json doc;
    doc["version"] = "monopole-bundle/1";
    doc["n"] = b.n;
    json rows = json::array();
    for (auto& p : b.curve.a) rows.push_back(detail::cvec_to_json(p.c));
    doc["curve"] = json{{"a", rows}};
    json jt = json::array();
    for (int i = 0; i < b.g; ++i) {
        json row = json::array();
        for (int j = 0; j < b.g; ++j) row.push_back(detail::cplx_to_json(b.tau.tau(i, j)));
        jt.push_back(row);
    }
    doc["tau"] = jt;
    doc["es_n"] = b.es_n;
    doc["es_m"] = b.es_m;
    doc["K_tilde"] = detail::cvec_to_json(b.K_tilde);
    json ai = json::array();
    for (auto& v : b.abel_inf) ai.push_back(detail::cvec_to_json(v));
    doc["abel_inf"] = ai;
    doc["rho"] = detail::cvec_to_json(b.rho);
    doc["nu"] = detail::cvec_to_json(b.nu);
    json pi = json::array();
    for (int i = 0; i < b.n; ++i) {
        json row = json::array();
        for (int j = 0; j < b.n; ++j) row.push_back(detail::cplx_to_json(b.prime_inf(i, j)));
        pi.push_back(row);
    }
    doc["prime_inf"] = pi;
    doc["eps_signs"] = b.eps_signs;
    doc["char_p"] = b.char_p;
    doc["char_q"] = b.char_q;
    json spec;
    spec["kind"] = b.abel_spec.kind;
    spec["branch_points"] = detail::cvec_to_json(b.abel_spec.branch_points);
    spec["paths"] = nlohmann::json::object();
    spec["base_point"] = json{{"zeta", detail::cplx_to_json(b.abel_spec.base_zeta)},
                              {"eta", detail::cplx_to_json(b.abel_spec.base_eta)}};
    doc["abel_spec"] = spec;
    return doc;
}

// --- validation ------------------------------------------------------------------

namespace detail {

// distance of a vector to the lattice Z^g + tau Z^g
inline double lattice_distance(const std::vector<cplx>& w, const PeriodMatrix& pm,
                               std::vector<int>* n_out = nullptr,
                               std::vector<int>* m_out = nullptr) {
    const int g = pm.g;
    if (g == 0) return 0.0;
    // solve Im part for m, then Re part for n, both rounded
    CMatrix Y(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) Y(i, j) = pm.tau(i, j).imag();
    auto Yi = invert(Y);
    std::vector<int> m(static_cast<size_t>(g)), n(static_cast<size_t>(g));
    for (int i = 0; i < g; ++i) {
        double s = 0;
        for (int j = 0; j < g; ++j) s += Yi.inv(i, j).real() * w[size_t(j)].imag();
        m[size_t(i)] = int(std::lround(s));
    }
    for (int i = 0; i < g; ++i) {
        double re = w[size_t(i)].real();
        for (int j = 0; j < g; ++j) re -= pm.tau(i, j).real() * double(m[size_t(j)]);
        n[size_t(i)] = int(std::lround(re));
    }
    double d = 0;
    for (int i = 0; i < g; ++i) {
        cplx res = w[size_t(i)] - cplx(double(n[size_t(i)]));
        for (int j = 0; j < g; ++j) res -= pm.tau(i, j) * double(m[size_t(j)]);
        d = std::max(d, std::abs(res));
    }
    if (n_out) *n_out = n;
    if (m_out) *m_out = m;
    return d;
}

inline void validate_g1_gauge(AbelianBundle& b);

inline void validate_bundle(AbelianBundle& b) {
    Report& rep = b.validation;
    const ThetaOptions topt{1e-12, 12.0};

    // H1 on the curve
    const double inv_res = involution_residual(b.curve);
    rep.add("H1 involution residual", inv_res, 1e-10);
    b.curve.physical = inv_res < 1e-10;

    // rho against the curve's leading form
    auto res = residues_at_infinity(b.curve);
    double rho_res = 0;
    std::vector<bool> used(size_t(b.n), false);
    for (int j = 0; j < b.n; ++j) {
        double best = 1e300;
        int bi = -1;
        for (int i = 0; i < b.n; ++i)
            if (!used[size_t(i)] && std::abs(res.rho[size_t(i)] - b.rho[size_t(j)]) < best) {
                best = std::abs(res.rho[size_t(i)] - b.rho[size_t(j)]);
                bi = i;
            }
        used[size_t(bi)] = true;
        rho_res = std::max(rho_res, best);
    }
    rep.add("rho matches curve leading form", rho_res, 1e-8,
            res.degenerate ? "degenerate leading form" : "");

    if (b.g > 0) {
        // theta(K_tilde) = 0
        auto div = on_theta_divisor(b.K_tilde, b.tau, 1e-9, topt);
        rep.add("theta(K_tilde) divisor residual", div.residual, 1e-9);

        // 2 K_tilde in the lattice
        std::vector<cplx> k2(b.K_tilde);
        for (auto& v : k2) v *= 2.0;
        rep.add("2 K_tilde in lattice", lattice_distance(k2, b.tau), 1e-8);

        // U - K_tilde = (1/2) char_p + (1/2) tau char_q (mod lattice)
        std::vector<cplx> diff(size_t(b.g));
        for (int i = 0; i < b.g; ++i) {
            diff[size_t(i)] = b.U[size_t(i)] - b.K_tilde[size_t(i)] - 0.5 * double(b.char_p[size_t(i)]);
            for (int j = 0; j < b.g; ++j)
                diff[size_t(i)] -= 0.5 * b.tau.tau(i, j) * double(b.char_q[size_t(j)]);
        }
        rep.add("U - K_tilde matches (char_p, char_q)", lattice_distance(diff, b.tau), 1e-8);

        // primitivity: sU in lattice exactly for even s over |s| <= 16
        bool prim_ok = true;
        for (int s = -16; s <= 16; ++s) {
            std::vector<cplx> su(size_t(b.g));
            for (int i = 0; i < b.g; ++i) su[size_t(i)] = double(s) * b.U[size_t(i)];
            const bool in_lattice = lattice_distance(su, b.tau) < 1e-8;
            if ((s % 2 == 0) != in_lattice) prim_ok = false;
        }
        rep.add_bool("U primitive half-period (|s| <= 16)", prim_ok);

        // n >= 3: K_tilde must be a singular divisor point
        if (b.n >= 3) {
            auto grad = theta_gradient(b.K_tilde, b.tau, topt);
            double gn = 0;
            for (auto& v : grad) gn = std::max(gn, std::abs(v));
            rep.add("grad theta(K_tilde) (singular divisor)", gn, 1e-6);
        }

        // prime form antisymmetry
        double asym = 0;
        for (int i = 0; i < b.n; ++i)
            for (int j = 0; j < b.n; ++j)
                asym = std::max(asym, std::abs(b.prime_inf(i, j) + b.prime_inf(j, i)));
        rep.add("prime_inf antisymmetric", asym, 1e-10);
    }

    if (b.n == 1) {
        // the zero-diagonal Q0 convention needs an x3-centered curve
        const auto& a1 = b.curve.a[0].c;
        const double lin = a1.size() > 1 ? std::abs(a1[1]) : 0.0;
        rep.add("n=1 curve x3-centered (a1 linear coefficient)", lin,
                1e-10 * b.curve.coeff_scale());
    }

    if (b.n == 2) {
        if (b.abel_spec.kind != "closed_form_g1")
            throw SchemaError("bundle: n=2 requires abel_spec.kind = closed_form_g1");
        b.engine = std::make_shared<G1Engine>(b.curve, b.rho);

        rep.add("engine tau matches stored tau", std::abs(b.engine->tau() - b.tau.tau(0, 0)),
                1e-8);
        // H2: b-period of gamma_infinity vs 2 pi i U
        const cplx u_eng = b.engine->winding_U();
        rep.add("H2 winding vector (quadrature)", std::abs(u_eng - b.U[0]), 1e-7, "computed");
        rep.add("gamma a-period vanishes", std::abs(b.engine->gamma_a_period_check()), 1e-8);

        for (int j = 0; j < 2; ++j) {
            rep.add("abel_inf[" + std::to_string(j) + "] matches engine",
                    std::abs(b.engine->abel_infinity(j) - b.abel_inf[size_t(j)][0]), 1e-7);
            rep.add("nu[" + std::to_string(j) + "] matches engine",
                    std::abs(b.engine->nu_infinity(j) - b.nu[size_t(j)]), 1e-7);
        }

        // prime form closed form (up to the recorded -i branch and eps sign)
        const cplx Delta = b.abel_inf[1][0] - b.abel_inf[0][0];
        const cplx E_closed =
            -I * b.rho[0] * b.engine->a_period() * b.engine->vtheta(Delta) / b.engine->vtheta_d0();
        rep.add("prime_inf closed form", std::min(std::abs(b.prime_inf(0, 1) - E_closed),
                                                  std::abs(b.prime_inf(0, 1) + E_closed)),
                1e-7 * std::abs(E_closed));

        validate_g1_gauge(b);
    } else if (b.n >= 3) {
        rep.add_bool("H2 (declared, not recomputed for n >= 3)", true, "declared");
    }

    // H3 proxy: |theta((z+1)U - K_tilde)| bounded away from zero inside (-1,1)
    if (b.g > 0) {
        double minval = 1e300;
        const double delta = 1e-2;
        for (int i = 0; i <= 64; ++i) {
            const double z = -1.0 + delta + (2.0 - 2.0 * delta) * i / 64.0;
            auto tv = theta_full(b.z_theta_arg(z), b.tau, topt);
            minval = std::min(minval, std::abs(tv.value) / std::max(std::abs(tv.max_term), 1e-300));
        }
        rep.add_bool("H3 proxy: theta((z+1)U - K_tilde) nonzero on interior grid", minval > 1e-6,
                     "min relative value " + std::to_string(minval));
    }
}

// Solve for the n=2 Baker-Akhiezer pole divisor (d1, d2) and the g_j
// normalizations; see baker_akhiezer for the formulas consuming these.
inline void validate_g1_gauge(AbelianBundle& b) {
    const auto& eng = *b.engine;
    const cplx u1 = b.abel_inf[0][0], u2 = b.abel_inf[1][0];
    const cplx Delta = u2 - u1;
    const cplx U = b.U[0];
    const double qt = double(b.char_q[0]);
    const double epsv = double(b.eps_signs[0]);

    auto vt = [&](cplx v) { return eng.vtheta(v); };
    const cplx target = epsv * b.rho[0] * eng.a_period() * vt(Delta) *
                        std::exp(I * M_PI * (qt + 1.0) * Delta) /
                        (eng.vtheta_d0() * b.prime_inf(0, 1));

    const cplx mhat = 0.5 * (u1 + u2 - U);
    auto G = [&](cplx delta) {
        return (vt(u1 - mhat - delta) * vt(u1 - mhat + delta)) /
               (vt(u2 - mhat - delta) * vt(u2 - mhat + delta));
    };

    // Newton from several starts
    cplx best_delta = 0;
    double best_res = 1e300;
    const cplx tau = eng.tau();
    for (cplx start : {cplx(0.23, 0.11), cplx(0.11, 0.31), 0.37 * tau, cplx(0.41, -0.13),
                       0.2 + 0.3 * tau, cplx(-0.27, 0.19)}) {
        cplx d = start;
        for (int it = 0; it < 60; ++it) {
            const cplx f = G(d) - target;
            if (std::abs(f) < 1e-13 * std::abs(target)) break;
            const cplx h = 1e-6;
            const cplx df = (G(d + h) - G(d - h)) / (2.0 * h);
            if (std::abs(df) < 1e-300) break;
            cplx step = f / df;
            if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
            d -= step;
        }
        const double res = std::abs(G(d) - target);
        if (res < best_res) {
            best_res = res;
            best_delta = d;
        }
    }
    b.validation.add("BA divisor gauge solve", best_res / std::abs(target), 1e-9);

    G1GaugeData gd;
    gd.d1 = mhat + best_delta;
    gd.d2 = mhat - best_delta;

    // consistency of the second off-diagonal entry: G^2 = -exp(2 pi i (q+1) Delta)
    const cplx lhs = target * target;
    const cplx rhs = -std::exp(2.0 * M_PI * I * (qt + 1.0) * Delta);
    gd.consistency_residual = std::abs(lhs - rhs) / std::abs(rhs);
    b.validation.add("prime form / eps joint consistency", gd.consistency_residual, 1e-8);

    // conversion constant between the canonical theta quotient and the odd-theta
    // form, probed at two generic points (must be u- and z-independent)
    auto theta_quot = [&](cplx u, double z) {
        const cplx arg_num = u - u1 + (z + 1.0) * U - b.K_tilde[0];
        const cplx arg_den = u - u1 - b.K_tilde[0];
        const cplx arg_z = (z + 1.0) * U - b.K_tilde[0];
        return theta({arg_num}, b.tau) / (theta({arg_den}, b.tau) * theta({arg_z}, b.tau));
    };
    auto vtheta_quot = [&](cplx u, double z) {
        return vt(u - u1 + (z + 1.0) * U) / (vt(u - u1) * vt((z + 1.0) * U));
    };
    const cplx probe1 = theta_quot(cplx(0.31, 0.17), 0.2) / vtheta_quot(cplx(0.31, 0.17), 0.2);
    const cplx probe2 = theta_quot(cplx(-0.13, 0.23), -0.4) / vtheta_quot(cplx(-0.13, 0.23), -0.4);
    b.validation.add("theta-quotient conversion constant", std::abs(probe1 / probe2 - 1.0), 1e-8);
    const cplx C0 = probe1;

    gd.kappa1 = vt(u1 - gd.d1) * vt(u1 - gd.d2) / (-C0 * vt(Delta));
    gd.kappa2 = vt(u2 - gd.d1) * vt(u2 - gd.d2) / (C0 * vt(Delta));
    b.g1_gauge = gd;
}

}  // namespace detail

// --- Hitchin report -------------------------------------------------------------

// (c) of the H3 proxy (reconstructed anti-Hermiticity) needs the Nahm flow;
// callers may supply it through the hook to keep module layering acyclic.
inline Report verify_hitchin(const AbelianBundle& b,
                             const std::function<double(const AbelianBundle&)>& antiherm_hook = {}) {
    Report rep;
    rep.add("H1 involution residual", involution_residual(b.curve), 1e-10);
    if (b.n == 2) {
        rep.add("H2 b-period of gamma vs 2 pi i U", std::abs(b.engine->winding_U() - b.U[0]),
                1e-7, "computed");
        rep.add("H2 gamma a-period", std::abs(b.engine->gamma_a_period_check()), 1e-8);
    } else if (b.n >= 3) {
        rep.add_bool("H2 (declared)", true, "declared");
    }
    if (b.g > 0) {
        auto div = on_theta_divisor(b.K_tilde, b.tau, 1e-9);
        rep.add("theta(K_tilde) = 0", div.residual, 1e-9);
        double minval = 1e300;
        for (int i = 0; i <= 80; ++i) {
            const double z = -0.99 + 1.98 * i / 80.0;
            auto tv = theta_full(b.z_theta_arg(z), b.tau);
            minval = std::min(minval, std::abs(tv.value) / std::max(std::abs(tv.max_term), 1e-300));
        }
        rep.add_bool("H3 proxy: theta((z+1)U-K_tilde) interior bound", minval > 1e-6,
                     "min " + std::to_string(minval));
    }
    if (antiherm_hook)
        rep.add("H3 proxy: reconstructed T anti-Hermiticity", antiherm_hook(b), 1e-6);
    return rep;
}

inline std::vector<Check> failed_checks(const Report& r) {
    std::vector<Check> out;
    for (auto& c : r.checks)
        if (!c.pass) out.push_back(c);
    return out;
}

}  // namespace monopole
