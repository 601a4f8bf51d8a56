#pragma once

// Gauge flow C(z), Nahm data reconstruction and the associated checks.
//
// D := C^{-1} solves dD/dz = -(1/2) Q0(z) D, D(0) = 1 (the Proposition ODE;
// left multiplication is the version consistent with C' = (1/2) A0 C and
// Q0 = C^{-1} A0 C). Then A1(z) = C diag(rho) C^{-1}, A0(z) = C Q0 C^{-1},
// A_{-1} = -A1^dagger, and T1 = (A_{-1}+A1)/2, T2 = (A_{-1}-A1)/2i,
// T3 = (i/2) A0.

#include <cmath>
#include <functional>
#include <vector>

#include "monopole/baker_akhiezer.hpp"
#include "monopole/detail/ode.hpp"
#include "monopole/report.hpp"

namespace monopole {

struct FlowParams {
    double tol_ode = 1e-13;
    double max_step = 1e-3;      // also bounds the dense-output error
    double z_max = 1.0 - 2e-4;   // integration reach on both sides
    double cond_cap = 1e12;
};

class FlowState {
  public:
    FlowState() = default;
    FlowState(const AbelianBundle& b, const FlowParams& prm) : zmax_(prm.z_max) {
        const int n = b.n;
        rhs_ = [&b](double z, const CMatrix& d) {
            return cplx(-0.5) * (q0_matrix(b, z) * d);
        };
        const CMatrix one = CMatrix::identity(n);
        if (n == 1) {
            zmax_ = 1.0;  // no poles at charge 1
            trivial_ = true;
            plus_.t = {0.0, zmax_};
            plus_.y = {one, one};
            plus_.dy = {CMatrix(1, 1), CMatrix(1, 1)};
            minus_ = plus_;
            minus_.t = {0.0, -zmax_};
        } else {
            plus_ = detail::integrate_rk45(rhs_, 0.0, zmax_, one, prm.tol_ode, prm.max_step);
            minus_ = detail::integrate_rk45(rhs_, 0.0, -zmax_, one, prm.tol_ode, prm.max_step);
        }
        for (const CMatrix* d : {&plus_.y.back(), &minus_.y.back()}) {
            auto inv = invert(*d);
            if (inv.cond > prm.cond_cap) throw ConditionBlowup("FlowState: cond(D) beyond cap");
        }
    }

    double z_max() const { return zmax_; }
    const std::vector<double>& nodes_plus() const { return plus_.t; }
    const std::vector<double>& nodes_minus() const { return minus_.t; }

    CMatrix D(double z) const {
        if (std::abs(z) > zmax_ + 1e-12) throw StepSizeUnderflow("FlowState: z outside range");
        if (trivial_) return plus_.y.front();
        // Near the interval ends the Hermite reconstruction error is amplified
        // by cond(Q); re-integrate from the nearest accepted node instead.
        if (std::abs(z) > 0.93) {
            const auto& sol = (z >= 0 ? plus_ : minus_);
            size_t best = 0;
            double bd = 1e300;
            for (size_t i = 0; i < sol.t.size(); ++i) {
                const double d = std::abs(sol.t[i] - z);
                if (d < bd) {
                    bd = d;
                    best = i;
                }
            }
            if (bd < 1e-14) return sol.y[best];
            auto refined = detail::integrate_rk45(rhs_, sol.t[best], z, sol.y[best], 1e-13,
                                                  std::max(bd / 4.0, 1e-6));
            return refined.y.back();
        }
        return (z >= 0 ? plus_ : minus_).eval(z);
    }
    CMatrix C(double z) const { return invert(D(z)).inv; }

    // max |C D - 1| over the accepted nodes with |z| <= cap
    double inverse_residual(double cap) const {
        double r = 0;
        for (const auto* sol : {&plus_, &minus_})
            for (size_t i = 0; i < sol->t.size(); ++i) {
                if (std::abs(sol->t[i]) > cap) continue;
                auto c = invert(sol->y[i]).inv;
                r = std::max(r, (c * sol->y[i] - CMatrix::identity(sol->y[i].rows())).max_abs());
            }
        return r;
    }

  private:
    detail::OdeSolution plus_, minus_;
    detail::MatrixRhs rhs_;
    double zmax_ = 0;
    bool trivial_ = false;
};

inline FlowState integrate_flow(const AbelianBundle& b, const FlowParams& prm = {}) {
    return FlowState(b, prm);
}

inline NahmTriple reconstruct_nahm(const AbelianBundle& b, const FlowState& flow, double z) {
    const CMatrix D = flow.D(z);
    const CMatrix C = invert(D).inv;
    const CMatrix A1 = C * CMatrix::diag(b.rho) * D;
    const CMatrix A0 = C * q0_matrix(b, z) * D;
    const CMatrix Am1 = cplx(-1.0) * A1.dagger();
    NahmTriple t;
    t.t1 = 0.5 * (Am1 + A1);
    t.t2 = (Am1 - A1) * (cplx(1.0) / (2.0 * I));
    t.t3 = (0.5 * I) * A0;
    return t;
}

// max_i || dT_i/dz - (1/2) eps_{ijk} [T_j, T_k] ||_F with a Richardson
// central difference for the derivative.
inline double nahm_residual(const FlowState& flow, const AbelianBundle& b, double z,
                            double h = 1e-4) {
    auto T = [&](double zz) { return reconstruct_nahm(b, flow, zz); };
    const NahmTriple t0 = T(z);
    auto deriv = [&](double hh) {
        const NahmTriple tp = T(z + hh), tm = T(z - hh);
        std::vector<CMatrix> d(3);
        d[0] = (tp.t1 - tm.t1) * (cplx(1.0) / (2.0 * hh));
        d[1] = (tp.t2 - tm.t2) * (cplx(1.0) / (2.0 * hh));
        d[2] = (tp.t3 - tm.t3) * (cplx(1.0) / (2.0 * hh));
        return d;
    };
    auto d1 = deriv(h), d2 = deriv(0.5 * h);
    const CMatrix* tt[3] = {&t0.t1, &t0.t2, &t0.t3};
    double res = 0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        CMatrix rhs = (*tt[j]) * (*tt[k]) - (*tt[k]) * (*tt[j]);  // eps sum = [T_j,T_k], cyclic
        CMatrix dt = (4.0 / 3.0) * d2[size_t(i)] - (1.0 / 3.0) * d1[size_t(i)];
        res = std::max(res, (dt - rhs).frobenius());
    }
    return res;
}

// Direct residual for an externally supplied triple-valued function (used by
// the pole-model oracles in tests).
inline double nahm_residual_of(const std::function<NahmTriple(double)>& T, double z,
                               double h = 1e-5) {
    const NahmTriple t0 = T(z);
    const NahmTriple tp = T(z + h), tm = T(z - h);
    const CMatrix d[3] = {(tp.t1 - tm.t1) * (cplx(1.0) / (2.0 * h)),
                          (tp.t2 - tm.t2) * (cplx(1.0) / (2.0 * h)),
                          (tp.t3 - tm.t3) * (cplx(1.0) / (2.0 * h))};
    const CMatrix* tt[3] = {&t0.t1, &t0.t2, &t0.t3};
    double res = 0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        CMatrix rhs = (*tt[j]) * (*tt[k]) - (*tt[k]) * (*tt[j]);
        res = std::max(res, (d[i] - rhs).frobenius());
    }
    return res;
}

struct ResidueReport {
    bool has_poles = false;
    std::vector<CMatrix> residues;      // R_i = lim (1 -+ z) T_i
    double casimir_residual = 0;        // || sum R_i R_i + ((n^2-1)/4) 1 ||
    double closure_residual = 0;        // || R_i - (1/2) eps_{ijk} [R_j, R_k] ||
    double extrapolation_spread = 0;
};

// Extrapolate (1 -+ z) T_i over a delta-sequence toward z = +-1.
inline ResidueReport residue_check(const FlowState& flow, const AbelianBundle& b, int side,
                                   double delta = 1e-3) {
    ResidueReport rep;
    if (b.n == 1) return rep;  // no poles at charge 1
    rep.has_poles = true;

    auto scaled = [&](double d) {
        const double z = side > 0 ? 1.0 - d : -1.0 + d;
        NahmTriple t = reconstruct_nahm(b, flow, z);
        std::vector<CMatrix> r = {cplx(d) * t.t1, cplx(d) * t.t2, cplx(d) * t.t3};
        return r;
    };
    auto r1 = scaled(delta), r2 = scaled(2.0 * delta), r4 = scaled(4.0 * delta);
    rep.residues.resize(3);
    double spread = 0;
    for (int i = 0; i < 3; ++i) {
        // quadratic Richardson in delta
        CMatrix e1 = (1.0 / 3.0) * (8.0 * r1[size_t(i)] - 6.0 * r2[size_t(i)] + r4[size_t(i)]);
        CMatrix lin = 2.0 * r1[size_t(i)] - r2[size_t(i)];
        rep.residues[size_t(i)] = e1;
        spread = std::max(spread, (e1 - lin).max_abs());
    }
    rep.extrapolation_spread = spread;
    if (!std::isfinite(spread) || spread > 1.0)
        throw ExtrapolationUnstable("residue_check");

    CMatrix cas(b.n, b.n);
    for (auto& r : rep.residues) cas += r * r;
    const double target = (b.n * b.n - 1) / 4.0;
    for (int i = 0; i < b.n; ++i) cas(i, i) += target;
    rep.casimir_residual = cas.max_abs();

    // T ~ R/(1-z) near +1 gives R_i = +(1/2) eps [R_j, R_k]; the z = -1 side
    // carries the opposite sign (T ~ R/(1+z) there).
    double clo = 0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        CMatrix comm = rep.residues[size_t(j)] * rep.residues[size_t(k)] -
                       rep.residues[size_t(k)] * rep.residues[size_t(j)];
        clo = std::max(clo, (rep.residues[size_t(i)] - double(side) * comm).max_abs());
    }
    rep.closure_residual = clo;
    return rep;
}

// anti-Hermiticity proxy used by verify_hitchin
inline double antihermiticity_proxy(const AbelianBundle& b) {
    FlowState flow = integrate_flow(b);
    double r = 0;
    for (double z : {-0.9, -0.45, 0.0, 0.45, 0.9})
        r = std::max(r, reconstruct_nahm(b, flow, z).antihermiticity_residual());
    return r;
}

// eigenvalue drift of L(zeta, z) over a z-range (Lax isospectrality)
inline double isospectral_drift(const AbelianBundle& b, const FlowState& flow, cplx zeta,
                                const std::vector<double>& zs) {
    std::vector<cplx> ref;
    double drift = 0;
    for (double z : zs) {
        auto lam = detail::eigenvalues(lax_matrices(reconstruct_nahm(b, flow, z), zeta).l);
        std::sort(lam.begin(), lam.end(), [](cplx a, cplx bb) {
            if (a.real() != bb.real()) return a.real() < bb.real();
            return a.imag() < bb.imag();
        });
        if (ref.empty()) {
            ref = lam;
            continue;
        }
        for (size_t i = 0; i < lam.size(); ++i) drift = std::max(drift, std::abs(lam[i] - ref[i]));
    }
    return drift;
}

// max coefficient difference between curve_from_nahm(T(z)) and the bundle curve
inline double curve_roundtrip_residual(const AbelianBundle& b, const FlowState& flow, double z) {
    SpectralCurve c = curve_from_nahm(reconstruct_nahm(b, flow, z));
    double r = 0;
    for (int k = 0; k < b.n; ++k) {
        const auto& ours = c.a[size_t(k)].c;
        const auto& ref = b.curve.a[size_t(k)].c;
        for (size_t m = 0; m < ref.size(); ++m) {
            const cplx o = m < ours.size() ? ours[m] : cplx(0.0);
            r = std::max(r, std::abs(o - ref[m]));
        }
    }
    return r;
}

// ---- section 3.2 cross-validation: adjugate-eigenvector flow -----------------

struct AdjointFlowResult {
    std::vector<double> z;
    std::vector<std::vector<cplx>> w;   // hat-w(z) = Adj(L - lambda) nu h(z)
    double ode_residual = 0;            // FD residual of (d/dz + M) w = 0
};

inline AdjointFlowResult adjoint_eigenvector_flow(const AbelianBundle& b, const FlowState& flow,
                                                  cplx zeta, cplx lambda,
                                                  const std::vector<cplx>& mu,
                                                  const std::vector<cplx>& nu,
                                                  const std::vector<double>& z_nodes) {
    const int n = b.n;
    auto adjL = [&](double z) {
        auto lp = lax_matrices(reconstruct_nahm(b, flow, z), zeta);
        CMatrix lm = lp.l;
        for (int i = 0; i < n; ++i) lm(i, i) -= lambda;
        return std::pair<CMatrix, CMatrix>(adjugate(lm), lp.m);
    };
    auto bilinear = [&](const CMatrix& A, const std::vector<cplx>& a,
                        const std::vector<cplx>& c) {
        cplx s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += a[size_t(i)] * A(i, j) * c[size_t(j)];
        return s;  // mu^T A nu, plain transpose (no conjugation)
    };

    // d theta / dz = (1/2) mu^T {M, Adj(L-lambda)} nu / (mu^T Adj(L-lambda) nu)
    auto theta_rhs = [&](double z, const CMatrix&) {
        auto [adj, m] = adjL(z);
        const cplx den = bilinear(adj, mu, nu);
        if (std::abs(den) < 1e-12) throw PivotVanishes("adjoint_eigenvector_flow");
        const CMatrix anti = m * adj + adj * m;
        CMatrix out(1, 1);
        out(0, 0) = 0.5 * bilinear(anti, mu, nu) / den;
        return out;
    };

    const double zlo = *std::min_element(z_nodes.begin(), z_nodes.end());
    const double zhi = *std::max_element(z_nodes.begin(), z_nodes.end());
    CMatrix theta0(1, 1);
    auto sol_p = detail::integrate_rk45(theta_rhs, 0.0, zhi, theta0, 1e-12, 1e-3);
    auto sol_m = detail::integrate_rk45(theta_rhs, 0.0, zlo, theta0, 1e-12, 1e-3);

    auto what = [&](double z) {
        auto [adj, m] = adjL(z);
        (void)m;
        const cplx den = bilinear(adj, mu, nu);
        if (std::abs(den) < 1e-12) throw PivotVanishes("adjoint_eigenvector_flow");
        const cplx th = (z >= 0 ? sol_p : sol_m).eval(z)(0, 0);
        const cplx h = std::exp(-th) / std::sqrt(den);
        std::vector<cplx> w(size_t(n), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w[size_t(i)] += adj(i, j) * nu[size_t(j)] * h;
        return w;
    };

    AdjointFlowResult out;
    out.z = z_nodes;
    for (double z : z_nodes) out.w.push_back(what(z));

    // FD residual of (d/dz + M) w = 0 at interior nodes
    double res = 0;
    for (double z : z_nodes) {
        if (std::abs(z) > 0.9 * flow.z_max()) continue;
        const double h = 1e-5;
        auto wp = what(z + h), wm = what(z - h), w0 = what(z);
        auto [adj, m] = adjL(z);
        (void)adj;
        double scale = 0;
        for (auto& v : w0) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < n; ++i) {
            cplx r = (wp[size_t(i)] - wm[size_t(i)]) / (2.0 * h);
            for (int j = 0; j < n; ++j) r += m(i, j) * w0[size_t(j)];
            res = std::max(res, std::abs(r) / std::max(scale, 1e-300));
        }
    }
    out.ode_residual = res;
    return out;
}

}  // namespace monopole
