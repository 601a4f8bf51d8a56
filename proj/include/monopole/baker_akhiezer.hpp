#pragma once

// Baker-Akhiezer vector Phi(P,z) and the flow matrix Q0(z).
//
// Phi_j(P,z) = g_j(P) theta(phi(P) - phi(inf_j) + (z+1)U - K~) /
//              [ theta(phi(P) - phi(inf_j) - K~) theta((z+1)U - K~) ]
//              exp( z int_{P0}^{P} gamma_inf - z nu_j )
//
// i.e. the printed formula with the identically-vanishing constant theta(-K~)
// dropped and the common scalar gauge D(z) = theta((z+1)U - K~); that gauge is
// forced by requiring the pole coefficient at each infinity to be
// z-independent. g_j carries the Baker-Akhiezer pole divisor.
//
// Q0(z)_{jl} = eps_{jl} (rho_j - rho_l)/E(inf_j, inf_l)
//              exp(i pi q~ . (phi_l - phi_j))
//              theta(phi_l - phi_j + (z+1)U - K~) / theta((z+1)U - K~)
//              exp(z (nu_l - nu_j)),     zero diagonal.

#include <cmath>
#include <vector>

#include "monopole/abelian_data.hpp"

namespace monopole {

inline CMatrix q0_matrix(const AbelianBundle& b, double z, const ThetaOptions& topt = {}) {
    const int n = b.n;
    CMatrix q(n, n);
    if (n == 1) return q;

    const auto wz = b.z_theta_arg(z);
    auto den = theta_full(wz, b.tau, topt);
    if (std::abs(den.value) < 1e-10 * std::max(std::abs(den.max_term), 1e-300))
        throw PoleProximity("q0_matrix: theta((z+1)U - K~) vanishing (z near +-1)");

    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            if (j == l) continue;
            std::vector<cplx> arg(size_t(b.g));
            cplx char_phase = 0;
            for (int i = 0; i < b.g; ++i) {
                const cplx dphi = b.abel_inf[size_t(l)][size_t(i)] - b.abel_inf[size_t(j)][size_t(i)];
                arg[size_t(i)] = dphi + wz[size_t(i)];
                char_phase += M_PI * I * double(b.char_q[size_t(i)]) * dphi;
            }
            const cplx num = theta(arg, b.tau, topt);
            q(j, l) = double(b.eps(j, l)) * (b.rho[size_t(j)] - b.rho[size_t(l)]) /
                      b.prime_inf(j, l) * std::exp(char_phase) * (num / den.value) *
                      std::exp(z * (b.nu[size_t(l)] - b.nu[size_t(j)]));
        }
    return q;
}

// g_j evaluated at a point given by its Abel image u (path-consistent with the
// engine's path system). Closed form for n = 2; trivial for n = 1.
inline cplx g_function_at_abel(const AbelianBundle& b, cplx u, int j) {
    if (b.n == 1) return 1.0;
    if (b.n != 2 || !b.g1_gauge)
        throw Unsupported("g_function: n >= 3 requires bundle g-data");
    const auto& gd = *b.g1_gauge;
    const auto& eng = *b.engine;
    const cplx u1 = b.abel_inf[0][0], u2 = b.abel_inf[1][0];
    const cplx shape =
        eng.vtheta(u - u1) * eng.vtheta(u - u2) / (eng.vtheta(u - gd.d1) * eng.vtheta(u - gd.d2));
    return (j == 0 ? gd.kappa1 : gd.kappa2) * shape;
}

inline cplx g_function(const AbelianBundle& b, const CurvePoint& p, int j) {
    if (b.n == 1) return 1.0;
    const auto phi = abel_map(b, p);
    return g_function_at_abel(b, phi[0], j);
}

// Evaluator caching the per-point abelian integrals; evaluation per z is then
// a handful of theta sums.
class BAFunction {
  public:
    BAFunction(const AbelianBundle& b, const CurvePoint& p, ThetaOptions topt = {})
        : b_(&b), p_(p), topt_(topt) {
        abel_and_gamma(b, p, phi_, gamma_);
        gj_.resize(size_t(b.n), 1.0);
        if (b.n == 2)
            for (int j = 0; j < 2; ++j) gj_[size_t(j)] = g_function_at_abel(b, phi_[0], j);
        // denominators theta(phi - phi_j - K~) are z-independent
        den_j_.resize(size_t(b.n), 1.0);
        if (b.g > 0) {
            for (int j = 0; j < b.n; ++j) {
                std::vector<cplx> arg(size_t(b.g));
                for (int i = 0; i < b.g; ++i)
                    arg[size_t(i)] = phi_[size_t(i)] - b.abel_inf[size_t(j)][size_t(i)] -
                                     b.K_tilde[size_t(i)];
                auto tv = theta_full(arg, b.tau, topt_);
                if (std::abs(tv.value) < 1e-9 * std::max(std::abs(tv.max_term), 1e-300))
                    throw DivisorCollision("ba_components: P on the exceptional divisor");
                den_j_[size_t(j)] = tv.value;
            }
        }
    }

    const CurvePoint& point() const { return p_; }
    cplx zeta() const { return p_.zeta; }

    std::vector<cplx> eval(double z) const {
        const auto& b = *b_;
        std::vector<cplx> out(size_t(b.n));
        cplx denz = 1.0;
        if (b.g > 0) {
            auto tv = theta_full(b.z_theta_arg(z), b.tau, topt_);
            if (std::abs(tv.value) < 1e-10 * std::max(std::abs(tv.max_term), 1e-300))
                throw PoleProximity("ba_components: z too close to +-1");
            denz = tv.value;
        }
        for (int j = 0; j < b.n; ++j) {
            cplx num = 1.0;
            if (b.g > 0) {
                std::vector<cplx> arg(size_t(b.g));
                for (int i = 0; i < b.g; ++i)
                    arg[size_t(i)] = phi_[size_t(i)] - b.abel_inf[size_t(j)][size_t(i)] +
                                     (z + 1.0) * b.U[size_t(i)] - b.K_tilde[size_t(i)];
                num = theta(arg, b.tau, topt_);
            }
            out[size_t(j)] = gj_[size_t(j)] * num / (den_j_[size_t(j)] * denz) *
                             std::exp(z * (gamma_ - b.nu[size_t(j)]));
        }
        return out;
    }

    // central-difference residual of (d/dz + Q0 + zeta diag(rho)) Phi = 0,
    // Richardson-extrapolated once; relative to the component scale.
    double spectral_residual(double z, double h0 = 0) const {
        const auto& b = *b_;
        if (b.n == 1) return 0.0;  // exact by construction
        const double h = (h0 > 0) ? h0 : 1e-4 * (1.0 - std::abs(z));
        auto phi0 = eval(z);
        auto d_at = [&](double hh) {
            auto pp = eval(z + hh), pm = eval(z - hh);
            std::vector<cplx> d(pp.size());
            for (size_t i = 0; i < pp.size(); ++i) d[i] = (pp[i] - pm[i]) / (2.0 * hh);
            return d;
        };
        auto d1 = d_at(h), d2 = d_at(0.5 * h);
        std::vector<cplx> dphi(d1.size());
        for (size_t i = 0; i < d1.size(); ++i) dphi[i] = (4.0 * d2[i] - d1[i]) / 3.0;

        const CMatrix q0 = q0_matrix(b, z, topt_);
        double scale = 0, res = 0;
        for (size_t i = 0; i < phi0.size(); ++i) scale = std::max(scale, std::abs(phi0[i]));
        for (int j = 0; j < b.n; ++j) {
            cplx r = dphi[size_t(j)] + p_.zeta * b.rho[size_t(j)] * phi0[size_t(j)];
            for (int l = 0; l < b.n; ++l) r += q0(j, l) * phi0[size_t(l)];
            res = std::max(res, std::abs(r));
        }
        return res / std::max(scale, 1e-300);
    }

  private:
    const AbelianBundle* b_;
    CurvePoint p_;
    ThetaOptions topt_;
    std::vector<cplx> phi_;
    cplx gamma_ = 0;
    std::vector<cplx> gj_;
    std::vector<cplx> den_j_;
};

struct BAEvaluation {
    CurvePoint P;
    double z = 0;
    std::vector<cplx> components;
    double residual = 0;  // spectral-problem FD residual
};

inline BAEvaluation ba_components(const AbelianBundle& b, const CurvePoint& p, double z,
                                  const ThetaOptions& topt = {}) {
    BAFunction f(b, p, topt);
    BAEvaluation ev;
    ev.P = p;
    ev.z = z;
    ev.components = f.eval(z);
    ev.residual = f.spectral_residual(z);
    return ev;
}

}  // namespace monopole
