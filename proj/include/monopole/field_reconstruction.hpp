#pragma once

// Higgs and gauge fields from the normalizable spinors.
//
// With H = x.sigma (x) 1_n, F = i sigma_j (x) T_j and
// Q = (1/r^2) H F H - F, and v' = (H - F) v for Delta^dagger v = 0:
//
//   int v_a^+ v_b dz          = [ v_a^+ Q^{-1} v_b ]
//   int z v_a^+ v_b dz        = [ v_a^+ Q^{-1} (z v_b - 2 H dv_b/dr^2) ]
//   int v_a^+ d_i v_b dz      = [ v_a^+ Q^{-1} (d_i v_b - (z x_i/r^2) H v_b
//                                  + (i/r^2) H (x cross grad)_i v_b) ]
//
// evaluated as boundary differences at z = +-(1 - delta) with Richardson
// extrapolation in delta. Direct z-quadrature of the defining integrals is
// always available as the fallback (and as the cross-check).

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monopole/weyl_solver.hpp"

namespace monopole {

struct FieldConfig {
    double fd_step = 1e-3;          // spatial step, scaled by max(1, r)
    double delta_boundary = 1e-3;   // z-standoff for boundary evaluations
    bool prefer_boundary = true;    // antiderivative path with quadrature fallback
    bool richardson_fd = true;      // half-step Richardson on spatial FD
    double q_cond_cap = 1e10;
    WeylParams weyl;
};

struct PanagopoulosKernel {
    CMatrix H, F, Q;
    double cond = std::numeric_limits<double>::infinity();
    bool invertible = false;
    CMatrix Qinv;

    const CMatrix& inverse() const {
        if (!invertible) throw QSingular("PanagopoulosKernel: Q not invertible");
        return Qinv;
    }
};

inline PanagopoulosKernel q_kernel(const SpatialPoint& x, const NahmTriple& t,
                                   double cond_cap = 1e10) {
    const int n = t.n();
    PanagopoulosKernel k;
    k.H = kron(pauli_dot(x.vec()), CMatrix::identity(n));
    k.F = I * (kron(sigma(1), t.t1) + kron(sigma(2), t.t2) + kron(sigma(3), t.t3));
    const double r2 = x.r2();
    if (r2 <= 0) throw QSingular("q_kernel: r = 0");
    k.Q = (1.0 / r2) * (k.H * k.F * k.H) - k.F;
    try {
        auto inv = invert(k.Q);
        k.cond = inv.cond;
        if (inv.cond <= cond_cap) {
            k.invertible = true;
            k.Qinv = std::move(inv.inv);
        }
    } catch (const SingularMatrix&) {
        k.invertible = false;
    }
    return k;
}

// ---- Appendix identity residuals ------------------------------------------------

struct AntiderivativeReport {
    double panrel = 0;      // || d(Q^{-1})/dz + (H-F)Q^{-1} + Q^{-1}(H-F) - 1 ||
    double s_bracket = 0;   // vanishing d/dr^2 coefficient of D(S)
    double r2_identity = 0; // || FD_{r^2}(H^2) - 1 ||
};

inline AntiderivativeReport antiderivative_identity_residuals(
    const SpatialPoint& x, const std::function<NahmTriple(double)>& T, double z,
    double hz = 1e-5) {
    auto kern = [&](double zz) { return q_kernel(x, T(zz)); };
    const PanagopoulosKernel k0 = kern(z);
    const CMatrix Qi = k0.inverse();
    const CMatrix Qip = kern(z + hz).inverse();
    const CMatrix Qim = kern(z - hz).inverse();
    const int dim = Qi.rows();

    CMatrix dQi = (Qip - Qim) * (cplx(1.0) / (2.0 * hz));
    CMatrix hf = k0.H - k0.F;
    CMatrix res = dQi + hf * Qi + Qi * hf - CMatrix::identity(dim);

    AntiderivativeReport rep;
    rep.panrel = res.max_abs();

    // d/dr^2 coefficient of D(S): 2 H_- + 2 Q^{-1} [F, H_-] with H_- = -H
    CMatrix br = cplx(-2.0) * k0.H + cplx(-2.0) * (Qi * (k0.F * k0.H - k0.H * k0.F));
    rep.s_bracket = br.max_abs() / std::max(1.0, k0.H.max_abs());

    // FD in r^2 of H^2 = r^2: scale x radially
    const double hr = 1e-4 * std::max(1.0, x.r());
    auto scaled = [&](double f) {
        SpatialPoint xs{x.x1 * f, x.x2 * f, x.x3 * f, x.x4};
        CMatrix H = kron(pauli_dot(xs.vec()), CMatrix::identity(T(z).n()));
        return H * H;
    };
    const double fp = 1.0 + hr, fm = 1.0 - hr;
    const double dr2 = x.r2() * (fp * fp - fm * fm);
    CMatrix dH2 = (scaled(fp) - scaled(fm)) * (cplx(1.0) / dr2) - CMatrix::identity(dim);
    rep.r2_identity = dH2.max_abs();
    return rep;
}

// ---- local frame clusters --------------------------------------------------------

namespace detail {

inline CMatrix polar_unitary(const CMatrix& o) {
    // unitary factor aligning: returns R with o^dagger = R P (P >= 0)
    auto s = svd(o.dagger());
    return s.u * s.v.dagger();
}

}  // namespace detail

// Frames around one spatial point, all in a common smooth gauge; provides the
// normalizable pair and its spatial/radial derivatives at arbitrary z.
class FieldPoint {
  public:
    FieldPoint(const AbelianBundle& b, const FlowState& flow, const SpatialPoint& x,
               const FieldConfig& cfg, const WeylFrame* gauge_ref = nullptr)
        : b_(&b), flow_(&flow), x_(x), cfg_(cfg) {
        quad_ = detail::build_z_quadrature(flow.z_max(), cfg.weyl);
        h_ = cfg.fd_step * std::max(1.0, x.r());

        center_ = std::make_unique<FrameResult>(assemble_frame(b, flow, x, cfg.weyl));
        if (gauge_ref) align(center_->frame, *gauge_ref);

        for (int i = 0; i < 3; ++i)
            for (int s = 0; s < 2; ++s) {
                nb_[size_t(2 * i + s)] = make_neighbor(shift(x, i, s ? -h_ : h_));
                if (cfg.richardson_fd)
                    nb2_[size_t(2 * i + s)] = make_neighbor(shift(x, i, s ? -h_ / 2 : h_ / 2));
            }
        const double hr = h_ / std::max(x.r(), 1e-12);
        rad_[0] = make_neighbor(scale(x, 1.0 + hr));
        rad_[1] = make_neighbor(scale(x, 1.0 - hr));
        rad_[2] = make_neighbor(scale(x, 1.0 + hr / 2));
        rad_[3] = make_neighbor(scale(x, 1.0 - hr / 2));
    }

    const WeylFrame& center() const { return center_->frame; }
    bool jittered() const { return center_->jittered; }
    const SpatialPoint& x() const { return x_; }

    CMatrix v(double z) const { return center_->frame.eval_v_pair(z); }

    CMatrix dv_dx(int i, double z) const {
        auto d_at = [&](const std::array<std::unique_ptr<FrameResult>, 6>& nb, double hh) {
            const CMatrix vp = nb[size_t(2 * i)]->frame.eval_v_pair(z);
            const CMatrix vm = nb[size_t(2 * i + 1)]->frame.eval_v_pair(z);
            return (vp - vm) * (cplx(1.0) / (2.0 * hh));
        };
        CMatrix d = d_at(nb_, h_);
        if (!cfg_.richardson_fd) return d;
        CMatrix d2 = d_at(nb2_, h_ / 2);
        return (4.0 / 3.0) * d2 - (1.0 / 3.0) * d;
    }

    CMatrix dv_dr2(double z) const {
        const double r = x_.r();
        const double hr = h_ / std::max(r, 1e-12);
        auto d_at = [&](int ip, int im, double f) {
            const double r2p = r * r * (1 + f) * (1 + f), r2m = r * r * (1 - f) * (1 - f);
            return (rad_[size_t(ip)]->frame.eval_v_pair(z) - rad_[size_t(im)]->frame.eval_v_pair(z)) *
                   (cplx(1.0) / (r2p - r2m));
        };
        CMatrix d = d_at(0, 1, hr);
        CMatrix d2 = d_at(2, 3, hr / 2);
        return (4.0 / 3.0) * d2 - (1.0 / 3.0) * d;
    }

    // (x cross grad)_i v
    CMatrix rot_v(int i, double z) const {
        const int p = (i + 1) % 3, q = (i + 2) % 3;
        const double xs[3] = {x_.x1, x_.x2, x_.x3};
        return xs[p] * dv_dx(q, z) - xs[q] * dv_dx(p, z);
    }

    // ---- field values ------------------------------------------------------

    CMatrix gram_quadrature() const {
        CMatrix g(2, 2);
        for (size_t i = 0; i < quad_.z.size(); ++i) {
            const CMatrix vp = v(quad_.z[i]);
            g += quad_.w[i] * (vp.dagger() * vp);
        }
        return g;
    }

    CMatrix higgs_quadrature() const {
        CMatrix g(2, 2);
        for (size_t i = 0; i < quad_.z.size(); ++i) {
            const CMatrix vp = v(quad_.z[i]);
            g += (quad_.w[i] * quad_.z[i]) * (vp.dagger() * vp);
        }
        return I * g;
    }

    CMatrix gauge_quadrature(int i) const {
        CMatrix g(2, 2);
        for (size_t k = 0; k < quad_.z.size(); ++k) {
            const CMatrix vp = v(quad_.z[k]);
            g += quad_.w[k] * (vp.dagger() * dv_dx(i, quad_.z[k]));
        }
        return g;
    }

    CMatrix gram_boundary() const {
        return boundary_difference([&](double z, const PanagopoulosKernel& k) {
            const CMatrix vp = v(z);
            return vp.dagger() * (k.inverse() * vp);
        });
    }

    CMatrix higgs_boundary() const {
        CMatrix val = boundary_difference([&](double z, const PanagopoulosKernel& k) {
            const CMatrix vp = v(z);
            const CMatrix rhs = cplx(z) * vp - 2.0 * (k.H * dv_dr2(z));
            return vp.dagger() * (k.inverse() * rhs);
        });
        return I * val;
    }

    CMatrix gauge_boundary(int i) const {
        const double r2 = x_.r2();
        const double xs[3] = {x_.x1, x_.x2, x_.x3};
        return boundary_difference([&](double z, const PanagopoulosKernel& k) {
            const CMatrix vp = v(z);
            CMatrix rhs = dv_dx(i, z) - (cplx(z * xs[i] / r2)) * (k.H * vp) +
                          (I / r2) * (k.H * rot_v(i, z));
            return vp.dagger() * (k.inverse() * rhs);
        });
    }

    CMatrix higgs() const {
        if (cfg_.prefer_boundary) {
            try {
                return higgs_boundary();
            } catch (const QSingular&) {
            } catch (const SingularMatrix&) {
            }
        }
        return higgs_quadrature();
    }

    CMatrix gauge(int i) const {
        if (cfg_.prefer_boundary) {
            try {
                return gauge_boundary(i);
            } catch (const QSingular&) {
            } catch (const SingularMatrix&) {
            }
        }
        return gauge_quadrature(i);
    }

    double phi_norm() const {
        const CMatrix p = higgs();
        const cplx tr = (p * p).trace();
        return std::sqrt(std::max(0.0, -0.5 * tr.real()));
    }

  private:
    static SpatialPoint shift(SpatialPoint x, int i, double d) {
        if (i == 0) x.x1 += d;
        if (i == 1) x.x2 += d;
        if (i == 2) x.x3 += d;
        return x;
    }
    static SpatialPoint scale(SpatialPoint x, double f) {
        x.x1 *= f;
        x.x2 *= f;
        x.x3 *= f;
        return x;
    }

    std::unique_ptr<FrameResult> make_neighbor(const SpatialPoint& xn) {
        auto fr = std::make_unique<FrameResult>(assemble_frame(*b_, *flow_, xn, cfg_.weyl));
        align(fr->frame, center_->frame);
        return fr;
    }

    // rotate f's normalizable basis to match ref's (unitary polar of overlap)
    void align(WeylFrame& f, const WeylFrame& ref) const {
        CMatrix o(2, 2);
        for (size_t i = 0; i < quad_.z.size(); ++i) {
            const CMatrix a = ref.eval_v_pair(quad_.z[i]);
            const CMatrix bb = f.eval_v_pair(quad_.z[i]);
            o += quad_.w[i] * (a.dagger() * bb);
        }
        f.rotate_basis(detail::polar_unitary(o));
    }

    template <typename F>
    CMatrix boundary_difference(const F& f) const {
        // Four delta levels starting at 4*delta0: small enough for the series
        // truncation, large enough that cond(Q) ~ 1/delta^2 does not amplify
        // the flow error above the quadrature-equivalence tolerances.
        const double d0 = 4.0 * cfg_.delta_boundary;
        auto level = [&](double d) {
            const double zp = 1.0 - d, zm = -1.0 + d;
            const PanagopoulosKernel kp = q_kernel(x_, reconstruct_nahm(*b_, *flow_, zp),
                                                   cfg_.q_cond_cap);
            const PanagopoulosKernel km = q_kernel(x_, reconstruct_nahm(*b_, *flow_, zm),
                                                   cfg_.q_cond_cap);
            return f(zp, kp) - f(zm, km);
        };
        const CMatrix f1 = level(d0), f2 = level(2 * d0), f4 = level(4 * d0),
                      f8 = level(8 * d0);
        // Richardson eliminating the delta, delta^2 and delta^3 terms
        return (64.0 / 21.0) * f1 - (8.0 / 3.0) * f2 + (2.0 / 3.0) * f4 - (1.0 / 21.0) * f8;
    }

    const AbelianBundle* b_;
    const FlowState* flow_;
    SpatialPoint x_;
    FieldConfig cfg_;
    double h_ = 1e-3;
    detail::ZQuad quad_;
    std::unique_ptr<FrameResult> center_;
    std::array<std::unique_ptr<FrameResult>, 6> nb_, nb2_;
    std::array<std::unique_ptr<FrameResult>, 4> rad_;
};

// ---- samples and the Bogomolny residual ------------------------------------------

struct FieldSample {
    SpatialPoint x;
    CMatrix Phi;
    std::array<CMatrix, 3> A;
    double phi_norm = 0;
    double bogomolny_residual = -1;  // < 0: not evaluated
    int bogomolny_sign = 0;
    double bogomolny_factor = 0;
    bool jittered = false;
    std::string status = "ok";
};

inline FieldSample field_sample(const AbelianBundle& b, const FlowState& flow,
                                const SpatialPoint& x, const FieldConfig& cfg = {}) {
    FieldPoint fp(b, flow, x, cfg);
    FieldSample s;
    s.x = x;
    s.Phi = fp.higgs();
    for (int i = 0; i < 3; ++i) s.A[size_t(i)] = fp.gauge(i);
    const cplx tr = (s.Phi * s.Phi).trace();
    s.phi_norm = std::sqrt(std::max(0.0, -0.5 * tr.real()));
    s.jittered = fp.jittered();
    return s;
}

struct BogomolnyResult {
    double residual = 0;
    int sign = +1;       // detected +- branch
    double factor = 1.0; // detected overall factor on the epsilon sum
    double field_scale = 0;
};

// FD residual of D_i Phi = sign * factor * sum_{j,k} eps_{ijk} F_{jk};
// sign and factor are auto-detected and reported.
inline BogomolnyResult bogomolny_residual(const AbelianBundle& b, const FlowState& flow,
                                          const SpatialPoint& x, double h_in = 0,
                                          FieldConfig cfg = {}) {
    cfg.prefer_boundary = false;  // quadrature path for stencil robustness
    const double h = (h_in > 0) ? h_in : 1e-3 * std::max(1.0, x.r());

    FieldPoint center(b, flow, x, cfg);
    const CMatrix phi0 = center.higgs();
    std::array<CMatrix, 3> a0;
    for (int i = 0; i < 3; ++i) a0[size_t(i)] = center.gauge(i);

    auto fields_at = [&](const SpatialPoint& xx) {
        FieldPoint fp(b, flow, xx, cfg, &center.center());
        std::array<CMatrix, 4> out;  // Phi, A1, A2, A3
        out[0] = fp.higgs();
        for (int i = 0; i < 3; ++i) out[size_t(i + 1)] = fp.gauge(i);
        return out;
    };

    auto shift = [&](int j, double d) {
        SpatialPoint xx = x;
        if (j == 0) xx.x1 += d;
        if (j == 1) xx.x2 += d;
        if (j == 2) xx.x3 += d;
        return xx;
    };

    // level(h): dPhi[j], dA[j][i]
    struct Level {
        std::array<CMatrix, 3> dPhi;
        std::array<std::array<CMatrix, 3>, 3> dA;  // dA[j][i] = d_j A_i
    };
    auto level = [&](double hh) {
        Level lv;
        for (int j = 0; j < 3; ++j) {
            auto fp = fields_at(shift(j, hh));
            auto fm = fields_at(shift(j, -hh));
            lv.dPhi[size_t(j)] = (fp[0] - fm[0]) * (cplx(1.0) / (2.0 * hh));
            for (int i = 0; i < 3; ++i)
                lv.dA[size_t(j)][size_t(i)] =
                    (fp[size_t(i + 1)] - fm[size_t(i + 1)]) * (cplx(1.0) / (2.0 * hh));
        }
        return lv;
    };

    Level l1 = level(h);
    Level lfin = l1;
    if (cfg.richardson_fd) {
        Level l2 = level(0.5 * h);
        for (int j = 0; j < 3; ++j) {
            lfin.dPhi[size_t(j)] = (4.0 / 3.0) * l2.dPhi[size_t(j)] - (1.0 / 3.0) * l1.dPhi[size_t(j)];
            for (int i = 0; i < 3; ++i)
                lfin.dA[size_t(j)][size_t(i)] = (4.0 / 3.0) * l2.dA[size_t(j)][size_t(i)] -
                                                (1.0 / 3.0) * l1.dA[size_t(j)][size_t(i)];
        }
    }

    std::array<CMatrix, 3> DPhi, B;
    for (int i = 0; i < 3; ++i) {
        DPhi[size_t(i)] = lfin.dPhi[size_t(i)] + a0[size_t(i)] * phi0 - phi0 * a0[size_t(i)];
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        CMatrix fjk = lfin.dA[size_t(j)][size_t(k)] - lfin.dA[size_t(k)][size_t(j)] +
                      a0[size_t(j)] * a0[size_t(k)] - a0[size_t(k)] * a0[size_t(j)];
        B[size_t(i)] = 2.0 * fjk;  // sum_{j,k} eps_{ijk} F_{jk}
    }

    BogomolnyResult out;
    for (auto& m : DPhi) out.field_scale = std::max(out.field_scale, m.max_abs());
    double best = std::numeric_limits<double>::infinity();
    for (int sgn : {+1, -1})
        for (double fac : {1.0, 0.5}) {
            double r = 0;
            for (int i = 0; i < 3; ++i)
                r = std::max(r, (DPhi[size_t(i)] - (double(sgn) * fac) * B[size_t(i)]).frobenius());
            if (r < best) {
                best = r;
                out.sign = sgn;
                out.factor = fac;
            }
        }
    out.residual = best;
    return out;
}

}  // namespace monopole
