#pragma once

// Assembles the 2n fundamental solutions of Delta w = 0 from the Nahm ansatz,
// forms V = (W^dagger)^{-1}, and extracts the two normalizable solutions of
// Delta^dagger v = 0.
//
// Column for a finite Atiyah-Ward point P_k:
//   w^(k)(x,z) = (1 + u(P_k).sigma)|s> exp(-i z[(x1-i x2) zeta_k - i x3 - x4])
//                (x) C(z) Phi(P_k, z)
// For a root at zeta = infinity on sheet j (possible only when
// rho_j = -i x1 - x2) the column degenerates to
//   w = (1 + u(inf).sigma)|s> (x) C(z) e^{x3 z} e_j .

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "monopole/detail/eigen_bridge.hpp"
#include "monopole/nahm_flow.hpp"

namespace monopole {

struct WeylParams {
    double delta_classify = 1e-3;   // z-standoff for boundary classification
    double quad_edge = 2e-4;        // endpoint truncation of z-quadratures
    int mid_nodes = 64;             // Gauss nodes on the middle panel
    int edge_nodes = 48;            // Gauss nodes per endpoint panel (in u = sqrt(1-z))
    double jitter = 1e-6;
};

namespace detail {

// +1 eigenvector of u.sigma, from the larger-magnitude branch
inline std::vector<cplx> plus_spinor(const std::array<double, 3>& u) {
    const double n1 = 1.0 + u[2];
    if (n1 > 1e-8) {
        const double nn = std::sqrt(2.0 * n1);
        return {cplx(n1 / nn), cplx(u[0] / nn, u[1] / nn)};
    }
    const double n2 = 1.0 - u[2];
    const double nn = std::sqrt(2.0 * n2);
    return {cplx(u[0] / nn, -u[1] / nn), cplx(n2 / nn)};
}

// fixed z-quadrature nodes with endpoint substitution z = +-(1 - u^2)
struct ZQuad {
    std::vector<double> z, w;
};

inline ZQuad build_z_quadrature(double zmax, const WeylParams& prm) {
    ZQuad q;
    const auto& mid = gauss_legendre(prm.mid_nodes);
    for (int i = 0; i < prm.mid_nodes; ++i) {
        q.z.push_back(0.8 * mid.x[i]);
        q.w.push_back(0.8 * mid.w[i]);
    }
    const double u_hi = std::sqrt(1.0 - 0.8);
    const double u_lo = std::sqrt(1.0 - zmax);
    const auto& edge = gauss_legendre(prm.edge_nodes);
    for (int i = 0; i < prm.edge_nodes; ++i) {
        const double u = 0.5 * (u_hi + u_lo) + 0.5 * (u_hi - u_lo) * edge.x[i];
        const double wu = 0.5 * (u_hi - u_lo) * edge.w[i] * 2.0 * u;
        q.z.push_back(1.0 - u * u);
        q.w.push_back(wu);
        q.z.push_back(-(1.0 - u * u));
        q.w.push_back(wu);
    }
    return q;
}

}  // namespace detail

class WeylFrame {
  public:
    WeylFrame(const AbelianBundle& b, const FlowState& flow, const SpatialPoint& x,
              const WeylParams& prm = {})
        : b_(&b), flow_(&flow), x_(x), prm_(prm) {
        auto pts = atiyah_ward_roots(b.curve, x);
        // reproducible ordering: finite roots lexicographically, infinities last
        std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& c) {
            if (a.at_infinity != c.at_infinity) return !a.at_infinity;
            if (a.zeta.real() != c.zeta.real()) return a.zeta.real() < c.zeta.real();
            return a.zeta.imag() < c.zeta.imag();
        });
        if (int(pts.size()) != 2 * b.n) throw RankDeficientW("WeylFrame: wrong root count");
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            if (pts[i].at_infinity && pts[i + 1].at_infinity)
                throw RankDeficientW("WeylFrame: coincident roots at infinity");
            if (!pts[i].at_infinity && !pts[i + 1].at_infinity &&
                std::abs(pts[i].zeta - pts[i + 1].zeta) < 1e-7 * (1.0 + std::abs(pts[i].zeta)))
                throw RankDeficientW("WeylFrame: coincident Atiyah-Ward roots");
        }
        aw_ = std::move(pts);

        for (const auto& p : aw_) {
            Column col;
            if (p.at_infinity) {
                col.spinor = detail::plus_spinor(u_hat_infinity().u);
                col.exp_coeff = x.x3;
                col.inf_sheet = p.sheet;
            } else {
                col.spinor = detail::plus_spinor(u_hat(p.zeta).u);
                col.exp_coeff = -I * ((x.x1 - I * x.x2) * p.zeta - I * x.x3 - x.x4);
                col.ba = std::make_shared<BAFunction>(b, p);
            }
            for (auto& s : col.spinor) s *= 2.0;  // (1 + u.sigma)|s> = 2|s>
            cols_.push_back(std::move(col));
        }
    }

    const SpatialPoint& x() const { return x_; }
    const AbelianBundle& bundle() const { return *b_; }
    const FlowState& flow() const { return *flow_; }
    const std::vector<CurvePoint>& atiyah_points() const { return aw_; }

    CMatrix eval_W(double z) const {
        const int n = b_->n;
        const CMatrix C = flow_->C(z);
        CMatrix W(2 * n, 2 * n);
        for (int k = 0; k < 2 * n; ++k) {
            const auto& col = cols_[size_t(k)];
            std::vector<cplx> vec;
            if (col.inf_sheet >= 0) {
                vec.assign(size_t(n), 0.0);
                vec[size_t(col.inf_sheet)] = 1.0;
            } else {
                vec = col.ba->eval(z);
            }
            std::vector<cplx> cv = C * vec;
            const cplx ph = std::exp(col.exp_coeff * z);
            for (int s = 0; s < 2; ++s)
                for (int i = 0; i < n; ++i)
                    W(s * n + i, k) = col.spinor[size_t(s)] * cv[size_t(i)] * ph;
        }
        return W;
    }

    CMatrix eval_V(double z) const {
        // (W^dagger)^{-1} computed from a row-equilibrated solve: far from the
        // origin the columns of W carry exponentially disparate scales.
        const CMatrix W = eval_W(z);
        const int m = W.rows();
        CMatrix A = W.dagger();
        std::vector<double> rs(size_t(m), 0.0);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) rs[size_t(i)] = std::max(rs[size_t(i)], std::abs(A(i, j)));
            if (rs[size_t(i)] <= 0) throw RankDeficientW("eval_V: zero column");
            for (int j = 0; j < m; ++j) A(i, j) /= rs[size_t(i)];
        }
        CMatrix V = invert(A).inv;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) V(i, j) /= rs[size_t(j)];
        return V;
    }

    // normalizable pair v_a(z) = V(z) N ortho, columns a = 1,2
    CMatrix eval_v_pair(double z) const {
        if (coeff_.rows() == 0) throw SubspaceAmbiguous("WeylFrame: extract not run");
        return eval_V(z) * coeff_ * ortho_;
    }

    const CMatrix& normalizable_coefficients() const { return coeff_; }
    const CMatrix& gram() const { return gram_; }
    const CMatrix& ortho() const { return ortho_; }
    bool extracted() const { return coeff_.rows() != 0; }

    void set_normalizable(CMatrix coeff, CMatrix gram, CMatrix ortho) {
        coeff_ = std::move(coeff);
        gram_ = std::move(gram);
        ortho_ = std::move(ortho);
    }

    // apply a constant 2x2 transform on the normalizable basis (gauge tests)
    void rotate_basis(const CMatrix& g) { ortho_ = ortho_ * g; }

    double v_w_identity_residual(double z) const {
        const CMatrix W = eval_W(z);
        const CMatrix V = eval_V(z);
        return (V.dagger() * W - CMatrix::identity(2 * b_->n)).max_abs();
    }

  private:
    struct Column {
        std::vector<cplx> spinor;  // 2-vector (1 + u.sigma)|s>
        cplx exp_coeff{0.0};
        std::shared_ptr<BAFunction> ba;  // finite points
        int inf_sheet = -1;              // >= 0 for roots at infinity
    };

    const AbelianBundle* b_;
    const FlowState* flow_;
    SpatialPoint x_;
    WeylParams prm_;
    std::vector<CurvePoint> aw_;
    std::vector<Column> cols_;
    CMatrix coeff_, gram_, ortho_;
};

// one column of W at one z (the spec-level operation)
inline std::vector<cplx> build_w_column(const AbelianBundle& b, const FlowState& flow,
                                        const SpatialPoint& x, const CurvePoint& p, double z) {
    const int n = b.n;
    std::vector<cplx> spinor;
    std::vector<cplx> vec;
    cplx coeff;
    if (p.at_infinity) {
        spinor = detail::plus_spinor(u_hat_infinity().u);
        coeff = x.x3;
        vec.assign(size_t(n), 0.0);
        vec[size_t(p.sheet)] = 1.0;
    } else {
        spinor = detail::plus_spinor(u_hat(p.zeta).u);
        coeff = -I * ((x.x1 - I * x.x2) * p.zeta - I * x.x3 - x.x4);
        BAFunction ba(b, p);
        vec = ba.eval(z);
    }
    for (auto& s : spinor) s *= 2.0;
    std::vector<cplx> cv = flow.C(z) * vec;
    const cplx ph = std::exp(coeff * z);
    std::vector<cplx> w(size_t(2 * n));
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < n; ++i) w[size_t(s * n + i)] = spinor[size_t(s)] * cv[size_t(i)] * ph;
    return w;
}

// FD residual of Delta w = 0 for one frame column;
// Delta = i d/dz + i x.sigma (x) 1 + sigma (x) T(z)
inline double delta_w_residual(const WeylFrame& f, int k, double z) {
    const auto& b = f.bundle();
    const int n = b.n;
    const double h = 1e-6;
    auto colat = [&](double zz) { return f.eval_W(zz).col(k); };
    auto wp = colat(z + h), wm = colat(z - h), w0 = colat(z);
    const NahmTriple t = reconstruct_nahm(b, f.flow(), z);
    CMatrix op = I * kron(pauli_dot(f.x().vec()), CMatrix::identity(n));
    op += kron(sigma(1), t.t1) + kron(sigma(2), t.t2) + kron(sigma(3), t.t3);
    double res = 0, scale = 0;
    std::vector<cplx> opw = op * w0;
    for (int i = 0; i < 2 * n; ++i) {
        const cplx r = I * (wp[size_t(i)] - wm[size_t(i)]) / (2.0 * h) + opw[size_t(i)];
        res = std::max(res, std::abs(r));
        scale = std::max(scale, std::abs(w0[size_t(i)]));
    }
    return res / std::max(scale, 1e-300);
}

// FD residual of Delta^dagger v = 0 for a coefficient vector c (v = V c)
inline double delta_dagger_residual(const WeylFrame& f, const std::vector<cplx>& c, double z) {
    const auto& b = f.bundle();
    const int n = b.n;
    const double h = 1e-6;
    auto vat = [&](double zz) { return f.eval_V(zz) * c; };
    auto vp = vat(z + h), vm = vat(z - h), v0 = vat(z);
    const NahmTriple t = reconstruct_nahm(b, f.flow(), z);
    CMatrix op = cplx(-1.0) * I * kron(pauli_dot(f.x().vec()), CMatrix::identity(n));
    op -= kron(sigma(1), t.t1) + kron(sigma(2), t.t2) + kron(sigma(3), t.t3);
    double res = 0, scale = 0;
    std::vector<cplx> opv = op * v0;
    for (int i = 0; i < 2 * n; ++i) {
        const cplx r = I * (vp[size_t(i)] - vm[size_t(i)]) / (2.0 * h) + opv[size_t(i)];
        res = std::max(res, std::abs(r));
        scale = std::max(scale, std::abs(v0[size_t(i)]));
    }
    return res / std::max(scale, 1e-300);
}

// ---- normalizable extraction ---------------------------------------------------

namespace detail {

// growing-direction projectors at z = +-1 from the residue representation
inline std::vector<std::vector<cplx>> bad_directions(const AbelianBundle& b,
                                                     const ResidueReport& rep, int side) {
    const int n = b.n;
    CMatrix M(2 * n, 2 * n);
    for (int i = 0; i < 3; ++i) {
        const CMatrix k = kron(sigma(i + 1), rep.residues[size_t(i)]);
        M += (side > 0 ? I : -I) * k;
    }
    auto eig = hermitian_eig(M);  // ascending; bad eigenvalue is -(n+1)/2
    std::vector<std::vector<cplx>> dirs;
    for (int i = 0; i < n - 1; ++i) {
        if (std::abs(eig.values[size_t(i)] + 0.5 * (n + 1)) > 0.2)
            throw SubspaceAmbiguous("bad_directions: unexpected boundary exponent");
        dirs.push_back(eig.vectors.col(i));
    }
    return dirs;
}

}  // namespace detail

inline void extract_normalizable(WeylFrame& frame, const WeylParams& prm = {}) {
    const auto& b = frame.bundle();
    const auto& flow = frame.flow();
    const int n = b.n;

    CMatrix coeff(2 * n, 2);
    if (n == 1) {
        coeff(0, 0) = 1.0;
        coeff(1, 1) = 1.0;
    } else {
        auto rep_p = residue_check(flow, b, +1);
        auto rep_m = residue_check(flow, b, -1);
        auto bad_p = detail::bad_directions(b, rep_p, +1);
        auto bad_m = detail::bad_directions(b, rep_m, -1);

        // Richardson-refined boundary rows: the raw row d^+ V(1 -+ delta) is
        // b delta^{-(n+1)/2} (1 + O(delta)) + leak O(delta^{(n+1)/2}); four
        // delta levels cancel the O(delta..delta^3) terms so the null space
        // carries only O(delta^4) contamination from the growing modes.
        static const double rich_w[4] = {64.0 / 21.0, -8.0 / 3.0, 2.0 / 3.0, -1.0 / 21.0};
        const double growth = 0.5 * (n + 1);
        CMatrix K(2 * n - 2, 2 * n);
        int row = 0;
        auto add_rows = [&](const std::vector<std::vector<cplx>>& dirs, int side) {
            std::vector<CMatrix> V;
            for (int lev = 0; lev < 4; ++lev) {
                const double d = prm.delta_classify * double(1 << lev);
                V.push_back(frame.eval_V(side > 0 ? 1.0 - d : -1.0 + d));
            }
            for (const auto& dvec : dirs) {
                std::vector<cplx> r(size_t(2 * n), 0.0);
                for (int lev = 0; lev < 4; ++lev) {
                    const double d = prm.delta_classify * double(1 << lev);
                    const double s = rich_w[lev] * std::pow(d, growth);
                    for (int j = 0; j < 2 * n; ++j)
                        for (int i = 0; i < 2 * n; ++i)
                            r[size_t(j)] += s * std::conj(dvec[size_t(i)]) * V[size_t(lev)](i, j);
                }
                double nr = norm2(r);
                for (int j = 0; j < 2 * n; ++j) K(row, j) = r[size_t(j)] / nr;
                ++row;
            }
        };
        add_rows(bad_p, +1);
        add_rows(bad_m, -1);

        auto svd = detail::svd(K);
        // K has 2n-2 rows; its null space is the normalizable subspace. A
        // rank drop would enlarge it beyond dimension two.
        const int m = 2 * n;
        if (!svd.sigma.empty() && svd.sigma.back() < 1e-3 * svd.sigma.front())
            throw SubspaceAmbiguous("extract_normalizable: matching map is rank-deficient");
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < m; ++i) coeff(i, a) = svd.v(i, m - 1 - a);
    }

    // Gram by direct z-quadrature of int v_a^dagger v_b dz
    const auto q = detail::build_z_quadrature(flow.z_max(), prm);
    CMatrix gram(2, 2);
    for (size_t i = 0; i < q.z.size(); ++i) {
        const CMatrix V = frame.eval_V(q.z[i]);
        CMatrix vp = V * coeff;  // 2n x 2
        CMatrix g = vp.dagger() * vp;
        gram += q.w[i] * g;
    }

    // ortho = gram^{-1/2} via 2x2 Hermitian eigen-decomposition
    auto eig = detail::hermitian_eig(gram);
    if (eig.values.front() <= 0) throw SubspaceAmbiguous("extract_normalizable: Gram not positive");
    CMatrix ortho(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                ortho(i, j) += eig.vectors(i, k) * (1.0 / std::sqrt(eig.values[size_t(k)])) *
                               std::conj(eig.vectors(j, k));

    frame.set_normalizable(std::move(coeff), std::move(gram), std::move(ortho));
}

// Frame assembly with the degenerate-x jitter fallback.
struct FrameResult {
    WeylFrame frame;
    bool jittered = false;
    SpatialPoint x_used;
};

inline FrameResult assemble_frame(const AbelianBundle& b, const FlowState& flow,
                                  const SpatialPoint& x, const WeylParams& prm = {}) {
    static const double dirs[4][3] = {
        {0.41, 0.73, 0.55}, {-0.62, 0.33, 0.71}, {0.28, -0.84, 0.46}, {0.57, 0.52, -0.63}};
    SpatialPoint xt = x;
    for (int attempt = 0; attempt < 5; ++attempt) {
        try {
            WeylFrame f(b, flow, xt, prm);
            extract_normalizable(f, prm);
            return FrameResult{std::move(f), attempt > 0, xt};
        } catch (const RankDeficientW&) {
        } catch (const DegenerateConstraint&) {
        } catch (const DivisorCollision&) {
        }
        const double eps = prm.jitter * std::max(1.0, x.r()) * (attempt + 1);
        xt = x;
        xt.x1 += eps * dirs[attempt % 4][0];
        xt.x2 += eps * dirs[attempt % 4][1];
        xt.x3 += eps * dirs[attempt % 4][2];
    }
    throw RankDeficientW("assemble_frame: jitter retries exhausted");
}

}  // namespace monopole
