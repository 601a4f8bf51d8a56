#pragma once

// Numeric abelian engine for genus-1 spectral curves eta^2 = Q(zeta) with Q a
// quartic (charge 2, a_1 = 0). Periods, Abel maps and second-kind integrals
// are computed by contour quadrature with continuous branch tracking; points
// over zeta = infinity are handled in the coordinate u = 1/zeta where the
// integrands are regular.
//
// All quadrature runs on the unit-normalized curve eta_u^2 = Q(zeta)/q4, so
// branch-tracking decisions are independent of the curve scale; results carry
// the exact scale factor sqrt(q4). All integrals share one deterministic path
// system, so Abel images and gamma-integrals are consistent path-class-wise.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "monopole/detail/poly.hpp"
#include "monopole/detail/quadrature.hpp"
#include "monopole/errors.hpp"
#include "monopole/spectral_curve.hpp"
#include "monopole/theta.hpp"

namespace monopole {

struct G1PathIntegrals {
    cplx holo = 0;   // integral of d(zeta)/eta along the path
    cplx gamma = 0;  // integral of gamma_infinity along the path
};

class G1Engine {
  public:
    struct Point {
        cplx zeta, eta;
    };

    G1Engine(const SpectralCurve& curve, std::vector<cplx> rho) : rho_(std::move(rho)) {
        if (curve.n != 2) throw Unsupported("G1Engine: charge-2 curves only");
        if (curve.a[0].max_abs_coeff() > 1e-12 * curve.coeff_scale())
            throw Unsupported("G1Engine: centered curves (a1 = 0) only");
        detail::Poly Q = curve.a[1];
        for (auto& c : Q.c) c = -c;  // Q = -a2
        Q.c.resize(5, 0.0);
        q4_ = Q.c[4];
        if (std::abs(q4_) < 1e-14) throw DegenerateLeadingForm("G1Engine: quartic degenerates");
        scale_ = std::sqrt(q4_);
        Qu_ = Q;
        for (auto& c : Qu_.c) c /= q4_;

        for (std::size_t j = 0; j < rho_.size(); ++j) {
            const cplx r = rho_[j] / scale_;
            if (std::min(std::abs(r - 1.0), std::abs(r + 1.0)) > 1e-8)
                throw DegenerateLeadingForm("G1Engine: rho inconsistent with curve scale");
            rho_unit_.push_back(std::abs(r - 1.0) < std::abs(r + 1.0) ? 1.0 : -1.0);
        }

        auto roots = detail::poly_roots(Qu_, 4);
        if (roots.finite.size() != 4)
            throw DegenerateLeadingForm("G1Engine: branch points at infinity");
        std::copy(roots.finite.begin(), roots.finite.end(), branch_.begin());
        pair_cuts();

        base_zeta_ = choose_base_zeta();
        base_eta_u_ = std::sqrt(Qu_.eval(base_zeta_));

        compute_periods();
    }

    const std::array<cplx, 4>& branch_points() const { return branch_; }
    Point base_point() const { return {base_zeta_, scale_ * base_eta_u_}; }
    cplx tau() const { return tau_; }
    cplx a_period() const { return Pa1u_ / scale_; }  // of d(zeta)/eta
    cplx beta() const { return q4_ * beta_u_; }
    cplx winding_U() const { return U_; }

    PeriodMatrix period_matrix() const {
        PeriodMatrix pm;
        pm.g = 1;
        pm.tau = CMatrix(1, 1);
        pm.tau(0, 0) = tau_;
        return pm;
    }

    // ---- path integrals from the base point --------------------------------

    G1PathIntegrals integrate_to(const Point& p) const {
        for (cplx b : branch_)
            if (std::abs(p.zeta - b) < 1e-8)
                throw PathCrossesBranchPoint("G1Engine: target too close to a branch point");
        const cplx eta_u = p.eta / scale_;
        std::vector<cplx> way;
        route(base_zeta_, p.zeta, way);
        Walker w{Qu_, base_zeta_, base_eta_u_};
        G1PathIntegrals acc;  // unit-curve values
        integrate_polyline(w, way, acc);
        if (std::abs(w.eta - eta_u) > std::abs(w.eta + eta_u)) {
            append_sheet_flip(w, acc);
            if (std::abs(w.eta - eta_u) > 1e-6 * (std::abs(eta_u) + 1.0))
                throw PathCrossesBranchPoint("G1Engine: sheet continuation mismatch");
        }
        return {acc.holo / scale_, scale_ * acc.gamma};
    }

    cplx abel(const Point& p) const {
        // ratio of unit-curve quantities; scale cancels
        const cplx eta_u = p.eta / scale_;
        std::vector<cplx> way;
        route(base_zeta_, p.zeta, way);
        Walker w{Qu_, base_zeta_, base_eta_u_};
        G1PathIntegrals acc;
        integrate_polyline(w, way, acc);
        if (std::abs(w.eta - eta_u) > std::abs(w.eta + eta_u)) append_sheet_flip(w, acc);
        return acc.holo / Pa1u_;
    }

    // ---- infinities ---------------------------------------------------------

    // j indexes the bundle's rho vector: the sheet with eta/zeta^2 -> rho_j.
    G1PathIntegrals integrate_to_infinity(int j, cplx* nu_out = nullptr,
                                          cplx* abel_out = nullptr) const {
        const double R0 = 3.0;
        const cplx zr = R0 * std::exp(I * 1.1);
        std::vector<cplx> way;
        route(base_zeta_, zr, way);
        Walker w{Qu_, base_zeta_, base_eta_u_};
        G1PathIntegrals acc;
        integrate_polyline(w, way, acc);

        const cplx rho_u = rho_unit_[size_t(j)];
        const cplx u_start = 1.0 / w.zeta;
        cplx w_start = u_start * u_start * w.eta;
        if (std::abs(continue_w_to_zero(u_start, w_start) - rho_u) > 0.5) {
            append_sheet_flip(w, acc);
            w_start = u_start * u_start * w.eta;
            if (std::abs(continue_w_to_zero(u_start, w_start) - rho_u) > 1e-6)
                throw PathCrossesBranchPoint("G1Engine: failed to reach requested infinity");
        }

        cplx nu_u = 0;
        tail_to_infinity(u_start, w_start, rho_u, acc, &nu_u);
        if (nu_out) *nu_out = scale_ * nu_u;
        if (abel_out) *abel_out = acc.holo / Pa1u_;
        return {acc.holo / scale_, scale_ * acc.gamma};
    }

    cplx abel_infinity(int j) const {
        cplx a;
        integrate_to_infinity(j, nullptr, &a);
        return a;
    }

    // nu_j: constant term of int(gamma) in the local coordinate u = 1/zeta
    cplx nu_infinity(int j) const {
        cplx nu = 0;
        integrate_to_infinity(j, &nu);
        return nu;
    }

    // ---- independent checks --------------------------------------------------

    // a-period of gamma_infinity on an offset contour (should vanish)
    cplx gamma_a_period_check() const {
        return scale_ * closed_contour(cut_contour(0, 0.55)).gamma;
    }
    cplx gamma_b_period() const { return scale_ * closed_contour(b_contour(0.45)).gamma * bsign_; }

    // odd theta and its derivative at 0 (prime-form ingredients)
    cplx vtheta(cplx v) const {
        ThetaChar ch{{1}, {1}};
        return theta_char(ch, {v}, period_matrix());
    }
    cplx vtheta_d0() const {
        const PeriodMatrix pm = period_matrix();
        const cplx a = 0.5, b = 0.5;
        const cplx w0 = b + tau_ * a;
        const cplx phase = std::exp(M_PI * I * a * a * tau_ + 2.0 * M_PI * I * a * (0.0 + b));
        auto tv = theta_full({w0}, pm, {}, /*want_gradient=*/true);
        return phase * (2.0 * M_PI * I * a * tv.value + tv.gradient[0]);
    }

  private:
    struct Walker {
        const detail::Poly& Q;
        cplx zeta, eta;
        void advance(cplx znew, int depth = 0) {
            const cplx s = std::sqrt(Q.eval(znew));
            const double dp = std::abs(s - eta), dm = std::abs(-s - eta);
            if (depth < 24 && std::min(dp, dm) > 0.5 * std::max(dp, dm) &&
                std::abs(znew - zeta) > 1e-13) {
                advance(0.5 * (zeta + znew), depth + 1);  // ambiguous: refine
                advance(znew, depth + 1);
                return;
            }
            eta = (dp <= dm) ? s : -s;
            zeta = znew;
        }
    };

    double clearance(cplx z) const {
        double d = 1e300;
        for (cplx b : branch_) d = std::min(d, std::abs(z - b));
        return d;
    }

    cplx choose_base_zeta() const {
        for (cplx cand : {cplx(0.0), cplx(0.0, 0.12), cplx(0.17, 0.05), cplx(-0.11, -0.07)})
            if (clearance(cand) > 0.25) return cand;
        throw PathCrossesBranchPoint("G1Engine: no clear base point");
    }

    void pair_cuts() {
        static const int opts[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
        double best = 1e300;
        for (auto& o : opts) {
            const double len =
                std::abs(branch_[o[0]] - branch_[o[1]]) + std::abs(branch_[o[2]] - branch_[o[3]]);
            if (len < best) {
                best = len;
                cut_[0] = {branch_[o[0]], branch_[o[1]]};
                cut_[1] = {branch_[o[2]], branch_[o[3]]};
            }
        }
    }

    // closed elliptical contour around cut k with tip margin m (relative)
    std::vector<cplx> cut_contour(int k, double m) const {
        const cplx p = cut_[k][0], q = cut_[k][1];
        const cplx mid = 0.5 * (p + q), half = 0.5 * (q - p);
        std::vector<cplx> way;
        const int N = 96;
        for (int i = 0; i <= N; ++i) {
            const double t = 2.0 * M_PI * i / N;
            way.push_back(mid + half * ((1.0 + m) * std::cos(t) + I * m * 1.2 * std::sin(t)));
        }
        return way;
    }

    // contour around one endpoint of each cut (the closest cross-cut pair)
    std::vector<cplx> b_contour(double m) const {
        double best = 1e300;
        cplx p, q;
        for (auto& e1 : cut_[0])
            for (auto& e2 : cut_[1])
                if (std::abs(e1 - e2) < best) {
                    best = std::abs(e1 - e2);
                    p = e1;
                    q = e2;
                }
        const cplx mid = 0.5 * (p + q), half = 0.5 * (q - p);
        std::vector<cplx> way;
        const int N = 128;
        for (int i = 0; i <= N; ++i) {
            const double t = 2.0 * M_PI * i / N;
            way.push_back(mid + half * ((1.0 + m) * std::cos(t) + I * m * 1.4 * std::sin(t)));
        }
        return way;
    }

    void route(cplx a, cplx b, std::vector<cplx>& way, int depth = 0) const {
        if (depth == 0) way.push_back(a);
        const double rmin = 0.22 * geometry_scale();
        cplx worst;
        double worst_d = 1e300;
        bool found = false;
        for (cplx bp : branch_) {
            const cplx ab = b - a;
            const double L2 = std::norm(ab);
            double t = L2 > 0 ? std::clamp(((bp - a) * std::conj(ab)).real() / L2, 0.0, 1.0) : 0.0;
            const double d = std::abs(a + t * ab - bp);
            if (d < rmin && d < worst_d && t > 1e-9 && t < 1.0 - 1e-9) {
                worst_d = d;
                worst = bp;
                found = true;
            }
        }
        if (found && depth < 8) {
            const cplx ab = b - a;
            const cplx n = I * ab / std::abs(ab);
            const cplx c1 = worst + n * (1.8 * rmin), c2 = worst - n * (1.8 * rmin);
            const cplx c = (clearance(c1) >= clearance(c2)) ? c1 : c2;
            route(a, c, way, depth + 1);
            route(c, b, way, depth + 1);
            return;
        }
        way.push_back(b);
    }

    double geometry_scale() const {
        double s = 0;
        for (cplx b : branch_) s = std::max(s, std::abs(b));
        return std::max(s, 1.0);
    }

    // integrate {dzeta/eta_u, gamma_u} along a polyline on the unit curve
    void integrate_polyline(Walker& w, const std::vector<cplx>& way, G1PathIntegrals& acc) const {
        for (size_t i = 0; i + 1 < way.size(); ++i) segment(w, way[i], way[i + 1], acc);
    }

    void segment(Walker& w, cplx a, cplx b, G1PathIntegrals& acc) const {
        if (std::abs(w.zeta - a) > 1e-12) w.advance(a);
        const double len = std::abs(b - a);
        if (len < 1e-15) return;
        const double clear = std::min(clearance(a), clearance(b));
        const int nsub = std::max(1, int(std::ceil(len / std::max(0.15 * clear, 1e-3))));
        for (int s = 0; s < nsub; ++s) {
            const cplx za = a + (b - a) * (double(s) / nsub);
            const cplx zb = a + (b - a) * (double(s + 1) / nsub);
            const auto& g = detail::gauss_legendre(16);
            const cplx mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
            for (int i = 0; i < 16; ++i) {
                const cplx z = mid + half * g.x[i];
                w.advance(z);
                const cplx dz = half * g.w[i];
                acc.holo += dz / w.eta;
                acc.gamma += (-z * z + beta_u_) * dz / w.eta;
            }
            w.advance(zb);
        }
    }

    void append_sheet_flip(Walker& w, G1PathIntegrals& acc) const {
        cplx b = branch_[0];
        for (cplx bp : branch_)
            if (std::abs(w.zeta - bp) < std::abs(w.zeta - b)) b = bp;
        const double r = 0.3 * geometry_scale();
        const cplx start = w.zeta;
        const cplx p0 = b + r * (w.zeta - b) / std::abs(w.zeta - b);
        std::vector<cplx> way{start, p0};
        const double ang0 = std::arg(p0 - b);
        for (int i = 1; i <= 48; ++i)
            way.push_back(b + r * std::exp(I * (ang0 + 2.0 * M_PI * i / 48.0)));
        way.push_back(start);
        integrate_polyline(w, way, acc);
    }

    cplx continue_w_to_zero(cplx u_start, cplx w_start) const {
        cplx u = u_start, w = w_start;
        for (int i = 1; i <= 32; ++i) {
            const cplx un = u_start * (1.0 - double(i) / 32.0);
            const cplx s = std::sqrt(qtilde(un));
            w = (std::abs(s - w) <= std::abs(-s - w)) ? s : -s;
            u = un;
        }
        return w;
    }

    cplx qtilde(cplx u) const {  // u^4 Q_u(1/u)
        return Qu_.c[4] + Qu_.c[3] * u + Qu_.c[2] * u * u + Qu_.c[1] * u * u * u +
               Qu_.c[0] * u * u * u * u;
    }

    // unit-curve tail from u_start to 0 on the sheet with w(0) = rho_u = +-1
    void tail_to_infinity(cplx u_start, cplx w_start, cplx rho_u, G1PathIntegrals& acc,
                          cplx* nu_u) const {
        const int N = 48;
        const auto& g = detail::gauss_legendre(N);
        cplx w = w_start;
        cplx holo = 0, gamma_reg = 0;
        for (int i = 0; i < N; ++i) {
            const double t = 0.5 * (1.0 - g.x[i]);
            const cplx u = u_start * t;
            const cplx s = std::sqrt(qtilde(u));
            w = (std::abs(s - w) <= std::abs(-s - w)) ? s : -s;
            const cplx du = -u_start * 0.5 * g.w[i];
            holo += -du / w;
            const cplx sing_removed = (1.0 / w - rho_u) / (u * u) - beta_u_ / w;
            gamma_reg += sing_removed * du;
        }
        acc.holo += holo;
        acc.gamma += gamma_reg;
        if (nu_u) *nu_u = acc.gamma + rho_u / u_start;
    }

    G1PathIntegrals closed_contour(const std::vector<cplx>& way) const {
        std::vector<cplx> lead;
        route(base_zeta_, way.front(), lead);
        Walker w{Qu_, base_zeta_, base_eta_u_};
        G1PathIntegrals skip;
        integrate_polyline(w, lead, skip);
        G1PathIntegrals acc;
        integrate_polyline(w, way, acc);
        return acc;
    }

    void compute_periods() {
        auto contourA = cut_contour(0, 0.4);
        auto contourB = b_contour(0.35);

        auto periods = [&](const std::vector<cplx>& way, cplx& p1, cplx& pz2) {
            std::vector<cplx> lead;
            route(base_zeta_, way.front(), lead);
            Walker w{Qu_, base_zeta_, base_eta_u_};
            G1PathIntegrals skip;
            integrate_polyline(w, lead, skip);
            p1 = 0;
            pz2 = 0;
            for (size_t i = 0; i + 1 < way.size(); ++i) {
                const cplx a = way[i], b = way[i + 1];
                if (std::abs(w.zeta - a) > 1e-12) w.advance(a);
                const double len = std::abs(b - a);
                const double clear = std::min(clearance(a), clearance(b));
                const int nsub = std::max(1, int(std::ceil(len / std::max(0.15 * clear, 1e-3))));
                for (int s = 0; s < nsub; ++s) {
                    const cplx za = a + (b - a) * (double(s) / nsub);
                    const cplx zb = a + (b - a) * (double(s + 1) / nsub);
                    const auto& g = detail::gauss_legendre(16);
                    const cplx mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
                    for (int k = 0; k < 16; ++k) {
                        const cplx z = mid + half * g.x[k];
                        w.advance(z);
                        const cplx dz = half * g.w[k];
                        p1 += dz / w.eta;
                        pz2 += z * z * dz / w.eta;
                    }
                    w.advance(zb);
                }
            }
        };

        periods(contourA, Pa1u_, Paz2u_);
        cplx Pb1u, Pbz2u;
        periods(contourB, Pb1u, Pbz2u);
        if (std::abs(Pa1u_) < 1e-12) throw ConvergenceFailure("G1Engine: vanishing a-period");
        tau_ = Pb1u / Pa1u_;
        bsign_ = 1.0;
        if (tau_.imag() < 0) {
            bsign_ = -1.0;
            Pb1u = -Pb1u;
            Pbz2u = -Pbz2u;
            tau_ = -tau_;
        }
        beta_u_ = Paz2u_ / Pa1u_;
        U_ = scale_ * (-Pbz2u + beta_u_ * Pb1u) / (2.0 * M_PI * I);
    }

    detail::Poly Qu_;
    cplx q4_, scale_;
    std::array<cplx, 4> branch_;
    std::array<std::array<cplx, 2>, 2> cut_;
    std::vector<cplx> rho_, rho_unit_;
    cplx base_zeta_, base_eta_u_;
    cplx Pa1u_, Paz2u_;
    cplx tau_, beta_u_, U_;
    double bsign_ = 1.0;
};

}  // namespace monopole
