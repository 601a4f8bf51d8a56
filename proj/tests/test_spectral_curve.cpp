#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "monopole/spectral_curve.hpp"

using namespace monopole;

namespace {
std::mt19937 rng(424242);
cplx random_zeta() {
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    return {u(rng), u(rng)};
}
}  // namespace

TEST_CASE("y_of_zeta null vector") {
    auto y0 = y_of_zeta(0.0);
    CHECK(std::abs(y0[0] - cplx(0, -0.5)) < 1e-15);
    CHECK(std::abs(y0[1] - 0.5) < 1e-15);
    CHECK(std::abs(y0[2]) < 1e-15);

    auto y1 = y_of_zeta(1.0);
    CHECK(std::abs(y1[0] - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(y1[1]) < 1e-15);
    CHECK(std::abs(y1[2] + 1.0) < 1e-15);

    for (int t = 0; t < 20; ++t) {
        const cplx z = random_zeta();
        auto y = y_of_zeta(z);
        CHECK(std::abs(dot3(y, y)) < 1e-13);
        // y . conj(y) = (1+|z|^2)^2 / 2
        cplx yc = 0;
        for (int i = 0; i < 3; ++i) yc += y[size_t(i)] * std::conj(y[size_t(i)]);
        const double expect = std::pow(1.0 + std::norm(z), 2) / 2.0;
        CHECK(std::abs(yc - expect) < 1e-12 * expect);
    }
}

TEST_CASE("u_hat values and identities") {
    auto u0 = u_hat(0.0);
    CHECK(std::abs(u0.u[2] - 1.0) < 1e-15);

    auto ui = u_hat(I);
    CHECK(std::abs(ui.u[0] + 1.0) < 1e-15);
    CHECK(std::abs(ui.u[1]) < 1e-15);
    CHECK(std::abs(ui.u[2]) < 1e-15);

    auto uinf = u_hat_infinity();
    CHECK(uinf.u[2] == -1.0);

    for (int t = 0; t < 20; ++t) {
        const cplx z = random_zeta();
        auto u = u_hat(z);
        const double n = u.u[0] * u.u[0] + u.u[1] * u.u[1] + u.u[2] * u.u[2];
        CHECK(std::abs(n - 1.0) < 1e-12);

        auto um = u_hat(-1.0 / std::conj(z));
        for (int i = 0; i < 3; ++i) CHECK(std::abs(um.u[size_t(i)] + u.u[size_t(i)]) < 1e-12);

        // u x y = -i y and u x conj(y) = +i conj(y)
        auto y = y_of_zeta(z);
        std::array<cplx, 3> uc{u.u[0], u.u[1], u.u[2]};
        auto uxy = cross3(uc, y);
        std::array<cplx, 3> yc{std::conj(y[0]), std::conj(y[1]), std::conj(y[2])};
        auto uxyc = cross3(uc, yc);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(uxy[size_t(i)] + I * y[size_t(i)]) < 1e-12);
            CHECK(std::abs(uxyc[size_t(i)] - I * yc[size_t(i)]) < 1e-12);
        }
    }
}

TEST_CASE("eval_curve") {
    // n=1, a1 = 0
    auto c1 = SpectralCurve::make(1, {{}});
    CHECK(std::abs(eval_curve(c1, {cplx(2.3, 1.0), cplx(0.0)})) == 0.0);

    // n=2, eta^2 + a2 with a2 = zeta^4 + 1 (so eta = sqrt(-(zeta^4+1)))
    auto c2 = SpectralCurve::make(2, {{}, {{cplx(1.0), 0, 0, 0, cplx(1.0)}}});
    const cplx zeta = random_zeta();
    const cplx eta = std::sqrt(-(std::pow(zeta, 4) + 1.0));
    CHECK(std::abs(eval_curve(c2, {zeta, eta})) < 1e-12 * curve_scale_at(c2, {zeta, eta}));

    // off-curve matches a Horner oracle
    auto horner = [&](cplx z, cplx e) {
        return e * e + (z * z * z * z + 1.0);
    };
    const cplx e_off = eta + 0.37;
    CHECK(std::abs(eval_curve(c2, {zeta, e_off}) - horner(zeta, e_off)) < 1e-12);

    CHECK_THROWS_AS(SpectralCurve::make(1, {{{cplx(0), cplx(0), cplx(0), cplx(1.0)}}}),
                    SchemaError);
}

TEST_CASE("involution residual") {
    auto c1 = SpectralCurve::make(1, {{}});
    CHECK(involution_residual(c1) < 1e-14);

    // legal-degree but reality-violating sample: n=1, a1 = i zeta (the linear
    // coefficient must be real for H1)
    auto bad = SpectralCurve::make(1, {{{cplx(0.0), I}}});
    CHECK(involution_residual(bad) > 1e-2);

    // H1-symmetric charge-2 family member
    auto good = SpectralCurve::make(
        2, {{}, {{cplx(-2.25), 0, cplx(0.2), 0, cplx(-2.25)}}});
    CHECK(involution_residual(good) < 1e-11);
}

TEST_CASE("atiyah_ward_roots for n=1") {
    auto c1 = SpectralCurve::make(1, {{}});

    // x on the x3 axis: polynomial -2 R zeta, roots {0, infinity}
    auto pts = atiyah_ward_roots(c1, {0, 0, 1.5});
    REQUIRE(pts.size() == 2);
    int inf_count = 0;
    for (auto& p : pts) {
        if (p.at_infinity)
            ++inf_count;
        else
            CHECK(std::abs(p.zeta) < 1e-12);
    }
    CHECK(inf_count == 1);

    // x = (1,0,0): roots +- i
    auto pts2 = atiyah_ward_roots(c1, {1, 0, 0});
    REQUIRE(pts2.size() == 2);
    for (auto& p : pts2) {
        CHECK(!p.at_infinity);
        CHECK(std::abs(std::abs(p.zeta) - 1.0) < 1e-10);
        CHECK(std::abs(p.zeta.real()) < 1e-10);
    }
    // u_hat(i) = (-1,0,0), u_hat(-i) = (1,0,0)
    for (auto& p : pts2) {
        auto u = u_hat(p.zeta);
        CHECK(std::abs(std::abs(u.u[0]) - 1.0) < 1e-10);
    }

    CHECK_THROWS_AS(atiyah_ward_roots(c1, {0, 0, 0}), DegenerateConstraint);
}

TEST_CASE("atiyah_ward_roots: count, on-curve residual, involution closure") {
    auto c2 = SpectralCurve::make(
        2, {{}, {{cplx(-2.25), 0, cplx(0.2), 0, cplx(-2.25)}}});
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 8; ++t) {
        SpatialPoint x{u(rng), u(rng), u(rng)};
        if (x.r() < 0.3) continue;
        auto pts = atiyah_ward_roots(c2, x);
        REQUIRE(pts.size() == 4);
        for (auto& p : pts) {
            if (p.at_infinity) continue;
            CHECK(std::abs(eval_curve(c2, p)) < 1e-8 * curve_scale_at(c2, p));
        }
        // multiset closed under zeta -> -1/conj(zeta)
        for (auto& p : pts) {
            if (p.at_infinity) continue;
            const cplx img = -1.0 / std::conj(p.zeta);
            double best = 1e300;
            for (auto& q : pts) {
                if (q.at_infinity)
                    best = std::min(best, 1.0 / std::abs(p.zeta));  // image of 0 is infinity
                else
                    best = std::min(best, std::abs(q.zeta - img));
            }
            CHECK(best < 1e-7 * (1.0 + std::abs(img)));
        }
    }
}

TEST_CASE("lax matrices") {
    NahmTriple t0{CMatrix(2, 2), CMatrix(2, 2), CMatrix(2, 2)};
    auto lp0 = lax_matrices(t0, cplx(0.7, 0.1));
    CHECK(lp0.l.max_abs() == 0.0);
    CHECK(lp0.m.max_abs() == 0.0);

    // n=1 scalars
    const double c1 = 0.3, c2 = -0.8, c3 = 0.5;
    NahmTriple t1{CMatrix(1, 1, {I * c1}), CMatrix(1, 1, {I * c2}), CMatrix(1, 1, {I * c3})};
    const cplx zeta(0.4, -0.9);
    auto lp = lax_matrices(t1, zeta);
    const cplx expect = I * (c1 + I * c2) - 2.0 * I * (I * c3) * zeta + I * (c1 - I * c2) * zeta * zeta;
    CHECK(std::abs(lp.l(0, 0) - expect) < 1e-14);

    // spin-1/2 residue matrices give a degree-2 curve in eta
    NahmTriple spin{0.5 * I * sigma(1), 0.5 * I * sigma(2), 0.5 * I * sigma(3)};
    auto cp = char_poly(lax_matrices(spin, zeta).l);
    REQUIRE(cp.size() == 2);
    // det(eta - L) = eta^2 + c0 eta + c1
    const cplx detL = det(lax_matrices(spin, zeta).l);
    CHECK(std::abs(cp[1] - detL) < 1e-12 * (1.0 + std::abs(detL)));
}

TEST_CASE("curve_from_nahm") {
    // T = 0 at n = 1: a1 = 0
    NahmTriple t0{CMatrix(1, 1), CMatrix(1, 1), CMatrix(1, 1)};
    auto c0 = curve_from_nahm(t0);
    CHECK(c0.n == 1);
    CHECK(c0.a[0].max_abs_coeff() < 1e-14);

    // n=1 linear data: a1(zeta) = -2i y(zeta) . (i c)
    const double c1 = 0.7, c2 = -0.2, c3 = 0.4;
    NahmTriple t1{CMatrix(1, 1, {I * c1}), CMatrix(1, 1, {I * c2}), CMatrix(1, 1, {I * c3})};
    auto c = curve_from_nahm(t1);
    for (cplx z : {cplx(0.3, 0.2), cplx(-1.1, 0.4)}) {
        auto y = y_of_zeta(z);
        const cplx expect = -2.0 * I * (y[0] * I * c1 + y[1] * I * c2 + y[2] * I * c3);
        CHECK(std::abs(c.a[0].eval(z) - expect) < 1e-12);
    }

    // spin-1/2 pole model at two different z: identical coefficients
    auto pole_triple = [&](double z) {
        const double f = 1.0 / (z - 1.0);
        return NahmTriple{(0.5 * f) * (I * sigma(1)), (0.5 * f) * (I * sigma(2)),
                          (0.5 * f) * (I * sigma(3))};
    };
    auto ca = curve_from_nahm(pole_triple(0.2));
    auto cb = curve_from_nahm(pole_triple(-0.5));
    for (int k = 0; k < 2; ++k)
        for (size_t m = 0; m < ca.a[size_t(k)].c.size(); ++m)
            CHECK(std::abs(ca.a[size_t(k)].c[m] - cb.a[size_t(k)].c[m]) < 1e-9);
}

TEST_CASE("leading rho") {
    // n=1, a1 = c zeta^2 -> rho = -c
    auto c1 = SpectralCurve::make(1, {{{cplx(0), cplx(0), cplx(2.0, 1.0)}}});
    auto rho = leading_rho(c1);
    REQUIRE(rho.size() == 1);
    CHECK(std::abs(rho[0] + cplx(2.0, 1.0)) < 1e-12);

    // n=2, eta^2 = -kappa^2 zeta^4 + ... -> rho = +- i kappa
    const double kappa = 1.3;
    auto c2 = SpectralCurve::make(2, {{}, {{cplx(0), 0, 0, 0, cplx(kappa * kappa)}}});
    auto rho2 = leading_rho(c2);
    REQUIRE(rho2.size() == 2);
    CHECK(std::abs(std::abs(rho2[0].imag()) - kappa) < 1e-12);
    CHECK(std::abs(rho2[0] + rho2[1]) < 1e-12);
}
