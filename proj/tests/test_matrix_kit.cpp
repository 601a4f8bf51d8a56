#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "monopole/detail/eigen_bridge.hpp"
#include "monopole/detail/poly.hpp"
#include "monopole/matrix.hpp"

using namespace monopole;

namespace {

std::mt19937 rng(12345);

CMatrix random_matrix(int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(u(rng), u(rng));
    return m;
}

}  // namespace

TEST_CASE("pauli_dot basics") {
    CMatrix s3 = pauli_dot(std::array<double, 3>{0, 0, 1});
    CHECK(std::abs(s3(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(s3(1, 1) + 1.0) < 1e-15);
    CHECK(std::abs(s3(0, 1)) < 1e-15);

    CMatrix s1 = pauli_dot(std::array<double, 3>{1, 0, 0});
    CHECK(std::abs(s1(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(s1(1, 0) - 1.0) < 1e-15);

    // Hermitian with det = -(a^2+b^2+c^2) for real arguments
    std::array<double, 3> v{0.3, -1.2, 0.7};
    CMatrix m = pauli_dot(v);
    CHECK((m.dagger() - m).max_abs() < 1e-15);
    const cplx d = det(m);
    CHECK(std::abs(d + (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])) < 1e-14);
}

TEST_CASE("pauli algebra sigma_i sigma_j = delta + i eps sigma_k") {
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            CMatrix prod = sigma(i) * sigma(j);
            CMatrix expect(2, 2);
            if (i == j) {
                expect = CMatrix::identity(2);
            } else {
                const int k = 6 - i - j;
                const double eps = ((i == 1 && j == 2) || (i == 2 && j == 3) || (i == 3 && j == 1))
                                       ? 1.0
                                       : -1.0;
                expect = (I * eps) * sigma(k);
            }
            CHECK((prod - expect).max_abs() < 1e-15);
        }
}

TEST_CASE("kron identities") {
    CHECK((kron(CMatrix::identity(2), CMatrix::identity(3)) - CMatrix::identity(6)).max_abs() ==
          0.0);

    CMatrix d = CMatrix::diag({cplx(2.0), cplx(-1.0)});
    CMatrix k = kron(sigma(3), d);
    CHECK(std::abs(k(0, 0) - 2.0) < 1e-15);
    CHECK(std::abs(k(3, 3) - 1.0) < 1e-15);  // -(-1)

    // (A (x) B)(C (x) D) = AC (x) BD on random 2x2 blocks
    CMatrix A = random_matrix(2), B = random_matrix(2), C = random_matrix(2),
            D = random_matrix(2);
    CMatrix lhs = kron(A, B) * kron(C, D);
    CMatrix rhs = kron(A * C, B * D);
    CHECK((lhs - rhs).max_abs() < 1e-13);
}

TEST_CASE("adjugate") {
    CHECK((adjugate(CMatrix::identity(4)) - CMatrix::identity(4)).max_abs() < 1e-12);

    CMatrix m(2, 2, {cplx(1, 2), cplx(3, -1), cplx(0, 1), cplx(2, 2)});
    CMatrix adj = adjugate(m);
    CHECK(std::abs(adj(0, 0) - m(1, 1)) < 1e-14);
    CHECK(std::abs(adj(0, 1) + m(0, 1)) < 1e-14);
    CHECK(std::abs(adj(1, 0) + m(1, 0)) < 1e-14);
    CHECK(std::abs(adj(1, 1) - m(0, 0)) < 1e-14);

    for (int trial = 0; trial < 20; ++trial) {
        CMatrix a = random_matrix(3);
        auto [adj3, d3] = adjugate_det(a);
        CMatrix prod = a * adj3;
        CMatrix expect = d3 * CMatrix::identity(3);
        CHECK((prod - expect).max_abs() < 1e-12);
    }

    // works for singular matrices too
    CMatrix s(3, 3);
    s(0, 0) = 1;
    s(1, 1) = 2;  // third row/col zero
    CMatrix prod = s * adjugate(s);
    CHECK(prod.max_abs() < 1e-14);  // det = 0
}

TEST_CASE("invert round trips and reports condition") {
    auto inv2 = invert(CMatrix::diag({cplx(2.0), cplx(4.0)}));
    CHECK(std::abs(inv2.inv(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(inv2.inv(1, 1) - 0.25) < 1e-15);
    CHECK(inv2.cond >= 1.0);

    for (int trial = 0; trial < 10; ++trial) {
        CMatrix a = random_matrix(6) + 3.0 * CMatrix::identity(6);
        auto inv = invert(a);
        CHECK((a * inv.inv - CMatrix::identity(6)).max_abs() < 1e-10);
        auto back = invert(inv.inv);
        CHECK((back.inv - a).max_abs() < 1e-9 * a.max_abs());
    }

    CMatrix sing(2, 2, {cplx(1.0), cplx(2.0), cplx(2.0), cplx(4.0)});
    CHECK_THROWS_AS(invert(sing), SingularMatrix);
}

TEST_CASE("polynomial roots via companion matrix") {
    using monopole::detail::Poly;
    // (x-1)(x-2i)(x+3) = ...
    Poly p = Poly{{cplx(-1.0)}} * Poly{{cplx(1.0), cplx(1.0)}};
    p = Poly{{cplx(-1.0), cplx(1.0)}} * Poly{{cplx(0, -2), cplx(1.0)}} *
        Poly{{cplx(3.0), cplx(1.0)}};
    auto roots = monopole::detail::poly_roots(p, 3);
    REQUIRE(roots.finite.size() == 3);
    CHECK(roots.at_infinity == 0);
    double best1 = 1e9, best2 = 1e9, best3 = 1e9;
    for (auto r : roots.finite) {
        best1 = std::min(best1, std::abs(r - cplx(1.0)));
        best2 = std::min(best2, std::abs(r - cplx(0, 2)));
        best3 = std::min(best3, std::abs(r + 3.0));
    }
    CHECK(best1 < 1e-10);
    CHECK(best2 < 1e-10);
    CHECK(best3 < 1e-10);

    // vanishing leading coefficients produce roots at infinity
    Poly q{{cplx(0.0), cplx(-2.0)}};  // -2 zeta, nominal degree 2
    auto r2 = monopole::detail::poly_roots(q, 2);
    CHECK(r2.at_infinity == 1);
    REQUIRE(r2.finite.size() == 1);
    CHECK(std::abs(r2.finite[0]) < 1e-12);
}

TEST_CASE("eigen bridge eigenvalues") {
    CMatrix d = CMatrix::diag({cplx(1.0), cplx(0, 2), cplx(-3.0)});
    auto ev = monopole::detail::eigenvalues(d);
    std::sort(ev.begin(), ev.end(),
              [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(ev[0] + 3.0) < 1e-12);
    CHECK(std::abs(ev[2] - 1.0) < 1e-12);
}
