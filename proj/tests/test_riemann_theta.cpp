#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "monopole/theta.hpp"

using namespace monopole;

namespace {

std::mt19937 rng(777);

PeriodMatrix random_tau(int g) {
    // Im tau = A A^T + g * 1 (positive definite), Re tau symmetric small
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    CMatrix re(g, g), im(g, g);
    CMatrix a(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) a(i, j) = u(rng);
    CMatrix aat = a * a.transpose();
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double r = 0.5 * (u(rng) + u(rng));
            re(i, j) += r;
            re(j, i) = re(i, j);
        }
    PeriodMatrix pm;
    pm.g = g;
    pm.tau = CMatrix(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            double imv = aat(i, j).real() + (i == j ? 1.0 : 0.0);
            pm.tau(i, j) = cplx(re(i, j).real(), imv);
        }
    pm.validate();
    return pm;
}

std::vector<cplx> random_w(int g) {
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    std::vector<cplx> w(static_cast<size_t>(g));
    for (auto& v : w) v = cplx(u(rng), 0.5 * u(rng));
    return w;
}

// direct summation oracle over the full box |k_i| <= radius
cplx theta_direct(const std::vector<cplx>& w, const PeriodMatrix& pm, int radius) {
    const int g = pm.g;
    std::vector<int> k(size_t(g), -radius);
    cplx sum = 0;
    while (true) {
        cplx e = 0;
        for (int i = 0; i < g; ++i) {
            cplx row = 0;
            for (int j = 0; j < g; ++j) row += pm.tau(i, j) * double(k[size_t(j)]);
            e += M_PI * I * double(k[size_t(i)]) * row +
                 2.0 * M_PI * I * w[size_t(i)] * double(k[size_t(i)]);
        }
        sum += std::exp(e);
        int i = 0;
        while (i < g && ++k[size_t(i)] > radius) {
            k[size_t(i)] = -radius;
            ++i;
        }
        if (i == g) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("theta at g=1, tau=i, w=0") {
    PeriodMatrix pm;
    pm.g = 1;
    pm.tau = CMatrix(1, 1);
    pm.tau(0, 0) = I;
    const cplx v = theta({cplx(0.0)}, pm);
    const cplx oracle = theta_direct({cplx(0.0)}, pm, 10);
    CHECK(std::abs(v - oracle) < 1e-12);
    CHECK(std::abs(v - 1.0864348112) < 1e-9);
}

TEST_CASE("theta parity and integer shifts") {
    for (int g : {1, 2}) {
        PeriodMatrix pm = random_tau(g);
        for (int trial = 0; trial < 10; ++trial) {
            auto w = random_w(g);
            std::vector<cplx> wn(w);
            for (auto& v : wn) v = -v;
            CHECK(std::abs(theta(w, pm) - theta(wn, pm)) < 1e-10);

            std::vector<cplx> ws(w);
            ws[0] += 1.0;
            CHECK(std::abs(theta(w, pm) - theta(ws, pm)) < 1e-10);
        }
    }
}

TEST_CASE("theta_shifted equals theta at shifted argument") {
    PeriodMatrix pm1;
    pm1.g = 1;
    pm1.tau = CMatrix(1, 1);
    pm1.tau(0, 0) = I;
    const cplx lhs = theta_shifted({cplx(0.3)}, pm1, {1});
    const cplx rhs = theta({cplx(0.3) + I}, pm1);
    CHECK(std::abs(lhs - rhs) < 1e-10);

    PeriodMatrix pm4 = random_tau(4);
    auto w = random_w(4);
    std::vector<int> m{0, 1, 0, 0};
    std::vector<cplx> wm(w);
    for (int i = 0; i < 4; ++i) wm[size_t(i)] += pm4.tau(i, 1);
    CHECK(std::abs(theta_shifted(w, pm4, m) - theta(wm, pm4)) <
          1e-10 * (1.0 + std::abs(theta(wm, pm4))));
}

TEST_CASE("quasi-periodicity property suite at g in {1,2,4}") {
    std::uniform_int_distribution<int> mdist(-2, 2);
    for (int g : {1, 2, 4}) {
        PeriodMatrix pm = random_tau(g);
        for (int trial = 0; trial < 100; ++trial) {
            auto w = random_w(g);
            std::vector<int> m1(static_cast<size_t>(g)), m2(static_cast<size_t>(g));
            for (auto& v : m1) v = mdist(rng);
            for (auto& v : m2) v = mdist(rng);
            std::vector<cplx> shifted(w);
            cplx factor = 0;
            for (int i = 0; i < g; ++i) {
                shifted[size_t(i)] += double(m1[size_t(i)]);
                cplx row = 0;
                for (int j = 0; j < g; ++j) row += pm.tau(i, j) * double(m2[size_t(j)]);
                shifted[size_t(i)] += row;
                factor += -M_PI * I * double(m2[size_t(i)]) * row -
                          2.0 * M_PI * I * w[size_t(i)] * double(m2[size_t(i)]);
            }
            const cplx lhs = theta(shifted, pm);
            const cplx rhs = std::exp(factor) * theta(w, pm);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("truncation bound honored when radius doubles") {
    PeriodMatrix pm = random_tau(2);
    auto w = random_w(2);
    ThetaOptions o1;
    o1.eps = 1e-12;
    ThetaOptions o2 = o1;
    o2.radius_cap = 24.0;  // larger cap, same eps target
    const cplx v1 = theta(w, pm, o1);
    ThetaOptions o3;
    o3.eps = 1e-14;
    o3.radius_cap = 24.0;
    const cplx v2 = theta(w, pm, o3);
    CHECK(std::abs(v1 - v2) < 1e-10 * (1.0 + std::abs(v1)));
}

TEST_CASE("on_theta_divisor: odd half-period vanishes, origin does not") {
    PeriodMatrix pm = random_tau(1);
    const cplx k = 0.5 + 0.5 * pm.tau(0, 0);
    CHECK(on_theta_divisor({k}, pm, 1e-9).on_divisor);
    CHECK(!on_theta_divisor({cplx(0.0)}, pm, 1e-9).on_divisor);
}

TEST_CASE("theta gradient against central differences") {
    for (int g : {1, 3}) {
        PeriodMatrix pm = random_tau(g);
        for (int trial = 0; trial < 5; ++trial) {
            auto w = random_w(g);
            auto grad = theta_gradient(w, pm);
            const double h = 1e-5;
            for (int i = 0; i < g; ++i) {
                auto wp = w, wm = w;
                wp[size_t(i)] += h;
                wm[size_t(i)] -= h;
                const cplx fd = (theta(wp, pm) - theta(wm, pm)) / (2.0 * h);
                CHECK(std::abs(grad[size_t(i)] - fd) < 1e-6 * (1.0 + std::abs(fd)));
            }
        }
    }
}

TEST_CASE("gradient at even critical point and at the odd half-period") {
    PeriodMatrix pm;
    pm.g = 1;
    pm.tau = CMatrix(1, 1);
    pm.tau(0, 0) = I;
    auto g0 = theta_gradient({cplx(0.0)}, pm);
    CHECK(std::abs(g0[0]) < 1e-12);  // even function critical point

    auto g1 = theta_gradient({0.5 + 0.5 * I}, pm);
    CHECK(std::abs(g1[0]) > 1e-3);  // divisor point is nonsingular at g=1
}

TEST_CASE("convergence failure for capped radius") {
    PeriodMatrix pm;
    pm.g = 1;
    pm.tau = CMatrix(1, 1);
    pm.tau(0, 0) = cplx(0.0, 1e-4);  // near-degenerate
    ThetaOptions opt;
    opt.radius_cap = 5.0;
    CHECK_THROWS_AS(theta({cplx(0.2)}, pm, opt), ConvergenceFailure);
}

TEST_CASE("theta with characteristic via argument shift") {
    PeriodMatrix pm = random_tau(1);
    ThetaChar odd{{1}, {1}};
    // theta[1/2,1/2] is odd: vanishes at 0, antisymmetric
    CHECK(std::abs(theta_char(odd, {cplx(0.0)}, pm)) < 1e-10);
    const cplx a = theta_char(odd, {cplx(0.21, 0.13)}, pm);
    const cplx b = theta_char(odd, {cplx(-0.21, -0.13)}, pm);
    CHECK(std::abs(a + b) < 1e-10 * (1.0 + std::abs(a)));
}
