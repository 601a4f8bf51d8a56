#pragma once

// Small dense complex linear algebra and Pauli/tensor helpers shared by all
// modules. Matrices here are tiny (at most ~12x12), so everything is plain
// O(n^3) with partial pivoting and explicit condition estimates.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <vector>

#include "monopole/errors.hpp"

namespace monopole {

using cplx = std::complex<double>;
using std::size_t;

inline constexpr cplx I{0.0, 1.0};

class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
    CMatrix(int rows, int cols, std::initializer_list<cplx> vals) : CMatrix(rows, cols) {
        assert(vals.size() == a_.size());
        std::copy(vals.begin(), vals.end(), a_.begin());
    }

    static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }
    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix diag(const std::vector<cplx>& d) {
        CMatrix m(int(d.size()), int(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    CMatrix& operator+=(const CMatrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMatrix& operator*=(cplx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        assert(a.cols_ == b.rows_);
        CMatrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<cplx> operator*(const std::vector<cplx>& v) const {
        assert(int(v.size()) == cols_);
        std::vector<cplx> out(rows_, 0.0);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    CMatrix transpose() const {
        CMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    CMatrix conjugate() const {
        CMatrix c = *this;
        for (auto& v : c.a_) v = std::conj(v);
        return c;
    }
    CMatrix dagger() const { return transpose().conjugate(); }

    double frobenius() const {
        double s = 0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }
    // 1-norm (max column sum), used by the condition estimate.
    double norm1() const {
        double m = 0;
        for (int j = 0; j < cols_; ++j) {
            double s = 0;
            for (int i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    cplx trace() const {
        cplx t = 0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    std::vector<cplx> col(int j) const {
        std::vector<cplx> v(rows_);
        for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    void set_col(int j, const std::vector<cplx>& v) {
        for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

// --- Pauli matrices ---------------------------------------------------------

inline const CMatrix& sigma(int j) {
    static const CMatrix s1(2, 2, {0, 1, 1, 0});
    static const CMatrix s2(2, 2, {0, -I, I, 0});
    static const CMatrix s3(2, 2, {1, 0, 0, -1});
    switch (j) {
        case 1: return s1;
        case 2: return s2;
        default: return s3;
    }
}

// v1*sigma1 + v2*sigma2 + v3*sigma3 for a complex 3-vector v.
inline CMatrix pauli_dot(const std::array<cplx, 3>& v) {
    CMatrix m(2, 2);
    m(0, 0) = v[2];
    m(0, 1) = v[0] - I * v[1];
    m(1, 0) = v[0] + I * v[1];
    m(1, 1) = -v[2];
    return m;
}
inline CMatrix pauli_dot(const std::array<double, 3>& v) {
    return pauli_dot(std::array<cplx, 3>{v[0], v[1], v[2]});
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == 0.0) continue;
            for (int p = 0; p < b.rows(); ++p)
                for (int q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

// --- Spatial points ----------------------------------------------------------

struct SpatialPoint {
    double x1 = 0, x2 = 0, x3 = 0;
    double x4 = 0;

    double r2() const { return x1 * x1 + x2 * x2 + x3 * x3; }
    double r() const { return std::sqrt(r2()); }
    std::array<double, 3> vec() const { return {x1, x2, x3}; }
};

// --- Determinant / adjugate / LU ---------------------------------------------

// Faddeev-LeVerrier: returns adj(A) and det(A) in one sweep; valid for
// singular A as well.
inline std::pair<CMatrix, cplx> adjugate_det(const CMatrix& A) {
    assert(A.square());
    const int n = A.rows();
    if (n == 0) return {CMatrix(0, 0), cplx(1.0)};
    if (n == 1) return {CMatrix::identity(1), A(0, 0)};
    CMatrix M = CMatrix::identity(n);
    cplx c = 1.0;         // c_0
    CMatrix Mprev = M;    // M_{n-1} ends up the adjugate (up to sign)
    for (int k = 1; k <= n; ++k) {
        Mprev = M;
        CMatrix AM = A * M;
        c = -AM.trace() / double(k);
        M = AM;
        for (int i = 0; i < n; ++i) M(i, i) += c;
    }
    cplx det = (n % 2 == 0) ? c : -c;
    CMatrix adj = Mprev;
    if (n % 2 == 0) adj *= cplx(-1.0);
    return {adj, det};
}

inline CMatrix adjugate(const CMatrix& A) { return adjugate_det(A).first; }
inline cplx det(const CMatrix& A) { return adjugate_det(A).second; }

struct LuFactors {
    CMatrix lu;
    std::vector<int> piv;
    bool singular = false;
    double min_pivot = 0, max_pivot = 0;
};

inline LuFactors lu_factor(CMatrix A, double pivot_tol = 0.0) {
    assert(A.square());
    const int n = A.rows();
    LuFactors f;
    f.piv.resize(n);
    f.max_pivot = 0;
    f.min_pivot = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > best) { best = std::abs(A(i, k)); p = i; }
        f.piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
        const double piv = std::abs(A(k, k));
        f.max_pivot = std::max(f.max_pivot, piv);
        f.min_pivot = std::min(f.min_pivot, piv);
        if (piv <= pivot_tol) { f.singular = true; continue; }
        for (int i = k + 1; i < n; ++i) {
            A(i, k) /= A(k, k);
            const cplx lik = A(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) A(i, j) -= lik * A(k, j);
        }
    }
    if (n > 0 && (f.min_pivot == 0.0 || !std::isfinite(f.min_pivot))) f.singular = true;
    f.lu = std::move(A);
    return f;
}

inline std::vector<cplx> lu_solve(const LuFactors& f, std::vector<cplx> b) {
    const int n = f.lu.rows();
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) b[i] -= f.lu(i, j) * b[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= f.lu(i, j) * b[j];
        b[i] /= f.lu(i, i);
    }
    return b;
}

struct Inverse {
    CMatrix inv;
    double cond = 0;  // 1-norm condition estimate
};

// Partial-pivot LU inverse with an explicit condition estimate. Throws
// SingularMatrix when a pivot falls below threshold: callers in the field
// pipeline branch on this (Q(x,z) is singular on known loci).
inline Inverse invert(const CMatrix& A, double rel_pivot_tol = 1e-14) {
    assert(A.square());
    const int n = A.rows();
    Inverse out;
    if (n == 0) { out.inv = A; out.cond = 1.0; return out; }
    const double scale = std::max(A.max_abs(), 1e-300);
    LuFactors f = lu_factor(A, scale * rel_pivot_tol);
    if (f.singular) throw SingularMatrix("invert: pivot below threshold");
    out.inv = CMatrix(n, n);
    std::vector<cplx> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), cplx(0.0));
        e[j] = 1.0;
        auto x = lu_solve(f, e);
        for (int i = 0; i < n; ++i) out.inv(i, j) = x[i];
    }
    out.cond = A.norm1() * out.inv.norm1();
    return out;
}

// --- small vector helpers -----------------------------------------------------

inline cplx dot3(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline std::array<cplx, 3> cross3(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}
inline double norm2(const std::vector<cplx>& a) { return std::sqrt(std::abs(inner(a, a))); }

}  // namespace monopole
