#pragma once

// Eigenvalue and SVD needs are delegated to Eigen; everything stays behind
// the CMatrix surface.

#include <Eigen/Dense>
#include <vector>

#include "monopole/matrix.hpp"

namespace monopole::detail {

inline Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline CMatrix from_eigen(const Eigen::MatrixXcd& e) {
    CMatrix m(int(e.rows()), int(e.cols()));
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

inline std::vector<cplx> eigenvalues(const CMatrix& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), /*computeEigenvectors=*/false);
    std::vector<cplx> out(m.rows());
    for (int i = 0; i < m.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

struct HermitianEig {
    std::vector<double> values;   // ascending
    CMatrix vectors;              // columns
};

inline HermitianEig hermitian_eig(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
    HermitianEig out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
    out.vectors = from_eigen(es.eigenvectors());
    return out;
}

struct Svd {
    std::vector<double> sigma;  // descending
    CMatrix u, v;               // A = u * diag(sigma) * v^dagger
};

inline Svd svd(const CMatrix& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> s(to_eigen(m),
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
    Svd out;
    out.sigma.assign(s.singularValues().data(),
                     s.singularValues().data() + s.singularValues().size());
    out.u = from_eigen(s.matrixU());
    out.v = from_eigen(s.matrixV());
    return out;
}

}  // namespace monopole::detail
