#include "fockdom/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fockdom::linalg {

Matrix hermitian_part(const Matrix& a) { return (a + a.adjoint()) * 0.5; }

EigenPair hermitian_eig(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
    if (es.info() != Eigen::Success) throw Error("eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double min_eig(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    // Far from square: reduce to the triangular QR factor, which has the same
    // singular values, before the SVD.
    if (a.rows() > 2 * a.cols()) {
        Eigen::HouseholderQR<Matrix> qr(a);
        const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
        return spectral_norm(r);
    }
    if (a.cols() > 2 * a.rows()) return spectral_norm(a.adjoint());
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Matrix psd_sqrt(const Matrix& a, double tol) {
    const EigenPair ep = hermitian_eig(a);
    RealVector s(ep.values.size());
    for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
        const double v = ep.values(i);
        if (v < -tol) throw Error("matrix is not positive semidefinite within tolerance");
        s(i) = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    return ep.vectors * s.cast<Complex>().asDiagonal() * ep.vectors.adjoint();
}

void normalize_phases(Matrix& q) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double scale = q.col(j).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            const double r = std::abs(q(i, j));
            if (r > 1e-8 * scale) {
                q.col(j) *= std::conj(q(i, j)) / r;
                break;
            }
        }
    }
}

namespace {

Eigen::Index rank_from(const RealVector& sv, double rel_tol, double abs_floor) {
    if (sv.size() == 0) return 0;
    const double cut = std::max(rel_tol * sv(0), abs_floor);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cut) ++r;
    return r;
}

} // namespace

Matrix orthonormal_range(const Matrix& a, double rel_tol, double abs_floor) {
    if (a.size() == 0) return Matrix(a.rows(), 0);
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
    const Eigen::Index r = rank_from(svd.singularValues(), rel_tol, abs_floor);
    Matrix q = svd.matrixU().leftCols(r);
    normalize_phases(q);
    return q;
}

Matrix null_space(const Matrix& a, double rel_tol, double abs_floor) {
    if (a.cols() == 0) return Matrix(0, 0);
    if (a.rows() == 0) return Matrix::Identity(a.cols(), a.cols());
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Eigen::Index r = rank_from(svd.singularValues(), rel_tol, abs_floor);
    Matrix q = svd.matrixV().rightCols(a.cols() - r);
    normalize_phases(q);
    return q;
}

Eigen::Index numerical_rank(const Matrix& a, double rel_tol, double abs_floor) {
    if (a.size() == 0) return 0;
    Eigen::BDCSVD<Matrix> svd(a);
    return rank_from(svd.singularValues(), rel_tol, abs_floor);
}

Matrix pinv(const Matrix& a, double rel_tol) {
    if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const Eigen::Index r = rank_from(sv, rel_tol, 0.0);
    RealVector inv = RealVector::Zero(sv.size());
    for (Eigen::Index i = 0; i < r; ++i) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

double subspace_distance(const Matrix& q1, const Matrix& q2) {
    return spectral_norm(q1 * q1.adjoint() - q2 * q2.adjoint());
}

Matrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = nd(rng);
            const double im = nd(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

Matrix random_unitary(Rng& rng, Eigen::Index d) {
    const Matrix g = random_complex(rng, d, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

} // namespace fockdom::linalg
