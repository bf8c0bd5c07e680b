#include "fockdom/normopt.hpp"

#include <cmath>

#include "fockdom/linalg.hpp"

namespace fockdom::normopt {

namespace {

Matrix affine(const Matrix& m0, const std::vector<Matrix>& basis, const RealVector& x) {
    Matrix m = m0;
    for (std::size_t j = 0; j < basis.size(); ++j) m += x(static_cast<Eigen::Index>(j)) * basis[j];
    return m;
}

Matrix lmi(const Matrix& m, double t) {
    const Eigen::Index p = m.rows();
    const Eigen::Index q = m.cols();
    Matrix g(p + q, p + q);
    g.topLeftCorner(p, p) = Matrix::Identity(p, p) * t;
    g.bottomRightCorner(q, q) = Matrix::Identity(q, q) * t;
    g.topRightCorner(p, q) = m;
    g.bottomLeftCorner(q, p) = m.adjoint();
    return g;
}

// -log det G, or +inf when G is not positive definite.
double neg_logdet(const Matrix& g) {
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) return INFINITY;
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const double dii = llt.matrixLLT()(i, i).real();
        if (!(dii > 0.0)) return INFINITY;
        s -= 2.0 * std::log(dii);
    }
    return s;
}

} // namespace

Result minimize_spectral_norm(const Matrix& m0, const std::vector<Matrix>& basis, double rel_gap) {
    Result res;
    const auto P = static_cast<Eigen::Index>(basis.size());
    res.x = RealVector::Zero(P);
    res.norm = linalg::spectral_norm(m0);
    if (P == 0 || m0.size() == 0) return res;

    const Eigen::Index p = m0.rows();
    const Eigen::Index q = m0.cols();
    const auto s = static_cast<double>(p + q);
    const double scale = std::max(res.norm, 1e-300);

    // v = (t, x)
    RealVector v(P + 1);
    v(0) = 1.1 * res.norm + 1e-3 * scale + 1e-300;
    v.tail(P).setZero();
    double mu = 0.1 * v(0) / s;

    auto objective = [&](const RealVector& w, double mu_) {
        const double nl = neg_logdet(lmi(affine(m0, basis, w.tail(P)), w(0)));
        return std::isinf(nl) ? INFINITY : w(0) + mu_ * nl;
    };

    // Basis matrices as columns, for gemm-based Hessian assembly.
    Matrix bvec(p * q, P);
    for (Eigen::Index j = 0; j < P; ++j) {
        const Matrix& b = basis[static_cast<std::size_t>(j)];
        bvec.col(j) = Eigen::Map<const Vector>(b.data(), p * q);
    }

    for (int stage = 0; stage < 200; ++stage) {
        for (int it = 0; it < 100; ++it) {
            const Matrix g = lmi(affine(m0, basis, v.tail(P)), v(0));
            Eigen::LLT<Matrix> llt(g);
            const Matrix y = llt.solve(Matrix::Identity(g.rows(), g.cols()));
            const Matrix y11 = y.topLeftCorner(p, p);
            const Matrix y22 = y.bottomRightCorner(q, q);
            const Matrix y21 = y.bottomLeftCorner(q, p);
            const Matrix y2 = y * y;
            const Matrix y2_21 = y2.bottomLeftCorner(q, p);

            // With D_j = [[0, B_j], [B_j^*, 0]]:
            //   tr(Y D_j) = 2 Re tr(Y21 B_j)
            //   tr(Y D_a Y D_b) = 2 Re [tr(Y11 B_a Y22 B_b^*) + tr(Y21 B_a Y21 B_b)]
            Matrix xa(p * q, P);
            Matrix za(p * q, P);
            for (Eigen::Index a = 0; a < P; ++a) {
                const Matrix& b = basis[static_cast<std::size_t>(a)];
                const Matrix x = y11 * b * y22;
                xa.col(a) = Eigen::Map<const Vector>(x.data(), p * q);
                const Matrix z = (y21 * b * y21).transpose();
                za.col(a) = Eigen::Map<const Vector>(z.data(), p * q);
            }
            const Matrix y21t = y21.transpose();
            const Matrix y2_21t = y2_21.transpose();
            const Vector ytr = Eigen::Map<const Vector>(y21t.data(), p * q);
            const Vector y2tr = Eigen::Map<const Vector>(y2_21t.data(), p * q);

            RealVector grad(P + 1);
            Eigen::MatrixXd hess(P + 1, P + 1);
            grad(0) = 1.0 - mu * y.trace().real();
            hess(0, 0) = mu * y2.trace().real();
            grad.tail(P) = -mu * 2.0 * (bvec.transpose() * ytr).real();
            hess.block(1, 0, P, 1) = mu * 2.0 * (bvec.transpose() * y2tr).real();
            hess.block(0, 1, 1, P) = hess.block(1, 0, P, 1).transpose();
            const Eigen::MatrixXd h = (bvec.adjoint() * xa + bvec.transpose() * za).real();
            hess.bottomRightCorner(P, P) = mu * (h + h.transpose());
            const RealVector step = hess.ldlt().solve(-grad);
            const double decrement = -grad.dot(step);
            ++res.newton_steps;
            if (!(decrement > 1e-7 * mu)) break;

            const double f0 = objective(v, mu);
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const RealVector cand = v + alpha * step;
                const double f1 = objective(cand, mu);
                if (f1 < f0 && f1 <= f0 - 0.25 * alpha * decrement) {
                    v = cand;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (decrement < 1e-6 * mu) break;
        }
        res.bound_gap = mu * s;
        if (res.bound_gap <= rel_gap * std::max(v(0), 1e-300)) break;
        mu /= 8.0;
    }

    res.x = v.tail(P);
    res.norm = linalg::spectral_norm(affine(m0, basis, res.x));
    return res;
}

} // namespace fockdom::normopt
