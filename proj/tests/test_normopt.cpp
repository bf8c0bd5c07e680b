#include <doctest.h>

#include <cmath>

#include "fockdom/linalg.hpp"
#include "fockdom/normopt.hpp"

using namespace fockdom;

TEST_CASE("scalar balance point") {
    // max(|2 - x|, |x|) is smallest at x = 1.
    Matrix m0 = Matrix::Zero(2, 2);
    m0(0, 0) = 2.0;
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = -1.0;
    b(1, 1) = 1.0;
    const auto r = normopt::minimize_spectral_norm(m0, {b});
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("complex shift to zero") {
    Matrix m0(1, 1);
    m0(0, 0) = Complex(1.0, 1.0);
    Matrix one = Matrix::Ones(1, 1);
    const auto r = normopt::minimize_spectral_norm(m0, {one, Complex(0.0, 1.0) * one});
    CHECK(r.norm <= 1e-8);
}

TEST_CASE("Parrott completion") {
    // min over z of ||[[a, b], [c, z]]|| = max(||[a b]||, ||[a; c]||).
    linalg::Rng rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const Matrix a = linalg::random_complex(rng, 2, 2);
        const Matrix b = linalg::random_complex(rng, 2, 2);
        const Matrix c = linalg::random_complex(rng, 2, 2);
        Matrix m0 = Matrix::Zero(4, 4);
        m0.topLeftCorner(2, 2) = a;
        m0.topRightCorner(2, 2) = b;
        m0.bottomLeftCorner(2, 2) = c;
        std::vector<Matrix> basis;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                Matrix e = Matrix::Zero(4, 4);
                e(2 + i, 2 + j) = 1.0;
                basis.push_back(e);
                basis.push_back(Complex(0.0, 1.0) * e);
            }
        }
        Matrix row(2, 4);
        row << a, b;
        Matrix col(4, 2);
        col << a, c;
        const double want = std::max(linalg::spectral_norm(row), linalg::spectral_norm(col));
        const auto r = normopt::minimize_spectral_norm(m0, basis);
        CHECK(r.norm >= want - 1e-12);
        CHECK(r.norm <= want * (1.0 + 1e-8));
    }
}

TEST_CASE("empty basis returns the starting norm") {
    const Matrix m0 = Matrix::Identity(3, 3) * 2.0;
    const auto r = normopt::minimize_spectral_norm(m0, {});
    CHECK(r.norm == 2.0);
    CHECK(r.x.size() == 0);
}
