#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fockdom/kernels.hpp"
#include "fockdom/linalg.hpp"

using namespace fockdom;
using kernels::Exec;

namespace {

bool identical(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(Complex) * static_cast<std::size_t>(a.size())) == 0;
}

struct Fixture {
    UniversalModel m{family_xis(-1.0, 2, 5), 5};
    linalg::Rng rng{42};
};

} // namespace

TEST_CASE("shift kernels match dense tensor products") {
    Fixture f;
    kernels::set_threads(4);
    const Eigen::Index mult = 3;
    const Eigen::Index rows = static_cast<Eigen::Index>(f.m.dim()) * mult;
    const Matrix x = linalg::random_complex(f.rng, rows, 5);
    const Matrix y = linalg::random_complex(f.rng, 4, rows);
    for (int i = 1; i <= 2; ++i) {
        const Matrix big = tensor_with_identity(f.m.W(i).dense(), mult);
        CHECK(linalg::max_abs(kernels::shift_left(f.m.W(i), x, mult) - big * x) < 1e-13);
        CHECK(linalg::max_abs(kernels::shift_left_adjoint(f.m.W(i), x, mult) - big.adjoint() * x) < 1e-13);
        CHECK(linalg::max_abs(kernels::shift_right(y, f.m.W(i), mult) - y * big) < 1e-13);
    }
}

TEST_CASE("serial and parallel paths are bit-identical") {
    Fixture f;
    for (int threads : {1, 2, 3, 8}) {
        kernels::set_threads(threads);
        const Eigen::Index mult = 2;
        const Eigen::Index rows = static_cast<Eigen::Index>(f.m.dim()) * mult;
        const Matrix x = linalg::random_complex(f.rng, rows, 3);
        const Matrix y = linalg::random_complex(f.rng, 3, rows);
        CHECK(identical(kernels::shift_left(f.m.W(2), x, mult, Exec::serial), kernels::shift_left(f.m.W(2), x, mult, Exec::parallel)));
        CHECK(identical(kernels::shift_left_adjoint(f.m.W(1), x, mult, Exec::serial),
                        kernels::shift_left_adjoint(f.m.W(1), x, mult, Exec::parallel)));
        CHECK(identical(kernels::shift_right(y, f.m.W(1), mult, Exec::serial), kernels::shift_right(y, f.m.W(1), mult, Exec::parallel)));

        const std::vector<Matrix> t{0.3 * linalg::random_complex(f.rng, 6, 6), 0.3 * linalg::random_complex(f.rng, 6, 6)};
        const auto ws = kernels::word_products(t, *f.m.table(), Exec::serial);
        const auto wp = kernels::word_products(t, *f.m.table(), Exec::parallel);
        REQUIRE(ws.size() == wp.size());
        bool all = true;
        for (std::size_t i = 0; i < ws.size(); ++i) all = all && identical(ws[i], wp[i]);
        CHECK(all);

        std::vector<double> coef(ws.size());
        for (std::size_t i = 0; i < coef.size(); ++i) coef[i] = f.m.b(i) * (i % 3 == 0 ? -1.0 : 1.0);
        const Matrix mid = linalg::random_complex(f.rng, 6, 6);
        CHECK(identical(kernels::weighted_gram_sum(ws, coef, nullptr, 0, ws.size(), Exec::serial),
                        kernels::weighted_gram_sum(ws, coef, nullptr, 0, ws.size(), Exec::parallel)));
        CHECK(identical(kernels::weighted_gram_sum(ws, coef, &mid, 3, 40, Exec::serial),
                        kernels::weighted_gram_sum(ws, coef, &mid, 3, 40, Exec::parallel)));
        const Matrix left = linalg::random_complex(f.rng, 2, 6);
        CHECK(identical(kernels::stacked_blocks(ws, coef, left, ws.size(), Exec::serial),
                        kernels::stacked_blocks(ws, coef, left, ws.size(), Exec::parallel)));

        std::vector<double> bw(f.m.dim());
        for (std::size_t i = 0; i < bw.size(); ++i) bw[i] = f.m.b(i);
        const Matrix theta = linalg::random_complex(f.rng, rows, 2);
        CHECK(identical(kernels::symbol_extend(theta, f.m, mult, *f.m.table(), bw, Exec::serial),
                        kernels::symbol_extend(theta, f.m, mult, *f.m.table(), bw, Exec::parallel)));
    }
    kernels::set_threads(4);
}

TEST_CASE("word products and sums match explicit products") {
    Fixture f;
    const std::vector<Matrix> t{0.4 * linalg::random_complex(f.rng, 4, 4), 0.4 * linalg::random_complex(f.rng, 4, 4)};
    const WordTable& tab = *f.m.table();
    const auto w = kernels::word_products(t, tab);
    Matrix sum = Matrix::Zero(4, 4);
    std::vector<double> coef(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        Matrix p = Matrix::Identity(4, 4);
        const Word wi = tab.word_at(i);
        for (int letter : wi.letters()) p = p * t[static_cast<std::size_t>(letter - 1)];
        CHECK(linalg::max_abs(w[i] - p) < 1e-13);
        coef[i] = 1.0 / (1.0 + static_cast<double>(i));
        sum += coef[i] * p * p.adjoint();
    }
    CHECK(linalg::max_abs(kernels::weighted_gram_sum(w, coef, nullptr, 0, w.size()) - sum) < 1e-12);
}

TEST_CASE("symbol extension follows the column formula") {
    Fixture f;
    const Eigen::Index mult = 2;
    const Matrix theta = linalg::random_complex(f.rng, static_cast<Eigen::Index>(f.m.dim()) * mult, 1);
    std::vector<double> bw(f.m.dim());
    for (std::size_t i = 0; i < bw.size(); ++i) bw[i] = f.m.b(i);
    const Matrix m = kernels::symbol_extend(theta, f.m, mult, *f.m.table(), bw);
    const auto dense = f.m.dense_tuple();
    const WordTable& tab = *f.m.table();
    for (std::size_t a = 0; a < tab.size(); ++a) {
        Matrix v = theta;
        const Word wa = tab.word_at(a);
        const auto& L = wa.letters();
        for (auto it = L.rbegin(); it != L.rend(); ++it) v = tensor_with_identity(dense[static_cast<std::size_t>(*it - 1)], mult) * v;
        CHECK(linalg::max_abs(m.col(static_cast<Eigen::Index>(a)) - std::sqrt(bw[a]) * v) < 1e-13);
    }
}
