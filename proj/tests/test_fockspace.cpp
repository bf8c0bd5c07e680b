#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fockdom/fockspace.hpp"
#include "fockdom/linalg.hpp"

using namespace fockdom;

TEST_CASE("g_1 model is the free shift") {
    const UniversalModel m(family_gs(1.0, 2, 4), 4);
    for (int i = 1; i <= 2; ++i) CHECK(linalg::max_abs(m.W(i).dense() - left_creation(*m.table(), i).dense()) == 0.0);
}

TEST_CASE("xi_{-1} weight on the first edge") {
    const UniversalModel m(family_xis(-1.0, 2, 3), 3);
    const Matrix w1 = m.W(1).dense();
    CHECK(std::abs(w1(1, 0) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("W_alpha maps the vacuum to e_alpha / sqrt(b_alpha)") {
    for (const auto& b : {family_xis(-1.0, 2, 4), family_gs(0.5, 3, 3), family_xis(2.0, 2, 4)}) {
        const UniversalModel m(b, b.degree());
        const WordTable& t = *m.table();
        const auto dense = m.dense_tuple();
        for (std::size_t idx = 0; idx < t.size(); ++idx) {
            Vector v = Vector::Zero(static_cast<Eigen::Index>(t.size()));
            v(0) = 1.0;
            const Word word = t.word_at(idx);
            const auto& L = word.letters();
            for (auto it = L.rbegin(); it != L.rend(); ++it) v = dense[static_cast<std::size_t>(*it - 1)] * v;
            Vector want = Vector::Zero(v.size());
            want(static_cast<Eigen::Index>(idx)) = 1.0 / std::sqrt(m.b(idx));
            CHECK((v - want).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("column structure of W_i and its adjoint") {
    const FreeSeries b = family_gs(0.5, 2, 4);
    const UniversalModel m(b, 4);
    const WordTable& t = *m.table();
    for (int i = 1; i <= 2; ++i) {
        const Matrix w = m.W(i).dense();
        for (std::size_t a = 0; a < t.size(); ++a) {
            const Eigen::Index col = static_cast<Eigen::Index>(a);
            const std::size_t target = t.prepend(i, a);
            if (target == WordTable::npos) {
                CHECK(w.col(col).norm() == 0.0);
                continue;
            }
            const double want = std::sqrt(m.b(a) / m.b(target));
            CHECK(std::abs(w(static_cast<Eigen::Index>(target), col) - want) < 1e-15);
            CHECK(w.col(col).cwiseAbs().sum() == doctest::Approx(want));
            // W_i^* e_{g_i alpha} = sqrt(b_alpha / b_{g_i alpha}) e_alpha
            const Vector back = w.adjoint().col(static_cast<Eigen::Index>(target));
            CHECK(std::abs(back(col) - want) < 1e-15);
        }
        // W_i^* kills words that do not start with g_i.
        for (std::size_t a = 0; a < t.size(); ++a) {
            if (t.first_letter(a) != i) CHECK(w.adjoint().col(static_cast<Eigen::Index>(a)).norm() == 0.0);
        }
    }
    CHECK(linalg::max_abs(m.W(1).dense().adjoint() * m.W(2).dense()) == 0.0);
}

TEST_CASE("norm of W_i is the largest weight ratio below the top level") {
    const FreeSeries b = family_xis(-1.0, 2, 5);
    const UniversalModel m(b, 5);
    // b_k / b_{k+1} = (k+2)/(k+1), largest at k = 0.
    CHECK(linalg::spectral_norm(m.W(1).dense()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("right creation") {
    const WordTable t(2, 3);
    const Matrix r2 = right_creation(t, 2).dense();
    const auto a = t.index_of(Word(2, {1}));
    const auto b = t.index_of(Word(2, {1, 2}));
    CHECK(r2(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) == Complex(1.0, 0.0));
}

TEST_CASE("vacuum projection") {
    const WordTable t(2, 1);
    const Matrix p = vacuum_projection(t);
    Matrix want = Matrix::Zero(3, 3);
    want(0, 0) = 1.0;
    CHECK(linalg::max_abs(p - want) == 0.0);
    const WordTable t2(3, 3);
    const Matrix p2 = vacuum_projection(t2);
    CHECK(p2.trace() == Complex(1.0, 0.0));
    CHECK(linalg::max_abs(p2 * p2 - p2) == 0.0);
    CHECK(linalg::max_abs(p2.adjoint() - p2) == 0.0);
}

TEST_CASE("tensor with identity") {
    linalg::Rng rng(5);
    const Matrix eye = Matrix::Identity(4, 4);
    CHECK(linalg::max_abs(tensor_with_identity(eye, 3) - Matrix::Identity(12, 12)) == 0.0);
    const Matrix a = linalg::random_complex(rng, 4, 4);
    const Matrix b = linalg::random_complex(rng, 4, 4);
    CHECK(linalg::max_abs(tensor_with_identity(a, 3) * tensor_with_identity(b, 3) - tensor_with_identity(a * b, 3)) < 1e-13);
    const Matrix p = tensor_with_identity(vacuum_projection(WordTable(2, 2)), 4);
    CHECK(linalg::numerical_rank(p) == 4);
    // Fock index major: (A (x) I)(e_alpha (x) e_k) lands in rows beta*m + k.
    const Matrix big = tensor_with_identity(a, 3);
    CHECK(big(2 * 3 + 1, 1 * 3 + 1) == a(2, 1));
    CHECK(big(2 * 3 + 1, 1 * 3 + 2) == Complex(0.0, 0.0));
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(UniversalModel(FreeSeries::from_levels(2, {1, -1, 1}), 2), Error);
    CHECK_THROWS_AS(UniversalModel(family_gs(1.0, 2, 2), 3), Error);
}

TEST_CASE("matrix serialization round trips") {
    linalg::Rng rng(9);
    const Matrix a = linalg::random_complex(rng, 3, 5);
    CHECK(linalg::max_abs(matrix_from_json(matrix_to_json(a)) - a) == 0.0);
    const auto path = (std::filesystem::temp_directory_path() / "fockdom_sidecar.bin").string();
    write_matrix_sidecar(a, path);
    CHECK(linalg::max_abs(read_matrix_sidecar(path, 3, 5) - a) == 0.0);
    CHECK_THROWS_AS(read_matrix_sidecar(path, 4, 5), Error);
    std::filesystem::remove(path);
}
