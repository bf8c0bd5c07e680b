#include <doctest.h>

#include <cmath>

#include "fockdom/domainops.hpp"
#include "fockdom/linalg.hpp"

using namespace fockdom;

namespace {

OperatorTuple compression(const FreeSeries& g, int N) { return OperatorTuple::from_model(UniversalModel(g, N)); }

// Sigma T_i T_i^*, computed directly.
Matrix row_square(const OperatorTuple& t) {
    Matrix s = Matrix::Zero(t.dim(), t.dim());
    for (int i = 1; i <= t.n(); ++i) s += t[i] * t[i].adjoint();
    return s;
}

} // namespace

TEST_CASE("membership of the zero tuple") {
    const auto r = membership(OperatorTuple::zero(2, 3), family_gs(2.0, 2, 4), 4);
    CHECK(linalg::max_abs(r.delta - Matrix::Identity(3, 3)) == 0.0);
    CHECK(r.purity_residuals[0] == 0.0);
    CHECK(r.verdict == "pure");
}

TEST_CASE("membership of the model compression") {
    for (const auto& g : {family_xis(-1.0, 2, 4), family_gs(0.5, 2, 4), family_gs(1.0, 3, 3)}) {
        const auto t = compression(g, g.degree());
        const auto r = membership(t, g, g.degree());
        CHECK(linalg::max_abs(r.delta - vacuum_projection(WordTable(g.n(), g.degree()))) <= 1e-12);
        CHECK(r.purity_residuals.back() <= 1e-12);
        CHECK(r.verdict == "pure");
    }
}

TEST_CASE("row-ball membership fails when the row norm exceeds one") {
    linalg::Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        OperatorTuple t({linalg::random_complex(rng, 3, 3), linalg::random_complex(rng, 3, 3)});
        const double s = linalg::spectral_norm(row_square(t));
        t = t.scaled(std::sqrt(1.5 / s));
        CHECK(membership(t, family_gs(1.0, 2, 3), 3).verdict == "not-member");
    }
}

TEST_CASE("Cuntz unitary and its radial scan") {
    linalg::Rng rng(11);
    const OperatorTuple u({linalg::random_unitary(rng, 3)});
    const auto g = family_gs(1.0, 1, 40);
    const auto r = membership(u, g, 40);
    CHECK(r.verdict == "Cuntz");
    const auto scan = radial_scan(u, g, {0.3, 0.5, 0.6}, 40);
    for (const auto& p : scan.points) {
        CHECK(p.report.verdict == "pure");
        // Delta = (1 - r^2) I
        CHECK(linalg::max_abs(p.report.delta - (1 - p.r * p.r) * Matrix::Identity(3, 3)) <= 1e-12);
    }
    REQUIRE(scan.largest_pure_r.has_value());
    CHECK(*scan.largest_pure_r == 0.6);
}

TEST_CASE("radial scans of the compression and the zero tuple") {
    const auto g = family_xis(-1.0, 2, 4);
    for (const auto& p : radial_scan(compression(g, 4), g, {0.2, 0.7, 0.95}, 4).points) CHECK(p.report.verdict == "pure");
    for (const auto& p : radial_scan(OperatorTuple::zero(2, 2), g, {0.1, 0.9}, 4).points) CHECK(p.report.verdict == "pure");
    CHECK_THROWS_AS(radial_scan(OperatorTuple::zero(2, 2), g, {1.0}, 4), Error);
}

TEST_CASE("Berezin kernel of nilpotent members") {
    linalg::Rng rng(17);
    for (const auto& g : {family_xis(-1.0, 2, 5), family_gs(0.5, 2, 5), family_gs(2.0, 2, 5)}) {
        for (int trial = 0; trial < 4; ++trial) {
            const auto t = random_nilpotent_member(2, 4, g, rng);
            const auto k = berezin_kernel(t, g, 5);
            CHECK(k.isometry_defect <= 1e-10);
            for (double e : k.intertwining) CHECK(e <= 1e-10);
            // Independent check of K^*K = sum b_alpha T_alpha Delta T_alpha^*.
            CHECK(linalg::spectral_norm(k.K.adjoint() * k.K - Matrix::Identity(4, 4)) <= 1e-10);
        }
    }
}

TEST_CASE("Berezin kernel of the zero tuple embeds onto constants") {
    const auto k = berezin_kernel(OperatorTuple::zero(2, 3), family_gs(1.0, 2, 3), 3);
    REQUIRE(k.multiplicity == 3);
    Matrix want = Matrix::Zero(k.K.rows(), 3);
    want.topRows(3) = Matrix::Identity(3, 3);
    CHECK(linalg::max_abs(k.K - want) <= 1e-15);
}

TEST_CASE("Berezin kernel of a scaled shift decays like r^{2N}") {
    const auto g = family_gs(1.0, 1, 40);
    const auto t = OperatorTuple::from_model(UniversalModel(g, 40)).scaled(0.9);
    const double r2 = 0.81;
    const double c = berezin_kernel(t, g, 2).isometry_defect / std::pow(r2, 2);
    CHECK(c > 0.0);
    for (int N = 3; N <= 10; ++N) {
        const double defect = berezin_kernel(t, g, N).isometry_defect;
        CHECK(defect <= 1.01 * c * std::pow(r2, N));
        CHECK(defect >= 0.99 * c * std::pow(r2, N));
    }
}

TEST_CASE("Berezin kernel rejects non-PSD defects") {
    const OperatorTuple t({2.0 * Matrix::Identity(2, 2)});
    CHECK_THROWS_AS(berezin_kernel(t, family_gs(1.0, 1, 3), 3), Error);
}

TEST_CASE("dilation index examples") {
    const auto g = family_xis(-1.0, 2, 3);
    const auto w = compression(g, 3);
    CHECK(dilation_index(w, g) == 1);
    for (int k = 1; k <= 4; ++k) {
        CHECK(dilation_index(OperatorTuple::direct_sum(std::vector<OperatorTuple>(static_cast<std::size_t>(k), w)), g) == k);
    }
    CHECK(dilation_index(OperatorTuple::zero(2, 5), g) == 5);
    const OperatorTuple u({Matrix::Identity(2, 2), Matrix::Zero(2, 2)});
    CHECK_THROWS_WITH_AS(dilation_index(u, family_gs(1.0, 2, 3)), doctest::Contains("only for pure tuples"), Error);
}

TEST_CASE("dilation index is unitarily invariant") {
    linalg::Rng rng(23);
    const auto g = family_gs(0.5, 2, 5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = OperatorTuple::direct_sum({random_nilpotent_member(2, 3, g, rng), OperatorTuple::zero(2, 2)});
        const Matrix q = linalg::random_unitary(rng, t.dim());
        CHECK(dilation_index(t, g) == dilation_index(t.conjugated(q), g));
    }
}

TEST_CASE("minimality of canonical dilations and full spaces") {
    linalg::Rng rng(29);
    const auto g = family_xis(-1.0, 2, 4);
    const UniversalModel model(g, 4);
    const auto t = random_nilpotent_member(2, 3, g, rng);
    const auto k = berezin_kernel(t, g, 4);
    const auto m = minimality_check(k.K, model, k.multiplicity);
    CHECK(m.flag_span);
    CHECK(m.flag_vacuum);
    CHECK(m.flag_orthogonal);
    CHECK(m.minimal);

    const Eigen::Index mult = 2;
    const Matrix full = Matrix::Identity(static_cast<Eigen::Index>(model.dim()) * mult, static_cast<Eigen::Index>(model.dim()) * mult);
    CHECK(minimality_check(full, model, mult).minimal);
    CHECK(reduce_dilation(full, model, mult).g0.cols() == mult);
}

TEST_CASE("padded dilation is not minimal and reduces by one") {
    linalg::Rng rng(31);
    const auto g = family_gs(0.5, 2, 4);
    const UniversalModel model(g, 4);
    const auto t = random_nilpotent_member(2, 3, g, rng);
    const auto k = berezin_kernel(t, g, 4);
    const Eigen::Index m = k.multiplicity;
    const Eigen::Index words = static_cast<Eigen::Index>(model.dim());
    Matrix padded = Matrix::Zero(words * (m + 1), k.K.cols());
    for (Eigen::Index a = 0; a < words; ++a) padded.middleRows(a * (m + 1), m) = k.K.middleRows(a * m, m);
    const auto r = minimality_check(padded, model, m + 1);
    CHECK_FALSE(r.flag_span);
    CHECK_FALSE(r.flag_vacuum);
    CHECK_FALSE(r.flag_orthogonal);
    CHECK(r.agree);
    CHECK_FALSE(r.minimal);
    const auto red = reduce_dilation(padded, model, m + 1);
    CHECK(red.g0.cols() == m);
    CHECK(red.orthogonality_defect <= 1e-12);
    CHECK(red.tuple_change <= 1e-12);
}

TEST_CASE("vacuum line reduces to the full multiplicity space") {
    const UniversalModel model(family_gs(1.0, 2, 3), 3);
    const Eigen::Index m = 3;
    Matrix v = Matrix::Zero(static_cast<Eigen::Index>(model.dim()) * m, m);
    v.topRows(m) = Matrix::Identity(m, m);
    const auto red = reduce_dilation(v, model, m);
    CHECK(red.g0.cols() == m);
    CHECK(minimality_check(v, model, m).flag_vacuum);
}

TEST_CASE("minimality rejects non co-invariant subspaces") {
    const UniversalModel model(family_gs(1.0, 2, 3), 3);
    Matrix v = Matrix::Zero(static_cast<Eigen::Index>(model.dim()), 1);
    v(1, 0) = 1.0;  // e_{g_1}: W_1^* maps it to the vacuum
    CHECK_THROWS_AS(minimality_check(v, model, 1), Error);
}

TEST_CASE("lift equivalence") {
    linalg::Rng rng(37);
    const auto g = family_xis(-1.0, 2, 4);
    const auto t = random_nilpotent_member(2, 3, g, rng);
    const Matrix eye = Matrix::Identity(3, 3);
    const auto same = lift_equivalence(t, t, eye, g, 4);
    CHECK(linalg::max_abs(same.u - Matrix::Identity(same.u.rows(), same.u.cols())) <= 1e-12);

    const Matrix q = linalg::random_unitary(rng, 3);
    const auto rot = lift_equivalence(t, t.conjugated(q), q, g, 4);
    CHECK(rot.residual <= 1e-9);
    CHECK(rot.unitarity_defect <= 1e-9);

    const Complex phase = std::polar(1.0, 0.7);
    const auto ph = lift_equivalence(t, t, phase * eye, g, 4);
    CHECK(linalg::max_abs(ph.u - phase * Matrix::Identity(ph.u.rows(), ph.u.cols())) <= 1e-12);

    CHECK_THROWS_AS(lift_equivalence(t, t.conjugated(q), eye, g, 4), Error);
}

TEST_CASE("Berezin transform") {
    linalg::Rng rng(41);
    const auto g = family_gs(1.0, 2, 4);
    const auto t = random_nilpotent_member(2, 3, g, rng);
    const Word e = Word::identity(2);
    const Word w1 = Word::generator(2, 1);

    const auto id = berezin_transform(t, g, {{1.0, e, e}}, {0.5, 0.9}, 4);
    for (const auto& v : id.values) CHECK(linalg::max_abs(v - Matrix::Identity(3, 3)) <= 1e-12);
    CHECK(id.extrapolation_error <= 1e-12);

    const std::vector<double> grid{0.99, 0.999};
    const auto ww = berezin_transform(t, g, {{1.0, w1, w1}}, grid, 4);
    const Matrix tt = t[1] * t[1].adjoint();
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(linalg::max_abs(ww.values[i] - grid[i] * grid[i] * tt) <= 1e-12);
    // r^2 is not linear in 1 - r; the remainder is (1 - r_1)(1 - r_2) ||T_1 T_1^*||.
    CHECK(ww.extrapolation_error <= 1.01 * 0.01 * 0.001 * linalg::spectral_norm(tt) + 1e-12);

    const auto wc = compression(family_xis(-1.0, 2, 3), 3);
    const auto lin = berezin_transform(wc, family_xis(-1.0, 2, 3), {{1.0, w1, e}}, {0.8, 0.9}, 3);
    CHECK(linalg::max_abs(lin.values[1] - 0.9 * wc[1]) <= 1e-12);
    CHECK(lin.extrapolation_error <= 1e-10);
}

TEST_CASE("tuple json round trip") {
    linalg::Rng rng(43);
    const OperatorTuple t({linalg::random_complex(rng, 2, 2), linalg::random_complex(rng, 2, 2)});
    const auto back = OperatorTuple::from_json(t.to_json());
    CHECK(linalg::max_abs(back[1] - t[1]) == 0.0);
    CHECK(linalg::max_abs(back[2] - t[2]) == 0.0);
    CHECK_THROWS_AS(OperatorTuple::from_json(nlohmann::json{{"n", 2}, {"dim", 2}, {"matrices", nlohmann::json::array()}}), Error);
}
