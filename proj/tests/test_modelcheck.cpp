#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <functional>

#include "fockdom/linalg.hpp"
#include "fockdom/modelcheck.hpp"

using namespace fockdom;

namespace {

std::vector<FreeSeries> builtins(int n, int N) {
    return {family_gs(0.5, n, N), family_gs(1.0, n, N), family_gs(2.0, n, N),
            family_xis(-1.0, n, N), family_xis(0.0, n, N), family_xis(1.0, n, N)};
}

// d_beta^{(m)} from the dense products of the model, summed word by word.
Matrix dense_defect(const UniversalModel& m, const FreeSeries& a, int deg) {
    const auto w = m.dense_tuple();
    const WordTable& t = *m.table();
    const auto d = static_cast<Eigen::Index>(t.size());
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.length(i) > deg) break;
        Matrix p = Matrix::Identity(d, d);
        const Word wi = t.word_at(i);
        for (int letter : wi.letters()) p = p * w[static_cast<std::size_t>(letter - 1)];
        sum += a.at(i) * p * p.adjoint();
    }
    return sum;
}

FreeSeries level_family(int n, int N, const std::function<long double(int)>& f) {
    std::vector<Coeff> lv;
    for (int k = 0; k <= N; ++k) lv.push_back(f(k));
    return FreeSeries::from_levels(n, lv);
}

long double factorial(int k) {
    long double r = 1.0L;
    for (int j = 2; j <= k; ++j) r *= j;
    return r;
}

} // namespace

TEST_CASE("defect at m = N is the vacuum projection") {
    for (int n = 1; n <= 2; ++n) {
        for (const auto& b : builtins(n, 4)) {
            const UniversalModel m(b, 4);
            const FreeSeries a = invert(b);
            const Matrix vac = vacuum_projection(*m.table());
            CHECK(linalg::max_abs(defect_operator(m, a, 4) - vac) <= 1e-12);
            CHECK(linalg::max_abs(defect_operator_dense(m, a, 4) - vac) <= 1e-12);
            CHECK(linalg::max_abs(dense_defect(m, a, 4) - vac) <= 1e-12);
            CHECK(linalg::max_abs(vacuum_resolution(m) - Matrix::Identity(m.dim(), m.dim())) <= 1e-12);
        }
    }
}

TEST_CASE("composed evaluation agrees with dense products") {
    for (const auto& b : builtins(2, 4)) {
        const UniversalModel m(b, 4);
        const FreeSeries a = invert(b);
        for (int deg = 0; deg <= 4; ++deg) {
            CHECK(linalg::max_abs(defect_operator_dense(m, a, deg) - defect_operator_dense(m, a, deg, 0)) <= 1e-13);
            CHECK(linalg::max_abs(dense_defect(m, a, deg) - defect_operator_dense(m, a, deg, 0)) <= 1e-12);
        }
        CHECK(linalg::max_abs(vacuum_resolution(m) - vacuum_resolution(m, 0)) <= 1e-13);
    }
}

TEST_CASE("telescoping: d_beta^{(m)} = delta_{beta,0} whenever m >= |beta|") {
    for (const auto& b : builtins(2, 5)) {
        const UniversalModel m(b, 5);
        const FreeSeries a = invert(b);
        const WordTable& t = *m.table();
        for (int deg = 0; deg <= 5; ++deg) {
            const RealVector d = defect_diagonal(m, a, deg);
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (t.length(i) <= deg) CHECK(std::fabs(d(static_cast<Eigen::Index>(i)) - (i == 0 ? 1.0 : 0.0)) <= 1e-12);
            }
            CHECK(linalg::max_abs(Matrix(d.cast<Complex>().asDiagonal()) - dense_defect(m, a, deg)) <= 1e-12);
        }
    }
}

TEST_CASE("defect for g = 1 + Z_1 at m = 1 is 1 - b_{beta'}/b_beta") {
    for (const auto& b : {family_xis(-1.0, 1, 5), family_gs(0.5, 1, 5), family_gs(1.0, 1, 5)}) {
        const UniversalModel m(b, 5);
        const FreeSeries a = invert(FreeSeries::from_levels(1, {1, 1, 0, 0, 0, 0}));
        const RealVector d = defect_diagonal(m, a, 1);
        CHECK(d(0) == doctest::Approx(1.0));
        for (int k = 1; k <= 5; ++k) {
            const double want = 1.0 - m.b(static_cast<std::size_t>(k - 1)) / m.b(static_cast<std::size_t>(k));
            CHECK(d(k) == doctest::Approx(want).epsilon(1e-14));
        }
        CHECK(linalg::max_abs(Matrix(d.cast<Complex>().asDiagonal()) - dense_defect(m, a, 1)) <= 1e-13);
    }
}

TEST_CASE("defect at m = 0 is the identity") {
    const UniversalModel m(family_xis(1.0, 2, 3), 3);
    CHECK(linalg::max_abs(defect_operator(m, invert(m.weights()), 0) - Matrix::Identity(m.dim(), m.dim())) == 0.0);
}

TEST_CASE("full defect is a diagonal orthogonal projection") {
    const UniversalModel m(family_gs(2.0, 3, 3), 3);
    const Matrix d = defect_operator(m, invert(m.weights()), 3);
    CHECK(linalg::max_abs(d * d - d) <= 1e-12);
    CHECK(linalg::max_abs(d - d.adjoint()) == 0.0);
    CHECK(linalg::max_abs(d - Matrix(d.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("admissibility of g_2") {
    const auto r = check_admissibility(family_gs(2.0, 2, 6), 6);
    for (const auto& c : r.checks) CHECK(c.status == "pass");
    REQUIRE(r.partial_sum_norms.size() == 7);
    for (double v : r.partial_sum_norms) CHECK(v <= 3.0);
    CHECK(r.partial_sum_norms.back() == doctest::Approx(1.0));
    CHECK(r.cauchy_increments.size() == 6);
}

TEST_CASE("admissibility of the constant family") {
    const auto r = check_admissibility(family_gs(1.0, 2, 6), 6);
    for (const auto& c : r.checks) CHECK(c.status == "pass");
    for (double v : r.partial_sum_norms) CHECK(v == doctest::Approx(1.0));
    CHECK(r.observed_sup == doctest::Approx(1.0));
}

TEST_CASE("weights with ratios forced to zero show a divergence trend") {
    // b_{g_1 alpha}/b_alpha -> 0: b_k = 1/(k!)^2, so b_k/b_{k+1} = (k+1)^2 grows without bound.
    const auto inv = level_family(2, 7, [](int k) { return 1.0L / (factorial(k) * factorial(k)); });
    const auto r = check_admissibility(inv, 7);
    CHECK(r.observed_sup == doctest::Approx(49.0));
    bool flagged = false;
    for (const auto& c : r.checks) {
        if (c.name == "ratio_sup") flagged = c.status == "divergence-trend";
    }
    CHECK(flagged);

    // b_k = (k!)^2 grows superexponentially; the radius estimates blow up instead.
    const auto fwd = level_family(2, 7, [](int k) { return factorial(k) * factorial(k); });
    const auto r2 = check_admissibility(fwd, 7);
    bool any = false;
    for (const auto& c : r2.checks) any = any || c.status == "divergence-trend";
    CHECK(any);
    CHECK(r2.radius_trend == "increasing");
}

TEST_CASE("admissibility rejects non-positive weights and names the word") {
    auto t = make_table(2, 2);
    std::vector<Coeff> c(t->size(), 1.0L);
    c[t->index_of(Word(2, {2, 1}))] = 0.0L;
    CHECK_THROWS_WITH_AS(check_admissibility(FreeSeries(t, c), 2), doctest::Contains("\"2.1\""), Error);
}

TEST_CASE("boundary: noncommutative Dirichlet weights") {
    for (int N : {4, 8, 10}) {
        const auto r = boundary_property(family_xis(-1.0, 2, N + 1), N);
        CHECK(r.verdict == "boundary-property-certified");
        CHECK(r.sup == 4.0);
        CHECK(r.sup_level == 0);
        for (int k = 0; k <= N; ++k) CHECK(r.s_max[static_cast<std::size_t>(k)] == doctest::Approx(2.0 * (k + 2) / (k + 1)).epsilon(1e-14));
        CHECK(r.tail_max == doctest::Approx(2.0 * (N + 2) / (N + 1)).epsilon(1e-14));
        CHECK(r.compactness_tail_small);
    }
}

TEST_CASE("boundary: constant weights fail the criterion") {
    const auto r = boundary_property(family_gs(1.0, 2, 9), 8);
    CHECK(r.verdict == "criterion-not-satisfied");
    for (double s : r.s_max) CHECK(s == 2.0);
    CHECK(r.sup == r.tail_max);
}

TEST_CASE("boundary: g_{1/2}") {
    const auto r = boundary_property(family_gs(0.5, 2, 9), 8);
    CHECK(r.verdict == "boundary-property-certified");
    // s_k = n (k+1)/(s+k)
    for (int k = 0; k <= 8; ++k) CHECK(r.s_max[static_cast<std::size_t>(k)] == doctest::Approx(2.0 * (k + 1) / (0.5 + k)).epsilon(1e-13));
    CHECK(r.sup == doctest::Approx(4.0));
}

TEST_CASE("boundary: increasing sequence is not certified") {
    // s_k = n (k+1)/(s+k) increases for s > 1.
    const auto r = boundary_property(family_gs(2.0, 2, 7), 6);
    CHECK(r.verdict == "criterion-not-satisfied");
    CHECK(r.sup_level == 6);
}

TEST_CASE("boundary: wide band on a non-level-constant family is inconclusive") {
    auto t = make_table(2, 4);
    std::vector<Coeff> c(t->size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        // Ratios b_gamma / b_{g_1 gamma} depend on how many g_1 letters gamma has.
        const Word wi = t->word_at(i);
        const auto& L = wi.letters();
        c[i] = 1.0L + static_cast<long double>(std::count(L.begin(), L.end(), 1));
    }
    const auto r = boundary_property(FreeSeries(t, c), 3);
    CHECK_FALSE(r.level_constant);
    CHECK(r.verdict == "inconclusive");
    CHECK(r.tail_max > r.tail_min);
}

TEST_CASE("boundary needs degree N + 1") {
    CHECK_THROWS_AS(boundary_property(family_gs(0.5, 2, 5), 5), Error);
}

TEST_CASE("certified verdict persists from N to N + 1 over the test matrix") {
    for (const auto& make : {+[](int n, int N) { return family_xis(-1.0, n, N); }, +[](int n, int N) { return family_gs(0.5, n, N); },
                             +[](int n, int N) { return family_xis(-2.0, n, N); }, +[](int n, int N) { return family_gs(1.0, n, N); }}) {
        for (int n = 1; n <= 3; ++n) {
            for (int N = 2; N <= 6; ++N) {
                const auto a = boundary_property(make(n, N + 1), N);
                const auto b = boundary_property(make(n, N + 2), N + 1);
                if (a.verdict == "boundary-property-certified") CHECK(b.verdict == "boundary-property-certified");
            }
        }
    }
}
