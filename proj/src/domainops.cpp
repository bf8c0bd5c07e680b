#include "fockdom/domainops.hpp"

#include <algorithm>
#include <cmath>

#include "fockdom/kernels.hpp"
#include "fockdom/linalg.hpp"

namespace fockdom {

OperatorTuple::OperatorTuple(std::vector<Matrix> mats) : t(std::move(mats)) {
    if (t.empty()) throw Error("tuple: at least one operator is required");
    const Eigen::Index d = t[0].rows();
    for (const auto& m : t) {
        if (m.rows() != d || m.cols() != d) throw Error("tuple: operators must be square of equal size");
    }
}

OperatorTuple OperatorTuple::scaled(double r) const {
    std::vector<Matrix> out;
    for (const auto& m : t) out.push_back(r * m);
    return OperatorTuple(std::move(out));
}

OperatorTuple OperatorTuple::conjugated(const Matrix& q) const {
    std::vector<Matrix> out;
    for (const auto& m : t) out.push_back(q * m * q.adjoint());
    return OperatorTuple(std::move(out));
}

OperatorTuple OperatorTuple::zero(int n, Eigen::Index d) {
    return OperatorTuple(std::vector<Matrix>(static_cast<std::size_t>(n), Matrix::Zero(d, d)));
}

OperatorTuple OperatorTuple::from_model(const UniversalModel& model) { return OperatorTuple(model.dense_tuple()); }

OperatorTuple OperatorTuple::direct_sum(const std::vector<OperatorTuple>& parts) {
    if (parts.empty()) throw Error("direct_sum: no summands");
    const int n = parts[0].n();
    Eigen::Index d = 0;
    for (const auto& p : parts) {
        if (p.n() != n) throw Error("direct_sum: summands have different n");
        d += p.dim();
    }
    std::vector<Matrix> out(static_cast<std::size_t>(n), Matrix::Zero(d, d));
    Eigen::Index off = 0;
    for (const auto& p : parts) {
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)].block(off, off, p.dim(), p.dim()) = p.t[static_cast<std::size_t>(i)];
        off += p.dim();
    }
    return OperatorTuple(std::move(out));
}

nlohmann::json OperatorTuple::to_json() const {
    nlohmann::json j;
    j["n"] = n();
    j["dim"] = dim();
    auto mats = nlohmann::json::array();
    for (const auto& m : t) {
        auto rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            auto row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
            rows.push_back(std::move(row));
        }
        mats.push_back(std::move(rows));
    }
    j["matrices"] = std::move(mats);
    return j;
}

OperatorTuple OperatorTuple::from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        const auto d = j.at("dim").get<Eigen::Index>();
        const auto& mats = j.at("matrices");
        if (mats.size() != static_cast<std::size_t>(n)) throw Error("tuple file: expected n matrices");
        std::vector<Matrix> out;
        for (const auto& rows : mats) {
            if (rows.size() != static_cast<std::size_t>(d)) throw Error("tuple file: matrix row count differs from dim");
            Matrix m(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                const auto& row = rows[static_cast<std::size_t>(i)];
                if (row.size() != static_cast<std::size_t>(d)) throw Error("tuple file: matrix column count differs from dim");
                for (Eigen::Index k = 0; k < d; ++k) {
                    const auto& e = row[static_cast<std::size_t>(k)];
                    m(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
                }
            }
            out.push_back(std::move(m));
        }
        return OperatorTuple(std::move(out));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("tuple file: ") + e.what());
    }
}

namespace {

std::vector<double> as_double(const FreeSeries& s) {
    std::vector<double> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = s.at(i);
    return v;
}

std::size_t level_end(const WordTable& t, int k) { return t.level_offset(k) + t.level_size(k); }

} // namespace

MembershipReport membership(const OperatorTuple& T, const FreeSeries& g, int M, const Tolerances& tol) {
    if (T.n() != g.n()) throw Error("membership: tuple size does not match the series generator count");
    if (M < 0 || M > g.degree()) throw Error("membership: M must lie in [0, degree of g]");
    const FreeSeries gm = g.truncate(M);
    const FreeSeries a = invert(gm);
    const WordTable& t = *gm.table();
    const auto words = kernels::word_products(T.t, t);
    const auto acoef = as_double(a);
    const auto bcoef = as_double(gm);
    const Eigen::Index d = T.dim();

    MembershipReport rep;
    rep.degree = M;
    Matrix delta = Matrix::Zero(d, d);
    for (int k = 0; k <= M; ++k) {
        const Matrix level = kernels::weighted_gram_sum(words, acoef, nullptr, t.level_offset(k), level_end(t, k));
        delta += level;
        rep.delta_norms.push_back(linalg::spectral_norm(delta));
        if (k > 0) rep.delta_increments.push_back(linalg::spectral_norm(level));
    }
    delta = linalg::hermitian_part(delta);
    rep.delta_norm = rep.delta_norms.back();
    rep.delta_min_eig = linalg::min_eig(delta);
    rep.psd = rep.delta_min_eig >= -tol.psd * std::max(rep.delta_norm, 1.0);
    rep.stabilized = rep.delta_increments.empty() || rep.delta_increments.back() <= tol.residual;

    Matrix sum = Matrix::Zero(d, d);
    const Matrix eye = Matrix::Identity(d, d);
    for (int k = 0; k <= M; ++k) {
        sum += kernels::weighted_gram_sum(words, bcoef, &delta, t.level_offset(k), level_end(t, k));
        rep.purity_residuals.push_back(linalg::spectral_norm(eye - sum));
    }
    rep.partial_sum_excess = std::max(0.0, -linalg::min_eig(eye - sum));
    rep.delta = delta;

    const double rho = rep.purity_residuals.back();
    const double rho_half = rep.purity_residuals[static_cast<std::size_t>(M / 2)];
    if (!rep.psd) {
        rep.verdict = rep.stabilized ? "not-member" : "inconclusive";
    } else if (rep.delta_norm <= tol.psd) {
        rep.verdict = rep.stabilized ? "Cuntz" : "inconclusive";
    } else if (rho <= tol.residual && rho <= rho_half) {
        rep.verdict = "pure";
    } else if (rep.partial_sum_excess <= tol.residual) {
        rep.verdict = "member";
    } else {
        rep.verdict = rep.stabilized ? "not-member" : "inconclusive";
    }
    return rep;
}

RadialScan radial_scan(const OperatorTuple& T, const FreeSeries& g, const std::vector<double>& grid, int M,
                       const Tolerances& tol) {
    RadialScan scan;
    for (double r : grid) {
        if (!(r > 0.0 && r < 1.0)) throw Error("radial scan: grid values must lie in (0, 1)");
        RadialPoint p{r, membership(T.scaled(r), g, M, tol)};
        if (p.report.verdict == "pure" && (!scan.largest_pure_r || r > *scan.largest_pure_r)) scan.largest_pure_r = r;
        scan.points.push_back(std::move(p));
    }
    return scan;
}

BerezinKernel berezin_kernel(const OperatorTuple& T, const FreeSeries& g, int N, const Tolerances& tol) {
    if (T.n() != g.n()) throw Error("berezin: tuple size does not match the series generator count");
    if (N < 0 || N > g.degree()) throw Error("berezin: N must lie in [0, degree of g]");
    const UniversalModel model(g, N);
    const FreeSeries a = invert(model.weights());
    const WordTable& t = *model.table();
    const auto words = kernels::word_products(T.t, t);
    const Eigen::Index d = T.dim();

    BerezinKernel bk;
    bk.delta = linalg::hermitian_part(kernels::weighted_gram_sum(words, as_double(a), nullptr, 0, t.size()));
    const double scale = std::max(linalg::spectral_norm(bk.delta), 1.0);
    if (linalg::min_eig(bk.delta) < -tol.psd * scale) throw Error("berezin: defect operator is not positive semidefinite");
    bk.delta_sqrt = linalg::psd_sqrt(bk.delta, tol.psd * scale);
    bk.defect_basis = linalg::orthonormal_range(bk.delta_sqrt, tol.rank);
    bk.multiplicity = bk.defect_basis.cols();

    std::vector<double> sb(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) sb[i] = std::sqrt(model.b(i));
    const Matrix left = bk.defect_basis.adjoint() * bk.delta_sqrt;
    bk.K = kernels::stacked_blocks(words, sb, left, t.size());
    bk.isometry_defect = linalg::spectral_norm(bk.K.adjoint() * bk.K - Matrix::Identity(d, d));
    for (int i = 1; i <= T.n(); ++i) {
        const Matrix lhs = bk.K * T[i].adjoint();
        const Matrix rhs = kernels::shift_left_adjoint(model.W(i), bk.K, bk.multiplicity);
        bk.intertwining.push_back(linalg::spectral_norm(lhs - rhs));
    }
    return bk;
}

Eigen::Index dilation_index(const OperatorTuple& T, const FreeSeries& g, const Tolerances& tol) {
    const MembershipReport rep = membership(T, g, g.degree(), tol);
    if (rep.verdict != "pure") throw Error("dilation index defined here only for pure tuples");
    return linalg::numerical_rank(rep.delta, tol.rank);
}

namespace {

double coinvariance_defect(const Matrix& v, const UniversalModel& model, Eigen::Index m) {
    double worst = 0.0;
    for (int i = 1; i <= model.n(); ++i) {
        const Matrix x = kernels::shift_left_adjoint(model.W(i), v, m);
        worst = std::max(worst, linalg::spectral_norm(x - v * (v.adjoint() * x)));
    }
    return worst;
}

void check_embedding(const Matrix& v, const UniversalModel& model, Eigen::Index m) {
    if (m < 1 || v.rows() != static_cast<Eigen::Index>(model.dim()) * m) {
        throw Error("embedding: row count must equal dim(F_N) * multiplicity");
    }
}

} // namespace

MinimalityReport minimality_check(const Matrix& v, const UniversalModel& model, Eigen::Index m, double tol) {
    check_embedding(v, model, m);
    MinimalityReport rep;
    rep.coinvariance_defect = coinvariance_defect(v, model, m);
    if (rep.coinvariance_defect > tol) throw Error("minimality: subspace is not co-invariant within tolerance");

    const WordTable& t = *model.table();
    const Eigen::Index d = v.cols();
    std::vector<Matrix> orbit(t.size());
    orbit[0] = v;
    for (std::size_t idx = 1; idx < t.size(); ++idx) {
        orbit[idx] = kernels::shift_left(model.W(t.first_letter(idx)), orbit[t.tail(idx)], m, kernels::Exec::serial);
    }
    Matrix stacked(v.rows(), d * static_cast<Eigen::Index>(t.size()));
    for (std::size_t idx = 0; idx < t.size(); ++idx) stacked.middleCols(static_cast<Eigen::Index>(idx) * d, d) = orbit[idx];
    rep.span_rank = linalg::numerical_rank(stacked, 1e-10, 1e-12);

    const Matrix v0 = v.topRows(m);
    rep.vacuum_rank = linalg::numerical_rank(v0, 1e-10, 1e-12);
    rep.vacuum_nullity = linalg::null_space(v0.adjoint(), 1e-10, 1e-12).cols();

    rep.flag_span = rep.span_rank == v.rows();
    rep.flag_vacuum = rep.vacuum_rank == m;
    rep.flag_orthogonal = rep.vacuum_nullity == 0;
    rep.agree = rep.flag_span == rep.flag_vacuum && rep.flag_vacuum == rep.flag_orthogonal;
    rep.minimal = rep.agree && rep.flag_span;
    return rep;
}

ReducedDilation reduce_dilation(const Matrix& v, const UniversalModel& model, Eigen::Index m, double tol) {
    check_embedding(v, model, m);
    if (coinvariance_defect(v, model, m) > tol) throw Error("reduce: subspace is not co-invariant within tolerance");
    ReducedDilation red;
    red.g0 = linalg::orthonormal_range(v.topRows(m), 1e-10, 1e-12);
    const Eigen::Index m0 = red.g0.cols();
    const auto dim = static_cast<Eigen::Index>(model.dim());
    red.embedding = Matrix::Zero(dim * m0, v.cols());
    Matrix projected = Matrix::Zero(v.rows(), v.cols());
    for (Eigen::Index a = 0; a < dim; ++a) {
        const Matrix blk = v.middleRows(a * m, m);
        red.embedding.middleRows(a * m0, m0) = red.g0.adjoint() * blk;
        projected.middleRows(a * m, m) = red.g0 * (red.g0.adjoint() * blk);
    }
    red.orthogonality_defect = linalg::spectral_norm(v - projected);
    for (int i = 1; i <= model.n(); ++i) {
        const Matrix before = v.adjoint() * kernels::shift_left_adjoint(model.W(i), v, m);
        const Matrix after = m0 == 0 ? Matrix::Zero(v.cols(), v.cols())
                                     : Matrix(red.embedding.adjoint() *
                                              kernels::shift_left_adjoint(model.W(i), red.embedding, m0));
        red.tuple_change = std::max(red.tuple_change, linalg::spectral_norm(before - after));
    }
    return red;
}

LiftEquivalence lift_equivalence(const OperatorTuple& T, const OperatorTuple& Tp, const Matrix& v,
                                 const FreeSeries& g, int N, double tol) {
    if (T.n() != Tp.n() || T.dim() != Tp.dim() || v.rows() != T.dim() || v.cols() != T.dim()) {
        throw Error("lift: incompatible shapes");
    }
    for (int i = 1; i <= T.n(); ++i) {
        if (linalg::spectral_norm(v * T[i] - Tp[i] * v) > tol) throw Error("lift: V does not intertwine the tuples");
    }
    Tolerances tl;
    if (membership(T, g, N, tl).verdict != "pure" || membership(Tp, g, N, tl).verdict != "pure") {
        throw Error("lift: both tuples must be pure");
    }
    const BerezinKernel k = berezin_kernel(T, g, N, tl);
    const BerezinKernel kp = berezin_kernel(Tp, g, N, tl);
    LiftEquivalence out;
    out.u = kp.defect_basis.adjoint() * v * k.defect_basis;
    if (out.u.rows() == out.u.cols()) {
        out.unitarity_defect = linalg::spectral_norm(out.u.adjoint() * out.u - Matrix::Identity(out.u.cols(), out.u.cols()));
    } else {
        out.unitarity_defect = INFINITY;
    }
    const Eigen::Index m = k.multiplicity;
    const Eigen::Index mp = kp.multiplicity;
    const Eigen::Index words = m == 0 ? 0 : k.K.rows() / m;
    Matrix lifted = Matrix::Zero(kp.K.rows(), k.K.cols());
    for (Eigen::Index a = 0; a < words; ++a) lifted.middleRows(a * mp, mp) = out.u * k.K.middleRows(a * m, m);
    out.residual = linalg::spectral_norm(lifted - kp.K * v);
    return out;
}

Matrix apply_word_pairs(const UniversalModel& model, const std::vector<WordPairTerm>& a, const Matrix& x,
                        Eigen::Index m) {
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const auto& term : a) {
        Matrix y = x;
        for (int letter : term.beta.letters()) y = kernels::shift_left_adjoint(model.W(letter), y, m);
        const auto& al = term.alpha.letters();
        for (auto it = al.rbegin(); it != al.rend(); ++it) y = kernels::shift_left(model.W(*it), y, m);
        out += term.c * y;
    }
    return out;
}

BerezinTransform berezin_transform(const OperatorTuple& T, const FreeSeries& g,
                                   const std::vector<WordPairTerm>& a, const std::vector<double>& grid, int N,
                                   const Tolerances& tol) {
    if (grid.empty()) throw Error("berezin transform: empty r grid");
    const UniversalModel model(g, N);
    BerezinTransform bt;
    const Eigen::Index d = T.dim();
    for (double r : grid) {
        if (!(r > 0.0 && r < 1.0)) throw Error("berezin transform: grid values must lie in (0, 1)");
        const OperatorTuple rt = T.scaled(r);
        bool pure = false;
        Matrix value = Matrix::Zero(d, d);
        try {
            pure = membership(rt, g, N, tol).verdict == "pure";
            const BerezinKernel k = berezin_kernel(rt, g, N, tol);
            if (k.multiplicity > 0) value = k.K.adjoint() * apply_word_pairs(model, a, k.K, k.multiplicity);
        } catch (const Error&) {
            pure = false;
        }
        bt.r.push_back(r);
        bt.values.push_back(value);
        bt.pure.push_back(pure);
    }
    const std::size_t L = bt.values.size();
    if (L == 1) {
        bt.extrapolated = bt.values[0];
    } else {
        const double r1 = bt.r[L - 2];
        const double r2 = bt.r[L - 1];
        bt.extrapolated = bt.values[L - 1] + (bt.values[L - 1] - bt.values[L - 2]) * ((1.0 - r2) / (r2 - r1));
    }
    bt.target = Matrix::Zero(d, d);
    auto word_op = [&](const Word& w) {
        Matrix p = Matrix::Identity(d, d);
        for (int letter : w.letters()) p = p * T[letter];
        return p;
    };
    for (const auto& term : a) bt.target += term.c * word_op(term.alpha) * word_op(term.beta).adjoint();
    bt.extrapolation_error = linalg::spectral_norm(bt.extrapolated - bt.target);
    return bt;
}

OperatorTuple random_nilpotent_member(int n, Eigen::Index d, const FreeSeries& g, linalg::Rng& rng,
                                      const Tolerances& tol, double shrink) {
    if (g.degree() < d) throw Error("random tuple: series degree must be at least d");
    std::vector<Matrix> mats;
    for (int i = 0; i < n; ++i) {
        Matrix m = linalg::random_complex(rng, d, d).triangularView<Eigen::StrictlyUpper>();
        mats.push_back(std::move(m));
    }
    Matrix rowsum = Matrix::Zero(d, d);
    for (const auto& m : mats) rowsum += m * m.adjoint();
    const double nrm = std::sqrt(std::max(linalg::spectral_norm(rowsum), 1e-300));
    std::uniform_real_distribution<double> u(0.5, 1.0);
    OperatorTuple t = OperatorTuple(std::move(mats)).scaled(u(rng) / nrm);
    const int M = static_cast<int>(d);
    for (int step = 0; step < 200; ++step) {
        const MembershipReport rep = membership(t, g, M, tol);
        if (rep.psd && rep.delta_min_eig > 0.0) return t;
        t = t.scaled(shrink);
    }
    throw Error("random tuple: no admissible scaling found");
}

} // namespace fockdom
