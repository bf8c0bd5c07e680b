#include "fockdom/factorization.hpp"

#include <algorithm>
#include <cmath>

#include "fockdom/kernels.hpp"
#include "fockdom/normopt.hpp"

namespace fockdom {

namespace {

std::vector<double> weights_of(const UniversalModel& m) {
    std::vector<double> b(m.dim());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = m.b(i);
    return b;
}

// Columns of the source words below the top level.
Eigen::Index off_top_cols(const MultiAnalyticOperator& a) {
    const int N = a.source->degree();
    return static_cast<Eigen::Index>(a.source->table()->level_offset(N)) * a.source_mult;
}

Matrix intertwining_difference(const MultiAnalyticOperator& a, int i) {
    return kernels::shift_right(a.M, a.source->W(i), a.source_mult) -
           kernels::shift_left(a.target->W(i), a.M, a.target_mult);
}

bool same_weights(const UniversalModel& x, const UniversalModel& y) {
    if (x.dim() != y.dim() || x.n() != y.n()) return false;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (std::fabs(x.b(i) - y.b(i)) > 1e-14 * std::max(1.0, std::fabs(x.b(i)))) return false;
    }
    return true;
}

} // namespace

double MultiAnalyticOperator::intertwining_residual() const {
    const Eigen::Index cols = off_top_cols(*this);
    double worst = 0.0;
    if (cols == 0) return 0.0;
    for (int i = 1; i <= source->n(); ++i) {
        worst = std::max(worst, linalg::spectral_norm(intertwining_difference(*this, i).leftCols(cols)));
    }
    return worst;
}

double MultiAnalyticOperator::boundary_residual() const {
    const Eigen::Index cols = off_top_cols(*this);
    double worst = 0.0;
    for (int i = 1; i <= source->n(); ++i) {
        const Matrix diff = intertwining_difference(*this, i);
        worst = std::max(worst, linalg::spectral_norm(diff.rightCols(diff.cols() - cols)));
    }
    return worst;
}

MultiAnalyticOperator from_symbol(const Matrix& theta, ModelPtr source, Eigen::Index source_mult, ModelPtr target,
                                  Eigen::Index target_mult) {
    if (theta.cols() != source_mult) throw Error("from_symbol: symbol columns must equal the source multiplicity");
    MultiAnalyticOperator op;
    op.M = kernels::symbol_extend(theta, *target, target_mult, *source->table(), weights_of(*source));
    op.symbol = theta;
    op.source = std::move(source);
    op.source_mult = source_mult;
    op.target = std::move(target);
    op.target_mult = target_mult;
    return op;
}

MultiAnalyticOperator wrap_multi_analytic(const Matrix& m, ModelPtr source, Eigen::Index source_mult,
                                          ModelPtr target, Eigen::Index target_mult) {
    if (m.rows() != static_cast<Eigen::Index>(target->dim()) * target_mult ||
        m.cols() != static_cast<Eigen::Index>(source->dim()) * source_mult) {
        throw Error("multi-analytic: matrix shape does not match the models");
    }
    MultiAnalyticOperator op;
    op.M = m;
    op.symbol = m.leftCols(source_mult);
    op.source = std::move(source);
    op.source_mult = source_mult;
    op.target = std::move(target);
    op.target_mult = target_mult;
    return op;
}

MultiAnalyticOperator identity_operator(ModelPtr model, Eigen::Index mult) {
    const Eigen::Index rows = static_cast<Eigen::Index>(model->dim()) * mult;
    const Matrix theta = Matrix::Identity(rows, mult);
    return from_symbol(theta, model, mult, model, mult);
}

double invariance_defect(const Matrix& q, const UniversalModel& model, Eigen::Index mult) {
    double worst = 0.0;
    for (int i = 1; i <= model.n(); ++i) {
        const Matrix x = kernels::shift_left(model.W(i), q, mult);
        worst = std::max(worst, linalg::spectral_norm(x - q * (q.adjoint() * x)));
    }
    return worst;
}

InvariantSubspace make_invariant_subspace(const Matrix& spanning, const UniversalModel& model, Eigen::Index mult,
                                          double tol) {
    if (spanning.rows() != static_cast<Eigen::Index>(model.dim()) * mult) {
        throw Error("invariant subspace: vector length must equal dim(F_N) * multiplicity");
    }
    InvariantSubspace s;
    s.mult = mult;
    s.basis = linalg::orthonormal_range(spanning, 1e-10);
    s.closure_defect = invariance_defect(s.basis, model, mult);
    if (s.closure_defect > tol) throw Error("invariant subspace: closure defect exceeds tolerance");
    return s;
}

InvariantSubspace random_invariant_subspace(const UniversalModel& model, Eigen::Index mult, int seeds, int min_level,
                                            linalg::Rng& rng) {
    const WordTable& t = *model.table();
    if (min_level < 0 || min_level > t.degree()) throw Error("random subspace: min_level outside [0, N]");
    const auto rows = static_cast<Eigen::Index>(t.size()) * mult;
    const auto start = static_cast<Eigen::Index>(t.level_offset(min_level)) * mult;
    Matrix v = Matrix::Zero(rows, seeds);
    v.bottomRows(rows - start) = linalg::random_complex(rng, rows - start, seeds);

    std::vector<Matrix> orbit(t.size());
    orbit[0] = v;
    for (std::size_t idx = 1; idx < t.size(); ++idx) {
        orbit[idx] = kernels::shift_left(model.W(t.first_letter(idx)), orbit[t.tail(idx)], mult);
    }
    Matrix stacked(rows, static_cast<Eigen::Index>(t.size()) * seeds);
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
        Matrix blk = orbit[idx];
        for (Eigen::Index c = 0; c < blk.cols(); ++c) {
            const double nrm = blk.col(c).norm();
            if (nrm > 0.0) blk.col(c) /= nrm;
        }
        stacked.middleCols(static_cast<Eigen::Index>(idx) * seeds, seeds) = blk;
    }
    return make_invariant_subspace(stacked, model, mult, 1e-8);
}

namespace {

// Y^{1/2} = R diag(lam) R^* with R orthonormal.
ToeplitzResult factor_from_root(const Matrix& r, const RealVector& lam, const Matrix& y, ModelPtr fmodel,
                                Eigen::Index mult, const FreeSeries& g, int Ng, double tol) {
    ToeplitzResult res;
    auto gmodel = make_model(g, Ng);
    const Eigen::Index rk = r.cols();
    if (rk == 0) {
        res.psi = from_symbol(Matrix::Zero(y.rows(), 1), gmodel, 1, fmodel, mult);
        res.factor_residual = linalg::spectral_norm(y);
        return res;
    }
    const Eigen::VectorXcd lc = lam.cast<Complex>();
    const Eigen::VectorXcd linv = lam.cwiseInverse().cast<Complex>();
    std::vector<Matrix> f;
    for (int i = 1; i <= fmodel->n(); ++i) {
        const Matrix wr = kernels::shift_left(fmodel->W(i), r, mult);
        f.push_back(linv.asDiagonal() * (r.adjoint() * wr) * lc.asDiagonal());
    }
    res.f_tuple = OperatorTuple(std::move(f));
    Tolerances tl;
    tl.psd = tol;
    const BerezinKernel k = berezin_kernel(res.f_tuple, g, Ng, tl);
    res.defect_dim = k.multiplicity;
    res.kernel_isometry_defect = k.isometry_defect;
    if (k.multiplicity == 0) throw Error("toeplitz: defect space of the intermediate tuple is trivial");
    const Matrix psi = (r * lc.asDiagonal()) * k.K.adjoint();
    res.psi = wrap_multi_analytic(psi, gmodel, k.multiplicity, fmodel, mult);
    res.factor_residual = linalg::spectral_norm(psi * psi.adjoint() - y);
    res.multi_analytic_residual = res.psi.intertwining_residual();
    res.boundary_residual = res.psi.boundary_residual();
    return res;
}

double hypothesis_min_eig(const Matrix& y, const UniversalModel& fmodel, Eigen::Index mult, const FreeSeries& a,
                          int Ng) {
    const WordTable& t = *fmodel.table();
    const int top = std::min(Ng, t.degree());
    Matrix h = y;
    std::vector<Matrix> prev{y};
    for (int k = 1; k <= top; ++k) {
        const std::size_t off = t.level_offset(k);
        const std::size_t poff = t.level_offset(k - 1);
        std::vector<Matrix> cur(t.level_size(k));
        for (std::size_t q = 0; q < cur.size(); ++q) {
            const std::size_t idx = off + q;
            const ShiftOperator& w = fmodel.W(t.first_letter(idx));
            const Matrix& z = prev[t.tail(idx) - poff];
            const Matrix wz = kernels::shift_left(w, z, mult);
            cur[q] = kernels::shift_left(w, Matrix(wz.adjoint()), mult).adjoint();
            h += static_cast<double>(a[idx]) * cur[q];  // -c_alpha = a_alpha
        }
        prev = std::move(cur);
    }
    return linalg::min_eig(h);
}

void require_regular(const FreeSeries& g, int Ng) {
    if (g.degree() < Ng) throw Error("toeplitz: series g shorter than Ng");
    const RegularityReport reg = is_regular_domain(invert(g.truncate(Ng)));
    if (!reg.regular) throw Error("toeplitz: g does not define a regular domain");
}

} // namespace

ToeplitzResult toeplitz_factorize(const Matrix& y, ModelPtr fmodel, Eigen::Index mult, const FreeSeries& g, int Ng,
                                  double tol) {
    const Eigen::Index rows = static_cast<Eigen::Index>(fmodel->dim()) * mult;
    if (y.rows() != rows || y.cols() != rows) throw Error("toeplitz: Y must be square on F_N (x) C^K");
    if (g.n() != fmodel->n()) throw Error("toeplitz: generator counts differ");
    require_regular(g, Ng);
    const Matrix yh = linalg::hermitian_part(y);
    const double scale = std::max(1.0, linalg::spectral_norm(yh));
    const double hyp = hypothesis_min_eig(yh, *fmodel, mult, invert(g.truncate(Ng)), Ng);
    if (hyp < -tol * scale) throw Error("toeplitz: positivity hypothesis violated");

    const linalg::EigenPair ep = linalg::hermitian_eig(yh);
    if (ep.values.size() > 0 && ep.values(0) < -tol * scale) throw Error("toeplitz: Y has a negative eigenvalue");
    const double top = ep.values.size() > 0 ? ep.values(ep.values.size() - 1) : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = ep.values.size() - 1; i >= 0; --i) {
        if (ep.values(i) > 1e-10 * top && ep.values(i) > 0.0) keep.push_back(i);
    }
    Matrix r(rows, static_cast<Eigen::Index>(keep.size()));
    RealVector lam(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        r.col(static_cast<Eigen::Index>(j)) = ep.vectors.col(keep[j]);
        lam(static_cast<Eigen::Index>(j)) = std::sqrt(ep.values(keep[j]));
    }
    linalg::normalize_phases(r);
    ToeplitzResult res = factor_from_root(r, lam, yh, fmodel, mult, g, Ng, tol);
    res.hypothesis_min_eig = hyp;
    return res;
}

BeurlingResult beurling_factorize(const InvariantSubspace& m, ModelPtr fmodel, double tol) {
    const double defect = invariance_defect(m.basis, *fmodel, m.mult);
    if (defect > tol) throw Error("beurling: subspace is not invariant within tolerance");
    const Envelope env = envelope_series(fmodel->weights());
    BeurlingResult res;
    res.d = env.d;
    res.d_closed_form = env.closed_form;
    res.d_provisional = env.provisional;
    res.d_note = env.note;

    const int N = fmodel->degree();
    const Matrix& q = m.basis;
    const Matrix pm = q * q.adjoint();
    require_regular(env.g2, N);
    const double hyp = hypothesis_min_eig(pm, *fmodel, m.mult, env.g2_inverse, N);
    if (hyp < -tol) throw Error("beurling: envelope hypothesis violated");
    res.factor = factor_from_root(q, RealVector::Ones(q.cols()), pm, fmodel, m.mult, env.g2, N, tol);
    res.factor.hypothesis_min_eig = hyp;

    const Matrix& psi = res.factor.psi.M;
    const linalg::EigenPair ep = linalg::hermitian_eig(psi * psi.adjoint());
    double pid = 0.0;
    std::vector<Eigen::Index> range_cols;
    for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
        const double s2 = std::max(ep.values(i), 0.0);
        pid = std::max(pid, std::fabs(s2 - s2 * s2));
        if (s2 > 0.5) range_cols.push_back(i);
    }
    res.partial_isometry_defect = pid;
    Matrix rq(psi.rows(), static_cast<Eigen::Index>(range_cols.size()));
    for (std::size_t j = 0; j < range_cols.size(); ++j) rq.col(static_cast<Eigen::Index>(j)) = ep.vectors.col(range_cols[j]);
    res.range_distance = linalg::subspace_distance(rq, q);

    const auto& src = *res.factor.psi.source;
    const Eigen::Index md = res.factor.psi.source_mult;
    const Eigen::Index cols = static_cast<Eigen::Index>(src.table()->level_offset(src.degree())) * md;
    const double sd = std::sqrt(res.d);
    double inner = 0.0;
    double edge = 0.0;
    for (int i = 1; i <= fmodel->n(); ++i) {
        const Matrix diff = sd * kernels::shift_right(psi, src.S(i), md) - kernels::shift_left(fmodel->W(i), psi, m.mult);
        inner = std::max(inner, linalg::spectral_norm(diff.leftCols(cols)));
        edge = std::max(edge, linalg::spectral_norm(diff.rightCols(diff.cols() - cols)));
    }
    res.intertwining_residual = inner;
    res.boundary_residual = edge;
    return res;
}

Matrix right_multiply_fiber(const Matrix& a, const Matrix& v) {
    const Eigen::Index k1 = v.rows();
    if (k1 == 0 || a.cols() % k1 != 0) throw Error("fiber multiply: column count is not a multiple of the fiber");
    const Eigen::Index words = a.cols() / k1;
    Matrix out(a.rows(), words * v.cols());
    for (Eigen::Index w = 0; w < words; ++w) out.middleCols(w * v.cols(), v.cols()) = a.middleCols(w * k1, k1) * v;
    return out;
}

SupportResult support(const MultiAnalyticOperator& a, double rel_tol) {
    SupportResult s;
    s.g = linalg::orthonormal_range(a.symbol.adjoint(), rel_tol, 1e-14);
    const Matrix comp = Matrix::Identity(a.source_mult, a.source_mult) - s.g * s.g.adjoint();
    s.vanishing_defect = linalg::spectral_norm(right_multiply_fiber(a.M, comp));
    return s;
}

CoincidenceResult coincidence(const MultiAnalyticOperator& a1, const MultiAnalyticOperator& a2, double tol) {
    if (a1.M.rows() != a2.M.rows()) throw Error("coincidence: targets differ");
    if (!same_weights(*a1.source, *a2.source)) throw Error("coincidence: source models differ");
    CoincidenceResult res;
    res.hypothesis_defect = linalg::spectral_norm(a1.M * a1.M.adjoint() - a2.M * a2.M.adjoint());
    if (res.hypothesis_defect > tol) throw Error("coincidence: A1 A1^* and A2 A2^* differ beyond tolerance");
    res.v = linalg::pinv(a2.symbol, 1e-10) * a1.symbol;
    res.residual = linalg::spectral_norm(a1.M - right_multiply_fiber(a2.M, res.v));
    const Matrix g1 = support(a1).g;
    res.support_defect = linalg::spectral_norm(res.v.adjoint() * res.v - g1 * g1.adjoint());
    return res;
}

LiftReport verify_commutant_lift(const Matrix& x, const Matrix& q1, const Matrix& q2,
                                 const MultiAnalyticOperator& gamma, double tol) {
    const UniversalModel& src = *gamma.source;
    const UniversalModel& tgt = *gamma.target;
    const Eigen::Index m1 = gamma.source_mult;
    const Eigen::Index m2 = gamma.target_mult;
    if (q1.rows() != gamma.M.cols() || q2.rows() != gamma.M.rows() || x.rows() != q2.cols() || x.cols() != q1.cols()) {
        throw Error("lift: incompatible shapes");
    }
    auto coinv = [](const Matrix& q, const UniversalModel& model, Eigen::Index m) {
        double worst = 0.0;
        for (int i = 1; i <= model.n(); ++i) {
            const Matrix y = kernels::shift_left_adjoint(model.W(i), q, m);
            worst = std::max(worst, linalg::spectral_norm(y - q * (q.adjoint() * y)));
        }
        return worst;
    };
    const double xn = linalg::spectral_norm(x);
    const double sx = std::max(1.0, xn);
    LiftReport rep;
    const double c1 = coinv(q1, src, m1);
    rep.clauses.push_back({"g1_coinvariant", c1 <= tol, c1});
    const double c2 = coinv(q2, tgt, m2);
    rep.clauses.push_back({"g2_coinvariant", c2 <= tol, c2});
    double hyp = 0.0;
    for (int i = 1; i <= src.n(); ++i) {
        const Matrix t1 = q1.adjoint() * kernels::shift_left(src.W(i), q1, m1);
        const Matrix t2 = q2.adjoint() * kernels::shift_left(tgt.W(i), q2, m2);
        hyp = std::max(hyp, linalg::spectral_norm(x * t1 - t2 * x));
    }
    rep.clauses.push_back({"hypothesis_intertwining", hyp <= tol * sx, hyp});
    const double ma = gamma.intertwining_residual();
    rep.clauses.push_back({"gamma_multi_analytic", ma <= tol * std::max(1.0, linalg::spectral_norm(gamma.M)), ma});
    const double restr = linalg::spectral_norm(gamma.M.adjoint() * q2 - q1 * x.adjoint());
    rep.clauses.push_back({"restriction", restr <= tol * sx, restr});
    const double gn = linalg::spectral_norm(gamma.M);
    rep.clauses.push_back({"norm_bound", gn <= xn * (1.0 + tol) + tol, gn - xn});
    rep.pass = std::all_of(rep.clauses.begin(), rep.clauses.end(), [](const LiftClause& c) { return c.pass; });
    return rep;
}

namespace {

struct SymbolSolve {
    MultiAnalyticOperator c;
    double symbol_residual = 0.0;
    double ls_norm = 0.0;
};

// Least-squares symbol of C with B theta_C = theta_A, then the least-norm C on the solution set.
SymbolSolve solve_symbol_system(const MultiAnalyticOperator& a, const MultiAnalyticOperator& b) {
    if (a.M.rows() != b.M.rows()) throw Error("corona: A and B must share the target space");
    if (a.source->n() != b.source->n()) throw Error("corona: generator counts differ");
    const Matrix& bm = b.M;
    const Matrix theta0 = linalg::pinv(bm, 1e-10) * a.symbol;
    SymbolSolve out;
    out.symbol_residual = linalg::spectral_norm(bm * theta0 - a.symbol);
    MultiAnalyticOperator c0 = from_symbol(theta0, a.source, a.source_mult, b.source, b.source_mult);
    out.ls_norm = linalg::spectral_norm(c0.M);

    const Matrix nul = linalg::null_space(bm, 1e-10);
    const Eigen::Index nu = nul.cols();
    const Eigen::Index ma = a.source_mult;
    constexpr Eigen::Index kMaxVars = 600;
    if (nu == 0 || 2 * nu * ma > kMaxVars) {
        out.c = std::move(c0);
        return out;
    }
    std::vector<Matrix> basis;
    std::vector<Matrix> sym;
    for (Eigen::Index e = 0; e < ma; ++e) {
        for (Eigen::Index j = 0; j < nu; ++j) {
            Matrix th = Matrix::Zero(theta0.rows(), ma);
            th.col(e) = nul.col(j);
            const Matrix cj = from_symbol(th, a.source, ma, b.source, b.source_mult).M;
            basis.push_back(cj);
            basis.push_back(Complex(0.0, 1.0) * cj);
            sym.push_back(th);
            sym.push_back(Complex(0.0, 1.0) * th);
        }
    }
    const normopt::Result opt = normopt::minimize_spectral_norm(c0.M, basis);
    Matrix theta = theta0;
    for (std::size_t j = 0; j < sym.size(); ++j) theta += opt.x(static_cast<Eigen::Index>(j)) * sym[j];
    out.c = from_symbol(theta, a.source, a.source_mult, b.source, b.source_mult);
    if (linalg::spectral_norm(out.c.M) > out.ls_norm) out.c = std::move(c0);
    return out;
}

} // namespace

CoronaResult corona_solve(const MultiAnalyticOperator& a, const MultiAnalyticOperator& b, double tol) {
    CoronaResult res;
    const Matrix dmat = linalg::hermitian_part(b.M * b.M.adjoint() - a.M * a.M.adjoint());
    const linalg::EigenPair ep = linalg::hermitian_eig(dmat);
    res.douglas_min_eig = ep.values(0);

    SymbolSolve s = solve_symbol_system(a, b);
    res.symbol_residual = s.symbol_residual;
    res.c_norm_least_squares = s.ls_norm;
    res.residual = linalg::spectral_norm(a.M - b.M * s.c.M);
    res.c_norm = linalg::spectral_norm(s.c.M);
    res.contractive = res.c_norm <= 1.0 + tol;

    if (res.douglas_min_eig >= -tol && res.symbol_residual <= tol) {
        res.verdict = "feasible";
    } else if (res.douglas_min_eig < -tol) {
        res.verdict = "infeasible";
        const Vector x = ep.vectors.col(0);
        res.witness = x;
        res.witness_gap = (a.M.adjoint() * x).squaredNorm() - (b.M.adjoint() * x).squaredNorm();
    } else {
        res.verdict = "inconclusive";
    }
    res.c = std::move(s.c);
    return res;
}

CoronaRowResult corona_row(const std::vector<MultiAnalyticOperator>& phi, double tol) {
    if (phi.empty()) throw Error("corona_row: no operators");
    const ModelPtr src = phi[0].source;
    const ModelPtr tgt = phi[0].target;
    const Eigen::Index mf = phi[0].target_mult;
    Eigen::Index total = 0;
    std::vector<Eigen::Index> offsets;
    for (const auto& p : phi) {
        if (!same_weights(*p.source, *src) || !same_weights(*p.target, *tgt) || p.target_mult != mf) {
            throw Error("corona_row: operators must share source and target models");
        }
        offsets.push_back(total);
        total += p.source_mult;
    }
    Matrix theta(phi[0].symbol.rows(), total);
    for (std::size_t k = 0; k < phi.size(); ++k) theta.middleCols(offsets[k], phi[k].source_mult) = phi[k].symbol;
    const MultiAnalyticOperator row = from_symbol(theta, src, total, tgt, mf);

    CoronaRowResult res;
    const linalg::EigenPair ep = linalg::hermitian_eig(row.M * row.M.adjoint());
    res.delta_hat = ep.values(0);
    if (res.delta_hat <= tol) {
        res.verdict = "lower-bound-failure";
        res.witness = ep.vectors.col(0);
        return res;
    }
    res.bound = 1.0 / std::sqrt(res.delta_hat);
    const MultiAnalyticOperator id = identity_operator(tgt, mf);
    SymbolSolve s = solve_symbol_system(id, row);
    const Matrix& psi = s.c.M;
    res.residual = linalg::spectral_norm(row.M * psi - id.M);
    res.psi_norm = linalg::spectral_norm(psi);
    res.bound_ok = res.psi_norm <= (1.0 + 1e-6) * res.bound;
    const Eigen::Index words = static_cast<Eigen::Index>(src->dim());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const Eigen::Index mk = phi[k].source_mult;
        Matrix pk(words * mk, psi.cols());
        for (Eigen::Index w = 0; w < words; ++w) pk.middleRows(w * mk, mk) = psi.middleRows(w * total + offsets[k], mk);
        res.psi.push_back(std::move(pk));
    }
    res.psi_column = std::move(s.c);
    res.verdict = res.residual <= tol ? "solved" : "inconclusive";
    return res;
}

} // namespace fockdom
