#include "fockdom/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fockdom::kernels {

namespace {

using Idx = std::ptrdiff_t;

bool par(Exec ex) { return ex == Exec::parallel; }

void check_rows(const ShiftOperator& a, const Matrix& x, Eigen::Index m) {
    if (x.rows() != static_cast<Eigen::Index>(a.dim) * m) throw Error("shift kernel: row dimension mismatch");
}

} // namespace

Matrix shift_left(const ShiftOperator& a, const Matrix& x, Eigen::Index m, Exec ex) {
    check_rows(a, x, m);
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    const auto dim = static_cast<Idx>(a.dim);
#pragma omp parallel for schedule(static) if (par(ex))
    for (Idx c = 0; c < dim; ++c) {
        const std::size_t r = a.row[static_cast<std::size_t>(c)];
        if (r == WordTable::npos) continue;
        out.middleRows(static_cast<Eigen::Index>(r) * m, m) =
            a.weight[static_cast<std::size_t>(c)] * x.middleRows(c * m, m);
    }
    return out;
}

Matrix shift_left_adjoint(const ShiftOperator& a, const Matrix& x, Eigen::Index m, Exec ex) {
    check_rows(a, x, m);
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    const auto dim = static_cast<Idx>(a.dim);
#pragma omp parallel for schedule(static) if (par(ex))
    for (Idx c = 0; c < dim; ++c) {
        const std::size_t r = a.row[static_cast<std::size_t>(c)];
        if (r == WordTable::npos) continue;
        out.middleRows(c * m, m) =
            a.weight[static_cast<std::size_t>(c)] * x.middleRows(static_cast<Eigen::Index>(r) * m, m);
    }
    return out;
}

Matrix shift_right(const Matrix& x, const ShiftOperator& a, Eigen::Index m, Exec ex) {
    if (x.cols() != static_cast<Eigen::Index>(a.dim) * m) throw Error("shift kernel: column dimension mismatch");
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    const auto dim = static_cast<Idx>(a.dim);
#pragma omp parallel for schedule(static) if (par(ex))
    for (Idx c = 0; c < dim; ++c) {
        const std::size_t r = a.row[static_cast<std::size_t>(c)];
        if (r == WordTable::npos) continue;
        out.middleCols(c * m, m) =
            a.weight[static_cast<std::size_t>(c)] * x.middleCols(static_cast<Eigen::Index>(r) * m, m);
    }
    return out;
}

std::vector<Matrix> word_products(const std::vector<Matrix>& t, const WordTable& table, Exec ex) {
    if (t.size() != static_cast<std::size_t>(table.n())) throw Error("word_products: tuple size differs from n");
    const Eigen::Index d = t.empty() ? 0 : t[0].rows();
    std::vector<Matrix> out(table.size());
    out[0] = Matrix::Identity(d, d);
    for (int k = 1; k <= table.degree(); ++k) {
        const auto off = static_cast<Idx>(table.level_offset(k));
        const auto cnt = static_cast<Idx>(table.level_size(k));
#pragma omp parallel for schedule(static) if (par(ex))
        for (Idx r = 0; r < cnt; ++r) {
            const auto idx = static_cast<std::size_t>(off + r);
            out[idx] = t[static_cast<std::size_t>(table.first_letter(idx) - 1)] * out[table.tail(idx)];
        }
    }
    return out;
}

Matrix weighted_gram_sum(const std::vector<Matrix>& p, const std::vector<double>& coef, const Matrix* middle,
                         std::size_t begin, std::size_t end, Exec ex) {
    const Eigen::Index d = p.empty() ? 0 : p[0].rows();
    if (end <= begin) return Matrix::Zero(d, d);
    const std::size_t count = end - begin;
    const std::size_t blocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<Matrix> partial(blocks);
#pragma omp parallel for schedule(static) if (par(ex))
    for (Idx bi = 0; bi < static_cast<Idx>(blocks); ++bi) {
        Matrix acc = Matrix::Zero(d, d);
        const std::size_t lo = begin + static_cast<std::size_t>(bi) * kReduceBlock;
        const std::size_t hi = std::min(end, lo + kReduceBlock);
        for (std::size_t idx = lo; idx < hi; ++idx) {
            if (coef[idx] == 0.0) continue;
            if (middle) {
                acc.noalias() += coef[idx] * (p[idx] * (*middle) * p[idx].adjoint());
            } else {
                acc.noalias() += coef[idx] * (p[idx] * p[idx].adjoint());
            }
        }
        partial[static_cast<std::size_t>(bi)] = std::move(acc);
    }
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& m : partial) sum += m;
    return sum;
}

Matrix stacked_blocks(const std::vector<Matrix>& p, const std::vector<double>& scale, const Matrix& left,
                      std::size_t count, Exec ex) {
    const Eigen::Index m = left.rows();
    const Eigen::Index d = p.empty() ? 0 : p[0].rows();
    Matrix out(static_cast<Eigen::Index>(count) * m, d);
#pragma omp parallel for schedule(static) if (par(ex))
    for (Idx idx = 0; idx < static_cast<Idx>(count); ++idx) {
        out.middleRows(idx * m, m).noalias() =
            scale[static_cast<std::size_t>(idx)] * (left * p[static_cast<std::size_t>(idx)].adjoint());
    }
    return out;
}

Matrix symbol_extend(const Matrix& theta, const UniversalModel& target, Eigen::Index target_mult,
                     const WordTable& source, const std::vector<double>& source_b, Exec ex) {
    const Eigen::Index rows = static_cast<Eigen::Index>(target.dim()) * target_mult;
    if (theta.rows() != rows) throw Error("symbol_extend: symbol rows do not match the target space");
    if (source.n() != target.n()) throw Error("symbol_extend: generator counts differ");
    const Eigen::Index ms = theta.cols();
    Matrix out = Matrix::Zero(rows, static_cast<Eigen::Index>(source.size()) * ms);
    out.leftCols(ms) = std::sqrt(source_b[0]) * theta;
    const std::size_t tdim = target.dim();
    for (int k = 1; k <= source.degree(); ++k) {
        const auto off = static_cast<Idx>(source.level_offset(k));
        const auto cnt = static_cast<Idx>(source.level_size(k));
#pragma omp parallel for schedule(static) if (par(ex))
        for (Idx r = 0; r < cnt; ++r) {
            const auto idx = static_cast<std::size_t>(off + r);
            const std::size_t parent = source.tail(idx);
            const ShiftOperator& w = target.W(source.first_letter(idx));
            const double scale = std::sqrt(source_b[idx] / source_b[parent]);
            const auto col = static_cast<Eigen::Index>(idx) * ms;
            const auto pcol = static_cast<Eigen::Index>(parent) * ms;
            for (std::size_t c = 0; c < tdim; ++c) {
                const std::size_t rr = w.row[c];
                if (rr == WordTable::npos) continue;
                out.block(static_cast<Eigen::Index>(rr) * target_mult, col, target_mult, ms) =
                    (scale * w.weight[c]) *
                    out.block(static_cast<Eigen::Index>(c) * target_mult, pcol, target_mult, ms);
            }
        }
    }
    return out;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace fockdom::kernels
