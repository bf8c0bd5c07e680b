#include "fockdom/modelcheck.hpp"

#include <algorithm>
#include <cmath>

#include "fockdom/kernels.hpp"

namespace fockdom {

RealVector defect_diagonal(const UniversalModel& model, const FreeSeries& a, int m) {
    if (m > model.degree()) throw Error("defect: degree m exceeds the model degree");
    if (a.degree() < m) throw Error("defect: inverse series shorter than m");
    const WordTable& t = *model.table();
    const FreeSeries& b = model.weights();
    RealVector d(static_cast<Eigen::Index>(t.size()));
    const auto total = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < total; ++ii) {
        const auto beta = static_cast<std::size_t>(ii);
        const int len = t.length(beta);
        Coeff s = 0.0L;
        for (int j = 0; j <= std::min(m, len); ++j) {
            s += a[t.prefix(beta, j)] * b[t.suffix(beta, j)];
        }
        d(ii) = static_cast<double>(s / b[beta]);
    }
    return d;
}

Matrix defect_operator(const UniversalModel& model, const FreeSeries& a, int m) {
    return defect_diagonal(model, a, m).cast<Complex>().asDiagonal();
}

namespace {

// W_outer W_inner as a weighted partial permutation.
ShiftOperator compose(const ShiftOperator& outer, const ShiftOperator& inner) {
    ShiftOperator c;
    c.dim = inner.dim;
    c.row.assign(inner.dim, WordTable::npos);
    c.weight.assign(inner.dim, 0.0);
    for (std::size_t col = 0; col < inner.dim; ++col) {
        const std::size_t r = inner.row[col];
        if (r == WordTable::npos || outer.row[r] == WordTable::npos) continue;
        c.row[col] = outer.row[r];
        c.weight[col] = outer.weight[r] * inner.weight[col];
    }
    return c;
}

// sum_alpha coef_alpha W_alpha X W_alpha^* over |alpha| <= top, with W_alpha built
// level by level by composition. Only the nonzero entries of X are visited.
Matrix composed_gram_sum(const UniversalModel& model, const std::vector<double>& coef, const Matrix& x, int top) {
    const WordTable& t = *model.table();
    const std::size_t dim = model.dim();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> nz;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (x(i, j) != Complex(0.0)) nz.emplace_back(i, j);
        }
    }
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    auto scatter = [&](const ShiftOperator& w, double c) {
        if (c == 0.0) return;
        for (const auto& [i, j] : nz) {
            const std::size_t ri = w.row[static_cast<std::size_t>(i)];
            const std::size_t rj = w.row[static_cast<std::size_t>(j)];
            if (ri == WordTable::npos || rj == WordTable::npos) continue;
            out(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(rj)) +=
                c * w.weight[static_cast<std::size_t>(i)] * w.weight[static_cast<std::size_t>(j)] * x(i, j);
        }
    };
    ShiftOperator id;
    id.dim = dim;
    id.row.resize(dim);
    id.weight.assign(dim, 1.0);
    for (std::size_t i = 0; i < dim; ++i) id.row[i] = i;
    std::vector<ShiftOperator> prev{id};
    scatter(id, coef[0]);
    for (int k = 1; k <= top; ++k) {
        const std::size_t off = t.level_offset(k);
        const std::size_t poff = t.level_offset(k - 1);
        std::vector<ShiftOperator> cur(t.level_size(k));
        for (std::size_t q = 0; q < cur.size(); ++q) {
            const std::size_t idx = off + q;
            cur[q] = compose(model.W(t.first_letter(idx)), prev[t.tail(idx) - poff]);
            scatter(cur[q], coef[idx]);
        }
        prev = std::move(cur);
    }
    return out;
}

bool dense_fits(const UniversalModel& model, std::size_t budget) {
    const long double bytes = static_cast<long double>(model.dim()) * model.dim() * model.dim() * sizeof(Complex);
    return bytes <= static_cast<long double>(budget);
}

} // namespace

Matrix defect_operator_dense(const UniversalModel& model, const FreeSeries& a, int m, std::size_t memory_budget) {
    if (m > model.degree()) throw Error("defect: degree m exceeds the model degree");
    const std::size_t end = model.table()->level_offset(m) + model.table()->level_size(m);
    std::vector<double> coef(model.dim(), 0.0);
    for (std::size_t i = 0; i < end; ++i) coef[i] = a.at(i);
    if (!dense_fits(model, memory_budget)) {
        return composed_gram_sum(model, coef, Matrix::Identity(model.dim(), model.dim()), m);
    }
    const auto words = kernels::word_products(model.dense_tuple(), *model.table());
    return kernels::weighted_gram_sum(words, coef, nullptr, 0, end);
}

Matrix vacuum_resolution(const UniversalModel& model, std::size_t memory_budget) {
    std::vector<double> coef(model.dim());
    for (std::size_t i = 0; i < coef.size(); ++i) coef[i] = model.b(i);
    const Matrix p = vacuum_projection(*model.table());
    if (!dense_fits(model, memory_budget)) return composed_gram_sum(model, coef, p, model.degree());
    const auto words = kernels::word_products(model.dense_tuple(), *model.table());
    return kernels::weighted_gram_sum(words, coef, &p, 0, words.size());
}

namespace {

bool convex_growth(const std::vector<double>& v) {
    if (v.size() < 3) return false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1] * (1.0 + 1e-12))) return false;
    }
    for (std::size_t i = 2; i < v.size(); ++i) {
        if (v[i] - v[i - 1] < (v[i - 1] - v[i - 2]) * (1.0 - 1e-9)) return false;
    }
    return true;
}

} // namespace

AdmissibilityReport check_admissibility(const FreeSeries& b_in, int N) {
    if (b_in.degree() < N) throw Error("admissibility: series degree below N");
    const FreeSeries b = b_in.truncate(N);
    if (auto bad = b.first_nonpositive()) {
        throw Error("admissibility: non-positive coefficient at word \"" + b.table()->word_at(*bad).to_string() + "\"");
    }
    if (b[0] != 1.0L) throw Error("admissibility: constant term must be 1");

    AdmissibilityReport rep;
    rep.degree = N;
    const RatioSummary rs = ratio_summary(b);
    rep.observed_sup_ratio = rs.sup_per_generator;
    rep.observed_sup = rs.sup;
    rep.sup_ratio_per_level = rs.sup_per_level;
    const bool ratio_growth = convex_growth(rs.sup_per_level);
    rep.checks.push_back({"ratio_sup", ratio_growth ? "divergence-trend" : "pass", true,
                          "observed through degree " + std::to_string(N)});

    const RadiusDiagnostic rd = convergence_radius_diagnostic(b);
    rep.radius_values = rd.values;
    rep.radius_trend = rd.trend;
    rep.checks.push_back({"radius", rd.divergence_trend ? "divergence-trend" : "pass", true,
                          "level estimates only; no claim about the limsup"});

    const UniversalModel model(b, N);
    const FreeSeries a = invert(b);
    RealVector prev;
    for (int k = 0; k <= N; ++k) {
        const RealVector d = defect_diagonal(model, a, k);
        rep.partial_sum_norms.push_back(d.cwiseAbs().maxCoeff());
        if (k > 0) rep.cauchy_increments.push_back((d - prev).cwiseAbs().maxCoeff());
        prev = d;
    }
    rep.partial_sum_sup = *std::max_element(rep.partial_sum_norms.begin(), rep.partial_sum_norms.end());
    rep.checks.push_back({"partial_sums", convex_growth(rep.partial_sum_norms) ? "divergence-trend" : "pass", true,
                          "sup over k <= N of the diagonal partial sums"});
    return rep;
}

BoundaryReport boundary_property(const FreeSeries& b, int N) {
    if (b.degree() < N + 1) throw Error("boundary: weights through degree N+1 are required");
    if (auto bad = b.first_nonpositive()) {
        throw Error("boundary: non-positive coefficient at word \"" + b.table()->word_at(*bad).to_string() + "\"");
    }
    const WordTable& t = *b.table();
    const int n = t.n();
    BoundaryReport rep;
    rep.degree = N;
    rep.level_constant = b.level_constant();

    for (int k = 0; k <= N; ++k) {
        double lo = INFINITY;
        double hi = -INFINITY;
        const std::size_t off = t.level_offset(k);
        for (std::size_t q = 0; q < t.level_size(k); ++q) {
            const std::size_t g = off + q;
            Coeff s = 0.0L;
            for (int i = 1; i <= n; ++i) s += b[g] / b[t.prepend(i, g)];
            lo = std::min(lo, static_cast<double>(s));
            hi = std::max(hi, static_cast<double>(s));
        }
        rep.s_min.push_back(lo);
        rep.s_max.push_back(hi);
    }
    rep.sup = *std::max_element(rep.s_max.begin(), rep.s_max.end());
    rep.sup_level = static_cast<int>(
        std::find_if(rep.s_max.begin(), rep.s_max.end(), [&](double v) { return v >= rep.sup * (1.0 - 1e-12); }) -
        rep.s_max.begin());
    rep.tail_min = rep.s_min.back();
    rep.tail_max = rep.s_max.back();
    rep.gap = rep.sup - rep.tail_max;

    // Non-increasing from the sup level onward, within relative slack.
    bool nonincreasing = true;
    for (int k = rep.sup_level + 1; k <= N; ++k) {
        const double prev = rep.s_max[static_cast<std::size_t>(k - 1)];
        const double cur = rep.s_max[static_cast<std::size_t>(k)];
        const double slack = kMonotoneSlack * std::max(std::fabs(prev), 1.0);
        if (cur > prev + slack) nonincreasing = false;
    }
    rep.tail_monotone = nonincreasing;

    const double band = rep.tail_max - rep.tail_min;
    if (band > kCertifyGap * std::max(1.0, std::fabs(rep.tail_max))) {
        rep.verdict = "inconclusive";
        rep.reason = "last-level band [min, max] is wider than the separation threshold";
    } else if (rep.sup_level < N && nonincreasing && rep.gap > kCertifyGap) {
        rep.verdict = "boundary-property-certified";
        rep.reason = "sup attained before the last level and the tail decreases to a value below it";
    } else if (rep.sup_level < N && nonincreasing) {
        rep.verdict = "criterion-not-satisfied";
        rep.reason = "tail does not separate from the sup";
    } else if (rep.sup_level == N) {
        // Still increasing at the last level: the limit dominates every observed value.
        bool increasing = true;
        for (int k = 1; k <= N; ++k) {
            if (rep.s_max[static_cast<std::size_t>(k)] <
                rep.s_max[static_cast<std::size_t>(k - 1)] -
                    kMonotoneSlack * std::max(std::fabs(rep.s_max[static_cast<std::size_t>(k - 1)]), 1.0)) {
                increasing = false;
            }
        }
        rep.verdict = increasing ? "criterion-not-satisfied" : "inconclusive";
        rep.reason = increasing ? "sequence non-decreasing through the last level; the limit is its sup"
                                : "sup attained at the last tested level";
    } else {
        rep.verdict = "inconclusive";
        rep.reason = "tail is not monotone after the sup";
    }

    // Tail of the compactness hypothesis, levels with g_i g_p gamma inside the table.
    for (int k = 0; k + 2 <= b.degree() && k <= N - 1; ++k) {
        double worst = 0.0;
        const std::size_t off = t.level_offset(k);
        for (std::size_t q = 0; q < t.level_size(k); ++q) {
            const std::size_t g = off + q;
            for (int p = 1; p <= n; ++p) {
                const std::size_t gp = t.prepend(p, g);
                const Coeff base = b[g] / b[gp];
                for (int i = 1; i <= n; ++i) {
                    const std::size_t gip = t.prepend(i, gp);
                    worst = std::max(worst, static_cast<double>(std::fabs(b[gp] / b[gip] - base)));
                }
            }
        }
        rep.compactness_tail.push_back(worst);
    }
    if (!rep.compactness_tail.empty()) {
        const auto& ct = rep.compactness_tail;
        rep.compactness_tail_small = ct.back() <= 1e-2 * std::max(1.0, ct.front()) ||
                                     (ct.size() >= 2 && ct.back() < ct[ct.size() - 2] && ct.back() < 0.1);
    }
    return rep;
}

} // namespace fockdom
