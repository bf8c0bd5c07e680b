// Serial reference path against the OpenMP path for the word-indexed kernels.
#include <benchmark/benchmark.h>

#include "fockdom/freeseries.hpp"
#include "fockdom/kernels.hpp"
#include "fockdom/linalg.hpp"

using namespace fockdom;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

const char* label(Exec ex) { return ex == Exec::serial ? "serial" : "parallel"; }

void BM_ShiftLeft(benchmark::State& st) {
    const Exec ex = exec_of(st);
    const UniversalModel m(family_xis(-1.0, 2, 10), 10);
    linalg::Rng rng(1);
    const Matrix x = linalg::random_complex(rng, static_cast<Eigen::Index>(m.dim()) * 2, 16);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::shift_left(m.W(1), x, 2, ex));
    st.SetLabel(label(ex));
}

void BM_WordProducts(benchmark::State& st) {
    const Exec ex = exec_of(st);
    const auto table = make_table(2, 8);
    linalg::Rng rng(2);
    std::vector<Matrix> t{linalg::random_complex(rng, 24, 24) * 0.1, linalg::random_complex(rng, 24, 24) * 0.1};
    for (auto _ : st) benchmark::DoNotOptimize(kernels::word_products(t, *table, ex));
    st.SetLabel(label(ex));
}

void BM_WeightedGramSum(benchmark::State& st) {
    const Exec ex = exec_of(st);
    const auto table = make_table(2, 8);
    linalg::Rng rng(3);
    std::vector<Matrix> t{linalg::random_complex(rng, 24, 24) * 0.1, linalg::random_complex(rng, 24, 24) * 0.1};
    const auto words = kernels::word_products(t, *table);
    std::vector<double> coef(words.size(), 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::weighted_gram_sum(words, coef, nullptr, 0, words.size(), ex));
    st.SetLabel(label(ex));
}

void BM_SymbolExtend(benchmark::State& st) {
    const Exec ex = exec_of(st);
    const FreeSeries b = family_gs(0.5, 2, 7);
    const UniversalModel m(b, 7);
    std::vector<double> bw(m.dim());
    for (std::size_t i = 0; i < bw.size(); ++i) bw[i] = m.b(i);
    linalg::Rng rng(4);
    const Matrix theta = linalg::random_complex(rng, static_cast<Eigen::Index>(m.dim()), 2);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::symbol_extend(theta, m, 1, *m.table(), bw, ex));
    st.SetLabel(label(ex));
}

} // namespace

BENCHMARK(BM_ShiftLeft)->Arg(0)->Arg(1);
BENCHMARK(BM_WordProducts)->Arg(0)->Arg(1);
BENCHMARK(BM_WeightedGramSum)->Arg(0)->Arg(1);
BENCHMARK(BM_SymbolExtend)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
